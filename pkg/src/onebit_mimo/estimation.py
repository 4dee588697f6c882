"""Uplink pilot training through one-bit ADCs and MMSE channel estimation.

Pilots are the K-dimensional identity (tau_p = K), so pilot slot k at BS j
isolates user k of every cell; estimates are formed per user rather than on
the stacked MK-vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import complex_normal
from .quantization import one_bit_quantize, pilot_input_variance, training_bussgang_gains

__all__ = [
    "EstimationStatistics",
    "PilotObservations",
    "ChannelEstimate",
    "simulate_uplink_training",
    "mmse_estimate_onebit",
    "mmse_estimate_fr",
    "estimation_stats",
]


@dataclass(frozen=True)
class EstimationStatistics:
    """Closed-form per-antenna estimate statistics, arrays indexed [j, k] or [j].

    ``t`` / ``t_fr`` are the estimate variances of ``h_jjk`` with one-bit and
    full-resolution ADCs, ``t_tilde`` / ``t_tilde_fr`` the error variances,
    ``zeta = mean_k 1/t``, ``zeta_fr`` its FR analog, and
    ``zeta_bar = sum_k 1/c_jjk`` with ``c_jjk = beta_jjk^2 / (sum_l K rho_p beta_jlk + 1)``.
    """

    t: np.ndarray
    t_fr: np.ndarray
    t_tilde: np.ndarray
    t_tilde_fr: np.ndarray
    zeta: np.ndarray
    zeta_fr: np.ndarray
    zeta_bar: np.ndarray


def estimation_stats(scenario) -> EstimationStatistics:
    c = scenario.constants
    own = scenario.fading.own
    den = pilot_input_variance(scenario)
    t_fr = own ** 2 * c.rho_p * c.K / den
    t = (2 / np.pi) * t_fr
    with np.errstate(divide="ignore"):
        zeta = np.mean(1.0 / t, axis=1)
        zeta_fr = np.mean(1.0 / t_fr, axis=1)
    zeta_bar = np.sum(den / own ** 2, axis=1)
    return EstimationStatistics(
        t=t, t_fr=t_fr, t_tilde=own - t, t_tilde_fr=own - t_fr,
        zeta=zeta, zeta_fr=zeta_fr, zeta_bar=zeta_bar,
    )


@dataclass(frozen=True)
class PilotObservations:
    """Received pilot slots at every BS, shape (L, M, K).

    ``received[j][:, k] = sum_l sqrt(rho_p K) h_jlk + n_jk``;
    ``quantized`` is its one-bit ADC output.
    """

    received: np.ndarray
    quantized: np.ndarray


@dataclass(frozen=True)
class ChannelEstimate:
    H_hat: np.ndarray  # (L, M, K): own-cell estimates, column k of H_hat[j] is h_hat_jjk
    mode: str  # "one-bit" | "full-resolution"


def simulate_uplink_training(scenario, channels, rng) -> PilotObservations:
    """Pass identity pilots through the channels and the one-bit ADCs.

    ``channels.H[j, l]`` (BS j, cell l) carries the pilots of cell l to BS j;
    noise at BS j comes from substream ``rng.child(j)``.
    """
    c = scenario.constants
    L, K = c.L, c.K
    M = channels.H.shape[2]
    amp = np.sqrt(c.rho_p * K)
    received = amp * channels.H.sum(axis=1)  # sum over transmitting cells l
    for j in range(L):
        received[j] += complex_normal(rng.child(j).generator(), (M, K))
    return PilotObservations(received=received, quantized=one_bit_quantize(received))


def _check_shape(obs, scenario):
    L, K = scenario.L, scenario.K
    if obs.ndim != 3 or obs.shape[0] != L or obs.shape[2] != K:
        raise ValueError(f"observations of shape {obs.shape} do not match L={L}, K={K}")


def mmse_estimate_onebit(observations, scenario) -> ChannelEstimate:
    """``h_hat_jjk = sqrt(rho_p K) beta_jjk a_jk r_jk`` from quantized pilots."""
    r = observations.quantized if isinstance(observations, PilotObservations) else np.asarray(observations)
    _check_shape(r, scenario)
    c = scenario.constants
    scale = np.sqrt(c.rho_p * c.K) * scenario.fading.own * training_bussgang_gains(scenario)
    return ChannelEstimate(H_hat=r * scale[:, None, :], mode="one-bit")


def mmse_estimate_fr(observations, scenario) -> ChannelEstimate:
    """``h_hat_jjk = sqrt(rho_p K) beta_jjk y_jk / (sum_l K rho_p beta_jlk + 1)``.

    This is the usual MMSE estimator on unquantized pilots; its per-antenna
    variance is ``t_fr``.
    """
    y = observations.received if isinstance(observations, PilotObservations) else np.asarray(observations)
    _check_shape(y, scenario)
    c = scenario.constants
    scale = np.sqrt(c.rho_p * c.K) * scenario.fading.own / pilot_input_variance(scenario)
    return ChannelEstimate(H_hat=y * scale[:, None, :], mode="full-resolution")
