"""Antenna-ratio search and the energy-efficiency model.

Both work on the closed-form rates only, with the antenna count treated as
a continuous variable.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .rates import asymptotic_rate, closed_form_fr, closed_form_onebit

__all__ = [
    "KappaSearchError",
    "KappaResult",
    "kappa_search",
    "low_snr_kappa",
    "rate_crossing",
    "PowerModel",
    "DAC_FOM",
    "energy_efficiency",
    "EESweep",
    "ee_sweep",
]

#: DAC figure of merit [J/step]: P_DAC = DAC_FOM * f_s * 2**b.
DAC_FOM = 494e-15


class KappaSearchError(RuntimeError):
    pass


@dataclass(frozen=True)
class KappaResult:
    """Outcome of a one-bit vs full-resolution antenna matching.

    ``achieved_gap`` is measured on the sum rate per user [bits/s/Hz].
    """

    M_conv: float
    M_one: float
    kappa: float
    achieved_gap: float
    epsilon: float
    P_t: float
    criterion: str
    mc_gap: float | None = None

    @property
    def M_one_int(self) -> int:
        return int(round(self.M_one))

    @property
    def kappa_rounded(self) -> float:
        return round(self.kappa, 2)


def _per_user_onebit(scenario, M, P_t):
    return closed_form_onebit(scenario, M=M, P_t=P_t).per_user


def _bisect_up(f, target, lo, hi, rtol=1e-13, max_iter=400):
    """Smallest x in [lo, hi] (to ``rtol``) with f(x) >= target, f nondecreasing.

    The upper end of the final bracket is returned so ``f(x) >= target``
    holds exactly for the result.
    """
    for _ in range(max_iter):
        if hi / lo - 1.0 <= rtol:
            return hi
        mid = np.sqrt(lo * hi)
        if f(mid) >= target:
            hi = mid
        else:
            lo = mid
    raise KappaSearchError("bisection did not converge within the iteration budget")


def _check_monotone(f, lo, hi, n=33):
    grid = np.geomspace(lo, hi, n)
    vals = np.array([f(m) for m in grid])
    if np.any(np.diff(vals) < -1e-12 * np.abs(vals[1:])):
        raise KappaSearchError("closed-form rate is not monotone in M on the search bracket")


def rate_crossing(scenario, target, onebit=True, *, P_t=None, M_max=1e12):
    """Smallest continuous M at which the closed-form per-user rate reaches ``target``."""
    P_t = scenario.constants.P_t if P_t is None else P_t
    cf = closed_form_onebit if onebit else closed_form_fr
    f = lambda M: cf(scenario, M=M, P_t=P_t).per_user  # noqa: E731
    lo = scenario.K + 1.0
    if f(lo) >= target:
        return lo
    hi = 2 * lo
    while f(hi) < target:
        hi *= 4
        if hi > M_max:
            raise KappaSearchError(f"per-user rate {target} not reached below M={M_max:g}")
    return _bisect_up(f, target, lo, hi)


def kappa_search(scenario, M_conv, epsilon=1e-3, *, P_t=None, criterion="threshold",
                 M_max=1e13, mc_trials=0, mc_seed=0) -> KappaResult:
    """Antenna count the one-bit network needs to match a full-resolution one.

    ``criterion="threshold"`` returns the smallest ``M_one >= K+1`` whose
    one-bit per-user sum rate is within ``epsilon`` of the full-resolution
    rate at ``M_conv`` (a search upward over M).  ``"root"`` solves for equal
    rates.  Both bisect on log M over a bracket on which the closed-form rate
    is first checked to be monotone.

    With ``mc_trials > 0`` the result is re-checked by simulation at the
    nearest integer ``M_one`` and the Monte-Carlo per-user gap is stored in
    ``mc_gap``.
    """
    if criterion not in ("threshold", "root"):
        raise ValueError(f"unknown criterion {criterion!r}")
    K = scenario.K
    if not M_conv > K:
        raise ValueError(f"M_conv={M_conv} must exceed K={K}")
    P_t = scenario.constants.P_t if P_t is None else P_t
    r_conv = closed_form_fr(scenario, M=M_conv, P_t=P_t).per_user
    target = r_conv - epsilon if criterion == "threshold" else r_conv
    limit = asymptotic_rate(scenario).per_user
    if not target < limit:
        raise KappaSearchError(
            f"target rate {target:.6g} is not below the one-bit limit {limit:.6g}")

    f = lambda M: _per_user_onebit(scenario, M, P_t)  # noqa: E731
    lo = K + 1.0
    if f(lo) >= target:
        M_one = lo
    else:
        hi = max(2.0 * M_conv, lo + 1.0)
        while f(hi) < target:
            hi *= 4.0
            if hi > M_max:
                raise KappaSearchError(f"target rate not reached below M={M_max:g}")
        _check_monotone(f, lo, hi)
        M_one = _bisect_up(f, target, lo, hi)
    gap = abs(f(M_one) - r_conv)

    mc_gap = None
    if mc_trials:
        from .rates import mc_rate_breakdown

        one = scenario.with_constants(M=int(round(M_one)), P_t=P_t)
        conv = scenario.with_constants(M=int(round(M_conv)), P_t=P_t)
        mc_gap = abs(mc_rate_breakdown(one, mc_trials, mode="mc-onebit", rng=mc_seed).per_user
                     - mc_rate_breakdown(conv, mc_trials, mode="mc-fr", rng=mc_seed).per_user)
    return KappaResult(M_conv=M_conv, M_one=float(M_one), kappa=float(M_one / M_conv),
                       achieved_gap=float(gap),
                       epsilon=epsilon, P_t=float(P_t), criterion=criterion, mc_gap=mc_gap)


def low_snr_kappa() -> float:
    """Low-SNR antenna ratio pi^2/4."""
    return np.pi ** 2 / 4


@dataclass(frozen=True)
class PowerModel:
    """Downlink power consumption model.

    Defaults are the calibrated reference setting: an ideal
    amplifier and 35.8 mW per RF chain (excluding the two DACs).
    """

    amp_efficiency: float = 1.0
    f_s: float = 100e6
    bits: int = 1
    P_RF: float = 0.0358
    dac_fom: float = DAC_FOM

    def __post_init__(self):
        if not 0 < self.amp_efficiency <= 1:
            raise ValueError(f"amplifier efficiency must be in (0, 1], got {self.amp_efficiency}")
        if self.f_s < 0 or self.P_RF < 0 or self.bits < 1:
            raise ValueError("f_s and P_RF must be nonnegative and bits >= 1")

    @property
    def P_DAC(self) -> float:
        """Power of one DAC [W]."""
        return self.dac_fom * self.f_s * 2.0 ** self.bits

    def total_power(self, M, P_t) -> float:
        """``P_t / amp_efficiency + M (2 P_DAC + P_RF)``."""
        return P_t / self.amp_efficiency + M * (2 * self.P_DAC + self.P_RF)


def energy_efficiency(sum_rate, power_model: PowerModel, M, P_t) -> float:
    """Sum rate per watt of total consumed power [bits/s/Hz/W]."""
    p = power_model.total_power(M, P_t)
    if p <= 0:
        raise ValueError("total consumed power is zero")
    return sum_rate / p


@dataclass(frozen=True)
class EESweep:
    f_s: np.ndarray
    ee_onebit: np.ndarray
    ee_fr: np.ndarray
    M_one: int
    M_conv: int
    sum_rate_onebit: float
    sum_rate_fr: float
    crossover_fs: float


def ee_sweep(scenario, f_s_grid, *, M_conv=128, bits_fr=10, bits_onebit=1, P_RF=0.0358,
             amp_efficiency=1.0, P_t=None, M_one=None) -> EESweep:
    """EE of both architectures over sampling frequency at equal sum rate.

    ``M_one`` defaults to the nearest integer to the equal-rate antenna count
    (``kappa_search`` with ``criterion="root"``).  ``crossover_fs`` is the
    frequency above which the one-bit network is more efficient (NaN if the
    curves do not cross at a positive frequency).
    """
    f_s_grid = np.asarray(f_s_grid, dtype=float)
    if f_s_grid.size == 0:
        raise ValueError("empty sampling-frequency grid")
    P_t = scenario.constants.P_t if P_t is None else P_t
    if M_one is None:
        M_one = kappa_search(scenario, M_conv, 0.0, P_t=P_t, criterion="root").M_one_int
    r_fr = closed_form_fr(scenario, M=M_conv, P_t=P_t).sum_rate
    r_one = closed_form_onebit(scenario, M=M_one, P_t=P_t).sum_rate
    pm_fr = PowerModel(amp_efficiency, 0.0, bits_fr, P_RF)
    pm_one = PowerModel(amp_efficiency, 0.0, bits_onebit, P_RF)
    ee_one = np.array([energy_efficiency(r_one, replace(pm_one, f_s=f), M_one, P_t)
                       for f in f_s_grid])
    ee_fr = np.array([energy_efficiency(r_fr, replace(pm_fr, f_s=f), M_conv, P_t)
                      for f in f_s_grid])

    # total power is affine in f_s: P = a + b f_s
    a_one, a_fr = pm_one.total_power(M_one, P_t), pm_fr.total_power(M_conv, P_t)
    b_one = 2 * M_one * DAC_FOM * 2.0 ** bits_onebit
    b_fr = 2 * M_conv * DAC_FOM * 2.0 ** bits_fr
    den = r_one * b_fr - r_fr * b_one
    cross = (r_fr * a_one - r_one * a_fr) / den if den != 0 else np.nan
    if not cross > 0:
        cross = np.nan
    return EESweep(f_s=f_s_grid, ee_onebit=ee_one, ee_fr=ee_fr, M_one=int(M_one),
                   M_conv=int(M_conv), sum_rate_onebit=r_one, sum_rate_fr=r_fr,
                   crossover_fs=float(cross))
