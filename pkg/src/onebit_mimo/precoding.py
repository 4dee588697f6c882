"""Zero-forcing precoding and the one-bit DAC transmit chain."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import complex_normal
from .quantization import ONE_BIT_GAIN, one_bit_quantize

__all__ = [
    "SingularPrecoderError",
    "Precoder",
    "TransmitFrame",
    "zf_precoder",
    "transmit_bussgang_gain",
    "exact_transmit_gain",
    "draw_symbols",
    "quantized_transmit",
]

DEFAULT_COND_LIMIT = 1e10


class SingularPrecoderError(np.linalg.LinAlgError):
    """The estimate Gram matrix is too ill-conditioned to invert."""


@dataclass(frozen=True)
class Precoder:
    W: np.ndarray  # (..., M, K)


def zf_precoder(H_hat, cond_limit=DEFAULT_COND_LIMIT) -> Precoder:
    """``W = H_hat (H_hat^H H_hat)^{-1}``, batched over leading axes.

    The Gram system is solved by LU factorization, never inverted
    explicitly; ``H_hat^H W = I``.
    """
    H_hat = np.asarray(H_hat)
    M, K = H_hat.shape[-2:]
    if M < K:
        raise ValueError(f"ZF needs M >= K, got M={M}, K={K}")
    gram = np.swapaxes(H_hat.conj(), -1, -2) @ H_hat
    cond = np.linalg.cond(gram)
    if np.any(~np.isfinite(cond)) or np.any(cond > cond_limit):
        raise SingularPrecoderError(
            f"Gram matrix condition number {np.max(cond):.3g} exceeds {cond_limit:.3g}"
        )
    # gram is Hermitian, so W = (gram^{-1} H^H)^H
    inv_h = np.linalg.solve(gram, np.swapaxes(H_hat.conj(), -1, -2))
    return Precoder(W=np.swapaxes(inv_h.conj(), -1, -2))


def transmit_bussgang_gain(stats, constants):
    """Deterministic-equivalent transmit Bussgang gain per cell.

    ``A_j = sqrt(2 K (c-1)^2 / (pi zeta_j))``, valid for large (M, K) at a
    fixed load ratio ``c = M/K > 1``.
    """
    c = constants.c
    if not c > 1:
        raise ValueError(f"load ratio M/K must exceed 1, got {c}")
    return np.sqrt(2 * constants.K * (c - 1) ** 2 / (np.pi * np.asarray(stats.zeta)))


def exact_transmit_gain(W):
    """Per-antenna Bussgang gains ``sqrt(2/pi) diag(W W^H)^{-1/2}`` for one realization."""
    W = np.asarray(W)
    return ONE_BIT_GAIN / np.sqrt(np.sum(np.abs(W) ** 2, axis=-1))


def draw_symbols(K, n, rng: np.random.Generator, kind="gaussian"):
    """Unit-variance data symbols of shape (K, n)."""
    if kind == "gaussian":
        return complex_normal(rng, (K, n))
    if kind == "qpsk":
        return one_bit_quantize(rng.standard_normal((K, n)) + 1j * rng.standard_normal((K, n)))
    raise ValueError(f"unknown symbol distribution {kind!r}")


@dataclass(frozen=True)
class TransmitFrame:
    s: np.ndarray
    x: np.ndarray
    x_tilde: np.ndarray
    q: np.ndarray
    gain: object
    eta: float


def quantized_transmit(W, s, gain, P_t=1.0) -> TransmitFrame:
    """Precode, quantize, and split the DAC output into ``gain * x + q``.

    ``s`` may be (K,) or (K, n) for n symbol vectors; ``gain`` is a scalar or
    a per-antenna vector.  ``eta = P_t / M`` normalizes the unit-modulus
    output to average power ``P_t``.
    """
    W = W.W if isinstance(W, Precoder) else np.asarray(W)
    s = np.asarray(s)
    x = W @ s
    x_tilde = one_bit_quantize(x)
    g = np.asarray(gain)
    if g.ndim == 1 and s.ndim == 2:
        g = g[:, None]
    q = x_tilde - g * x
    return TransmitFrame(s=s, x=x, x_tilde=x_tilde, q=q, gain=gain, eta=P_t / W.shape[0])
