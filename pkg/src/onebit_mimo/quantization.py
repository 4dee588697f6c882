"""One-bit quantizer and its Bussgang linearization for Gaussian inputs."""

import numpy as np

__all__ = [
    "ALPHABET",
    "ONE_BIT_GAIN",
    "QUANT_NOISE_VAR",
    "one_bit_quantize",
    "bussgang_gain_diag",
    "arcsin_law_covariance",
    "training_bussgang_gains",
]

_INV_SQRT2 = 1.0 / np.sqrt(2.0)

#: Output alphabet of the complex one-bit quantizer.
ALPHABET = _INV_SQRT2 * np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j])

#: Bussgang gain for a unit-variance input, sqrt(2/pi).
ONE_BIT_GAIN = np.sqrt(2.0 / np.pi)

#: Per-entry quantization noise variance, 1 - 2/pi.
QUANT_NOISE_VAR = 1.0 - 2.0 / np.pi

_ARCSIN_TOL = 1e-9


def one_bit_quantize(a):
    """Quantize real and imaginary parts to their sign, scaled by 1/sqrt(2).

    sign(0) is taken as +1.  Every output entry has unit modulus.
    """
    a = np.asarray(a)
    if np.isnan(a).any():
        raise ValueError("cannot quantize NaN entries")
    re = np.where(a.real >= 0, _INV_SQRT2, -_INV_SQRT2)
    im = np.where(a.imag >= 0, _INV_SQRT2, -_INV_SQRT2)
    return re + 1j * im


def bussgang_gain_diag(input_variances):
    """Diagonal Bussgang gains ``sqrt(2/pi) / sqrt(r_ii)`` of a one-bit quantizer."""
    r = np.asarray(input_variances, dtype=float)
    if np.any(~(r > 0)):
        raise ValueError("input variances must be strictly positive")
    return ONE_BIT_GAIN / np.sqrt(r)


def _safe_arcsin(x):
    if np.any(np.abs(x) > 1 + _ARCSIN_TOL):
        raise ValueError("normalized covariance entry outside [-1, 1]; "
                         "input is not a valid covariance matrix")
    return np.arcsin(np.clip(x, -1.0, 1.0))


def arcsin_law_covariance(R_yy):
    """Quantization-noise covariance of ``Q(y)`` for ``y ~ CN(0, R_yy)``.

    Parameters
    ----------
    R_yy : (N, N) complex array
        Hermitian input covariance with strictly positive diagonal.

    Returns
    -------
    (N, N) complex array
        ``(2/pi)(arcsin(B) + j arcsin(C)) - (2/pi)(B + jC)`` where ``B`` and
        ``C`` are the real and imaginary parts of ``R_yy`` normalized by its
        diagonal on both sides.
    """
    R = np.asarray(R_yy, dtype=complex)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ValueError(f"R_yy must be square, got shape {R.shape}")
    if not np.allclose(R, R.conj().T, rtol=1e-10, atol=1e-12 * np.abs(R).max()):
        raise ValueError("R_yy must be Hermitian")
    d = np.real(np.diag(R))
    if np.any(~(d > 0)):
        raise ValueError("R_yy must have a strictly positive diagonal")
    s = 1.0 / np.sqrt(d)
    B = s[:, None] * R.real * s[None, :]
    C = s[:, None] * R.imag * s[None, :]
    return (2 / np.pi) * (_safe_arcsin(B) + 1j * _safe_arcsin(C)) - (2 / np.pi) * (B + 1j * C)


def training_bussgang_gains(scenario):
    """Per-user Bussgang gains of the quantized uplink pilots, shape (L, K).

    With identity pilots, the pilot slot of user k at BS j sees input variance
    ``sum_l K rho_p beta[j, l, k] + 1`` on every antenna.
    """
    return bussgang_gain_diag(pilot_input_variance(scenario))


def pilot_input_variance(scenario):
    """``sum_l K rho_p beta[j, l, k] + 1``, shape (L, K)."""
    c = scenario.constants
    return c.K * c.rho_p * scenario.beta.sum(axis=1) + 1.0
