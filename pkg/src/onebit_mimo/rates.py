"""Downlink ergodic rates: Monte-Carlo, closed forms, and the large-M limit.

Every breakdown reports the interference and noise terms normalized by the
desired-signal power, so ``gamma = 1 / (CU + QN + IUI + PC + TN)``.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .channel import CHANNEL, PILOT_NOISE, SYMBOLS, RngStream, draw_channels
from .estimation import (
    estimation_stats,
    mmse_estimate_fr,
    mmse_estimate_onebit,
    simulate_uplink_training,
)
from .precoding import (
    SingularPrecoderError,
    draw_symbols,
    exact_transmit_gain,
    quantized_transmit,
    transmit_bussgang_gain,
    zf_precoder,
)
from .quantization import QUANT_NOISE_VAR

__all__ = [
    "MODES",
    "RateBreakdown",
    "DegradationRatios",
    "MCMoments",
    "closed_form_onebit",
    "closed_form_fr",
    "closed_form",
    "asymptotic_rate",
    "degradation_ratios",
    "mc_moments",
    "mc_rate_breakdown",
]

MODES = ("mc-onebit", "mc-fr", "cf-onebit", "cf-fr", "asymptotic")


@dataclass(frozen=True)
class RateBreakdown:
    """Per-user rate decomposition; every array has shape (L, K).

    ``DS`` is the absolute desired-signal power [W]; the other power terms
    are normalized by it.  Monte-Carlo modes fold pilot contamination into
    ``IUI`` and report ``PC`` as NaN.  ``rate_se`` holds jackknife standard
    errors for Monte-Carlo modes and is None otherwise.
    """

    DS: np.ndarray
    CU: np.ndarray
    QN: np.ndarray
    IUI: np.ndarray
    PC: np.ndarray
    TN: np.ndarray
    gamma: np.ndarray
    rate: np.ndarray
    mode: str
    rate_se: np.ndarray | None = None
    per_user_se: float | None = None

    @property
    def sum_rate(self) -> float:
        return float(np.sum(self.rate))

    @property
    def per_user(self) -> float:
        """Sum rate divided by the number of users, L*K."""
        return float(np.mean(self.rate))


def _finish(DS, CU, QN, IUI, PC, TN, mode, **extra):
    total = CU + QN + IUI + np.nan_to_num(PC) + TN
    with np.errstate(divide="ignore"):
        gamma = 1.0 / total
    return RateBreakdown(DS=DS, CU=CU, QN=QN, IUI=IUI, PC=PC, TN=TN,
                         gamma=gamma, rate=np.log2(1.0 + gamma), mode=mode, **extra)


def _resolve(scenario, M, P_t):
    c = scenario.constants
    M = c.M if M is None else M
    P_t = c.P_t if P_t is None else P_t
    if not M > c.K:
        raise ValueError(f"closed forms need M > K, got M={M}, K={c.K}")
    if not c.rho_p > 0:
        raise ValueError("closed forms need a positive pilot SNR")
    return M, P_t


def _pc_terms(beta, own, zeta):
    """``sum_{l != j} zeta_j beta_ljk^2 / (zeta_l beta_llk^2)`` as (L, K)."""
    L = beta.shape[0]
    off = 1.0 - np.eye(L)[:, :, None]  # [l, j]
    ratio = zeta[None, :, None] / zeta[:, None, None]  # zeta_j / zeta_l
    return np.sum(off * ratio * beta ** 2 / own[:, None, :] ** 2, axis=0)


def _interference_terms(scenario, M, t, zeta):
    """CU, IUI and PC (normalized) for estimate variances ``t`` (L, K)."""
    beta = scenario.beta  # [l, j, k]
    own = scenario.fading.own
    K = scenario.K
    L = scenario.L
    dof = M - K
    # sum_{m != k} 1/t_jjm, summed directly: subtracting 1/t_jjk from the
    # full sum cancels badly when one user's estimate is much weaker
    inv_t_others = (1.0 / t) @ (1.0 - np.eye(K))

    CU = (own - t) / (dof * t)
    intra = (own - t) / dof * inv_t_others

    off = 1.0 - np.eye(L)[:, :, None]
    ratio = zeta[None, :, None] / zeta[:, None, None]  # [l, j]: zeta_j / zeta_l
    other_users = ratio * beta / dof * inv_t_others[:, None, :]
    same_pilot = (ratio * beta / (t[:, None, :] * dof)
                  * (1.0 - t[:, None, :] * beta / own[:, None, :] ** 2))
    IUI = intra + np.sum(off * (other_users + same_pilot), axis=0)
    PC = _pc_terms(beta, own, zeta)
    return CU, IUI, PC


def closed_form_onebit(scenario, *, M=None, P_t=None) -> RateBreakdown:
    """Large-system rates with one-bit ADCs and DACs under ZF.

    ``M`` and ``P_t`` override the scenario's values; ``M`` may be
    non-integer.
    """
    M, P_t = _resolve(scenario, M, P_t)
    c = scenario.constants
    K = c.K
    load = M / K
    st = estimation_stats(scenario)
    zeta = st.zeta
    CU, IUI, PC = _interference_terms(scenario, M, st.t, zeta)
    denom = 2 * K * (load - 1) ** 2
    QN = QUANT_NOISE_VAR * np.pi * M * zeta[:, None] * scenario.beta.sum(axis=0) / denom
    TN = np.broadcast_to(np.pi * M * c.sigma2 * zeta[:, None] / (denom * P_t), CU.shape).copy()
    DS = np.broadcast_to(((P_t / M) * denom / (np.pi * zeta))[:, None], CU.shape).copy()
    return _finish(DS, CU, QN, IUI, PC, TN, "cf-onebit")


def closed_form_fr(scenario, *, M=None, P_t=None) -> RateBreakdown:
    """Large-system rates of the full-resolution baseline under ZF."""
    M, P_t = _resolve(scenario, M, P_t)
    c = scenario.constants
    K = c.K
    st = estimation_stats(scenario)
    zeta = st.zeta_fr
    CU, IUI, PC = _interference_terms(scenario, M, st.t_fr, zeta)
    QN = np.zeros_like(CU)
    TN = np.broadcast_to(c.sigma2 * K * zeta[:, None] / (P_t * (M - K)), CU.shape).copy()
    DS = np.broadcast_to((P_t * (M - K) / (K * zeta))[:, None], CU.shape).copy()
    return _finish(DS, CU, QN, IUI, PC, TN, "cf-fr")


def closed_form(scenario, onebit: bool, **kw) -> RateBreakdown:
    return closed_form_onebit(scenario, **kw) if onebit else closed_form_fr(scenario, **kw)


def asymptotic_rate(scenario) -> RateBreakdown:
    """M -> infinity limit, shared by both architectures: only pilot contamination remains.

    A single cell has no contamination and an infinite limit.
    """
    st = estimation_stats(scenario)
    PC = _pc_terms(scenario.beta, scenario.fading.own, st.zeta_bar)
    zero = np.zeros_like(PC)
    return _finish(np.full_like(PC, np.inf), zero, zero, zero, PC, zero, "asymptotic")


@dataclass(frozen=True)
class DegradationRatios:
    """One-bit over full-resolution ratio of each normalized term, (L, K) arrays."""

    TN: np.ndarray
    CU: np.ndarray
    IUI: np.ndarray
    PC: np.ndarray


def degradation_ratios(scenario, *, M=None) -> DegradationRatios:
    one = closed_form_onebit(scenario, M=M)
    fr = closed_form_fr(scenario, M=M)
    return DegradationRatios(TN=one.TN / fr.TN, CU=one.CU / fr.CU,
                             IUI=one.IUI / fr.IUI, PC=one.PC / fr.PC)


# ---------------------------------------------------------------------------
# Monte-Carlo
# ---------------------------------------------------------------------------

_FIELDS = ("g", "g2", "iui", "qn")


@dataclass(frozen=True)
class MCMoments:
    """Per-batch sums of the P_t-independent quantities behind the rate.

    All powers are for unit transmit power (``eta = unit_eta * P_t``).
    Arrays have a leading batch axis so jackknife errors can be formed.

    g, g2 : (B, L, K)
        Sums of the effective gain ``h_jjk^H A_j w_jk`` and of its squared
        modulus.
    iui : (B, L, K)
        Sums of ``sum_{(l,m) != (j,k)} unit_eta_l |h_ljk^H A_l w_lm|^2``.
    qn : (B, L, K)
        Sums of ``sum_l unit_eta_l |h_ljk^H q_l|^2`` (symbol-averaged or via
        the noise covariance, see ``mc_moments``).
    counts : (B,)
        Trials per batch.
    """

    g: np.ndarray
    g2: np.ndarray
    iui: np.ndarray
    qn: np.ndarray
    counts: np.ndarray
    unit_eta: np.ndarray
    sigma2: float
    mode: str

    def _breakdown(self, sums, n, P_t):
        g, g2, iui, qn = sums
        mean_g = g / n
        var_g = (g2 / n - np.abs(mean_g) ** 2) * n / (n - 1) if n > 1 else np.zeros_like(g2)
        var_g = np.maximum(var_g, 0.0)
        eta = self.unit_eta[:, None] * P_t
        DS = eta * np.abs(mean_g) ** 2
        CU = eta * var_g / DS
        IUI = P_t * iui / n / DS
        QN = P_t * qn / n / DS
        TN = self.sigma2 / DS
        return DS, CU, QN, IUI, TN

    def _totals(self, exclude=None):
        keep = np.ones(len(self.counts), bool)
        if exclude is not None:
            keep[exclude] = False
        sums = tuple(np.sum(getattr(self, f)[keep], axis=0) for f in _FIELDS)
        return sums, float(np.sum(self.counts[keep]))

    def rate_breakdown(self, P_t) -> RateBreakdown:
        sums, n = self._totals()
        DS, CU, QN, IUI, TN = self._breakdown(sums, n, P_t)
        PC = np.full_like(CU, np.nan)
        out = _finish(DS, CU, QN, IUI, PC, TN, self.mode)
        rate_se, pu_se = self._jackknife(P_t)
        return replace(out, rate_se=rate_se, per_user_se=pu_se)

    def _jackknife(self, P_t):
        B = len(self.counts)
        if B < 2:
            return None, None
        reps = []
        for b in range(B):
            sums, n = self._totals(exclude=b)
            DS, CU, QN, IUI, TN = self._breakdown(sums, n, P_t)
            reps.append(np.log2(1.0 + 1.0 / (CU + QN + IUI + TN)))
        reps = np.array(reps)
        dev = reps - reps.mean(axis=0)
        rate_se = np.sqrt((B - 1) / B * np.sum(dev ** 2, axis=0))
        pu = reps.mean(axis=(1, 2))
        pu_se = float(np.sqrt((B - 1) / B * np.sum((pu - pu.mean()) ** 2)))
        return rate_se, pu_se


def _unit_eta(scenario, mode):
    c = scenario.constants
    if mode == "mc-onebit":
        return np.full(c.L, 1.0 / c.M)
    # FR: normalize by the expected precoder power K zeta_fr / (M - K)
    return (c.M - c.K) / (c.K * estimation_stats(scenario).zeta_fr)


def _trial(scenario, mode, trial_rng, symbol_draws, symbols, transmit_gain,
           qn_method, det_gain, unit_eta, max_redraws):
    L, K = scenario.L, scenario.K
    for attempt in range(max_redraws + 1):
        ch = draw_channels(scenario, trial_rng.child(CHANNEL, attempt))
        obs = simulate_uplink_training(scenario, ch, trial_rng.child(PILOT_NOISE, attempt))
        if mode == "mc-onebit":
            est = mmse_estimate_onebit(obs, scenario)
        else:
            est = mmse_estimate_fr(obs, scenario)
        try:
            W = zf_precoder(est.H_hat).W  # (L, M, K)
            break
        except SingularPrecoderError:
            continue
    else:
        raise SingularPrecoderError(f"precoder singular after {max_redraws} redraws")

    H = ch.H
    if mode == "mc-onebit":
        gain = exact_transmit_gain(W) if transmit_gain == "exact" else det_gain[:, None]
    else:
        gain = np.ones((L, 1))
    AW = gain[:, :, None] * W
    Hh = np.conj(np.swapaxes(H, -1, -2))  # [l, j] -> (K, M)
    G = Hh @ AW[:, None]  # [l, j, k, m] = h_ljk^H A_l w_lm
    idx = np.arange(L)
    kk = np.arange(K)
    desired = G[idx, idx][:, kk, kk]  # (L, K)
    P = np.abs(G) ** 2
    iui = np.einsum("l,ljkm->jk", unit_eta, P) - unit_eta[:, None] * np.abs(desired) ** 2

    qn = np.zeros((L, K))
    if mode == "mc-onebit" and qn_method == "covariance":
        # h^H C_qq h with C_qq = (1 - 2/pi) I on the drawn channel
        qn = QUANT_NOISE_VAR * np.einsum("l,ljmk->jk", unit_eta, np.abs(H) ** 2)
    elif mode == "mc-onebit":
        for l in range(L):
            s = draw_symbols(K, symbol_draws, trial_rng.child(SYMBOLS, attempt, l).generator(),
                             symbols)
            frame = quantized_transmit(W[l], s, gain[l] if gain.shape[1] > 1 else gain[l, 0])
            hq = Hh[l] @ frame.q  # (L_j, K, S)
            qn += unit_eta[l] * np.mean(np.abs(hq) ** 2, axis=-1)
    return desired, np.abs(desired) ** 2, iui, qn


def _run_batch(args):
    (scenario, mode, rng, trial_ids, symbol_draws, symbols, transmit_gain,
     qn_method, det_gain, unit_eta, max_redraws) = args
    L, K = scenario.L, scenario.K
    acc = [np.zeros((L, K), complex), np.zeros((L, K)), np.zeros((L, K)), np.zeros((L, K))]
    for trial in trial_ids:
        out = _trial(scenario, mode, rng.child(int(trial)), symbol_draws, symbols,
                     transmit_gain, qn_method, det_gain, unit_eta, max_redraws)
        for a, o in zip(acc, out):
            a += o
    return acc


def mc_moments(scenario, trials, symbol_draws=200, mode="mc-onebit", rng=None, *,
               symbols="gaussian", transmit_gain="deterministic", qn_method="covariance",
               batches=20, parallel=1, max_redraws=10) -> MCMoments:
    """Simulate ``trials`` independent channel/estimation draws.

    Trials are split into ``batches`` fixed contiguous groups summed in trial
    order; groups are combined in group order.  Results therefore do not
    depend on ``parallel`` (number of worker processes).

    ``transmit_gain`` selects the deterministic-equivalent gain (``"deterministic"``)
    or the exact per-realization ``diag(W W^H)`` gain (``"exact"``).

    ``qn_method="covariance"`` evaluates the quantization-noise power as
    ``h^H C_qq h`` with ``C_qq = (1 - 2/pi) I`` on each drawn channel.
    ``"sampled"`` instead pushes ``symbol_draws`` symbol vectors through the
    DACs and measures ``|h^H q|^2`` with ``q = Q(x) - A x``.  The sampled
    distortion is partly aligned with the user's own channel, so it runs
    about 20-35% above the covariance value at M=128, K=8; the symbol
    count is ignored unless ``qn_method="sampled"``.
    """
    if mode not in ("mc-onebit", "mc-fr"):
        raise ValueError(f"Monte-Carlo mode must be mc-onebit or mc-fr, got {mode!r}")
    if trials < 1:
        raise ValueError("need at least one trial")
    if transmit_gain not in ("deterministic", "exact"):
        raise ValueError(f"unknown transmit gain {transmit_gain!r}")
    if qn_method not in ("covariance", "sampled"):
        raise ValueError(f"unknown quantization-noise method {qn_method!r}")
    rng = RngStream(0) if rng is None else rng
    if isinstance(rng, int):
        rng = RngStream(rng)
    c = scenario.constants
    det_gain = transmit_bussgang_gain(estimation_stats(scenario), c)
    unit_eta = _unit_eta(scenario, mode)
    groups = [g for g in np.array_split(np.arange(trials), min(batches, trials)) if len(g)]
    jobs = [(scenario, mode, rng, g, symbol_draws, symbols, transmit_gain, qn_method,
             det_gain, unit_eta, max_redraws) for g in groups]
    if parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as ex:
            results = list(ex.map(_run_batch, jobs))
    else:
        results = [_run_batch(j) for j in jobs]
    stacked = [np.stack([r[i] for r in results]) for i in range(4)]
    return MCMoments(*stacked, counts=np.array([len(g) for g in groups], float),
                     unit_eta=unit_eta, sigma2=c.sigma2, mode=mode)


def mc_rate_breakdown(scenario, trials, symbol_draws=200, mode="mc-onebit", rng=None,
                      **kw) -> RateBreakdown:
    """Monte-Carlo rate breakdown at the scenario's transmit power."""
    return mc_moments(scenario, trials, symbol_draws, mode, rng, **kw).rate_breakdown(
        scenario.constants.P_t)
