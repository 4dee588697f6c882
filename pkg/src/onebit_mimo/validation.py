"""Invariant checks behind ``onebit-mimo validate``.

Each check returns a :class:`CheckResult` carrying its measured statistics,
so a report can be printed or serialized without re-running anything.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np

from .channel import CHANNEL, PILOT_NOISE, SYMBOLS, VALIDATION, RngStream, draw_channels
from .estimation import estimation_stats, mmse_estimate_onebit, simulate_uplink_training
from .precoding import draw_symbols, exact_transmit_gain, zf_precoder
from .quantization import QUANT_NOISE_VAR, arcsin_law_covariance, one_bit_quantize
from .rates import closed_form_fr, closed_form_onebit, mc_moments

__all__ = [
    "PASS",
    "FAIL",
    "INSUFFICIENT",
    "CheckResult",
    "check_estimation_identity",
    "check_pilot_contamination_ratio",
    "check_zf_identity",
    "check_bussgang",
    "check_mc_gap",
    "run_suite",
]

PASS, FAIL, INSUFFICIENT = "pass", "fail", "insufficient precision"


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status != FAIL


def check_estimation_identity(scenario, tol=1e-12) -> CheckResult:
    """One-bit estimate variance equals ``2/pi`` times the full-resolution one."""
    st = estimation_stats(scenario)
    err = float(np.max(np.abs(st.t / st.t_fr - 2 / np.pi)))
    return CheckResult("estimate variance ratio 2/pi", PASS if err < tol else FAIL,
                       {"max_abs_error": err, "tol": tol})


def check_pilot_contamination_ratio(scenario, tol=1e-12) -> CheckResult:
    """Pilot contamination is unchanged by one-bit converters."""
    pc1 = closed_form_onebit(scenario).PC
    pc2 = closed_form_fr(scenario).PC
    err = float(np.max(np.abs(pc1 / pc2 - 1.0)))
    return CheckResult("pilot contamination ratio 1", PASS if err < tol else FAIL,
                       {"max_abs_error": err, "tol": tol})


def _onebit_precoder(scenario, rng: RngStream):
    ch = draw_channels(scenario, rng.child(CHANNEL))
    obs = simulate_uplink_training(scenario, ch, rng.child(PILOT_NOISE))
    est = mmse_estimate_onebit(obs, scenario)
    return est.H_hat, zf_precoder(est.H_hat).W


def check_zf_identity(scenario, seed=0, tol=1e-8) -> CheckResult:
    """``H_hat^H W = I_K`` for every cell on one drawn realization."""
    H_hat, W = _onebit_precoder(scenario, RngStream(seed, (VALIDATION, 0)))
    eye = np.eye(scenario.K)
    prod = np.swapaxes(H_hat.conj(), -1, -2) @ W
    err = float(np.max(np.linalg.norm(prod - eye, axis=(-2, -1)) / np.sqrt(scenario.K)))
    return CheckResult("zero-forcing identity", PASS if err < tol else FAIL,
                       {"max_rel_error": err, "tol": tol})


def _real_moments(a, b, c, d):
    """Sums of ``a c^T + b d^T`` and of the entrywise squares of the terms.

    With ``u = a + jb`` and ``v = c + jd`` (rows are variables, columns are
    samples), ``Re(u v^H) = a c^T + b d^T`` and ``Im(u v^H) = b c^T - a d^T``.
    Squared sums expand into plain matrix products, so no
    (variables x variables x samples) tensor is ever formed.
    """
    re = a @ c.T + b @ d.T
    im = b @ c.T - a @ d.T
    cross = (a * b) @ (c * d).T
    re2 = (a * a) @ (c * c).T + 2 * cross + (b * b) @ (d * d).T
    im2 = (b * b) @ (c * c).T - 2 * cross + (a * a) @ (d * d).T
    return re, im, re2, im2


def _zscores(total, total2, n, expected):
    mean = total / n
    var = np.maximum(total2 / n - mean ** 2, 0.0)
    se = np.sqrt(var / n)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, (mean - expected) / se, 0.0)
    return mean, se, z


def check_bussgang(scenario, n_samples=100_000, seed=0, chunk=10_000,
                   family_alpha=1e-3, max_outlier_fraction=0.01) -> CheckResult:
    """Sampled transmit quantization noise against the Bussgang model.

    One ZF precoder is drawn for the scenario (cell 0) and ``n_samples``
    Gaussian symbol vectors are pushed through the one-bit DACs with the
    exact per-antenna gain, ``q = Q(x) - A x``.  Tests, each on entrywise
    z-scores (sample standard errors):

    * the pooled diagonal of ``cov(q)`` matches ``1 - 2/pi`` within 3 SE;
    * ``cov(q)`` matches the arcsin law, and ``E[x q^H]`` is zero.  With
      tens of thousands of entries a handful beyond 3 SE is expected, so each
      family passes when at most ``max_outlier_fraction`` of entries exceed
      3 SE and none exceeds the Bonferroni bound at ``family_alpha``.

    How many off-diagonal entries of ``cov(q)`` are within 3 SE of zero is
    reported but not tested: the arcsin law puts small nonzero correlations
    there.
    """
    rng = RngStream(seed, (VALIDATION, 1))
    _, W = _onebit_precoder(scenario, rng)
    W = W[0]
    M, K = W.shape
    gain = exact_transmit_gain(W)[:, None]
    gen = rng.child(SYMBOLS).generator()

    acc = {k: np.zeros((M, M)) for k in ("qr", "qi", "qr2", "qi2", "xr", "xi", "xr2", "xi2")}
    pooled = pooled2 = 0.0
    done = 0
    while done < n_samples:
        n = min(chunk, n_samples - done)
        x = W @ draw_symbols(K, n, gen)
        q = one_bit_quantize(x) - gain * x
        qa, qb = q.real, q.imag
        for pre, mom in (("q", _real_moments(qa, qb, qa, qb)),
                         ("x", _real_moments(x.real, x.imag, qa, qb))):
            for suffix, val in zip(("r", "i", "r2", "i2"), mom):
                acc[pre + suffix] += val
        p = np.mean(np.abs(q) ** 2, axis=0)
        pooled += p.sum()
        pooled2 += (p * p).sum()
        done += n

    N = float(n_samples)
    C_model = arcsin_law_covariance(W @ W.conj().T)
    _, _, zq_re = _zscores(acc["qr"], acc["qr2"], N, C_model.real)
    _, _, zq_im = _zscores(acc["qi"], acc["qi2"], N, C_model.imag)
    _, _, zx_re = _zscores(acc["xr"], acc["xr2"], N, 0.0)
    _, _, zx_im = _zscores(acc["xi"], acc["xi2"], N, 0.0)
    # imaginary diagonal of cov(q) is identically zero, so it carries no test
    off = ~np.eye(M, dtype=bool)
    zq = np.concatenate([zq_re.ravel(), zq_im[off]])
    zx = np.concatenate([zx_re.ravel(), zx_im.ravel()])

    diag_mean, diag_se, _ = _zscores(pooled, pooled2, N, 0.0)
    diag_z = (diag_mean - QUANT_NOISE_VAR) / diag_se
    diag_mean_e, _, zdiag = _zscores(np.diag(acc["qr"]), np.diag(acc["qr2"]), N, QUANT_NOISE_VAR)
    _, _, z_off0 = _zscores(acc["qr"][off], acc["qr2"][off], N, 0.0)

    def family(z):
        bound = NormalDist().inv_cdf(1 - family_alpha / (2 * z.size))
        frac = float(np.mean(np.abs(z) > 3))
        zmax = float(np.max(np.abs(z)))
        return frac <= max_outlier_fraction and zmax <= bound, frac, zmax, bound

    ok_q, frac_q, max_q, bound_q = family(zq)
    ok_x, frac_x, max_x, bound_x = family(zx)
    ok_d, frac_d, max_d, _ = family(zdiag)
    ok_pool = abs(diag_z) <= 3
    stats = {
        "samples": n_samples,
        "pooled_diag": float(diag_mean),
        "pooled_diag_z": float(diag_z),
        "target_diag": QUANT_NOISE_VAR,
        "diag_max_abs_dev": float(np.max(np.abs(diag_mean_e - QUANT_NOISE_VAR))),
        "diag_frac_beyond_3se": frac_d,
        "diag_max_abs_z": max_d,
        "cov_frac_beyond_3se": frac_q,
        "cov_max_abs_z": max_q,
        "xq_frac_beyond_3se": frac_x,
        "xq_max_abs_z": max_x,
        "bonferroni_bound": bound_q,
        "offdiag_frac_within_3se_of_zero": float(np.mean(np.abs(z_off0) <= 3)),
    }
    ok = ok_pool and ok_d and ok_q and ok_x
    return CheckResult("Bussgang quantization noise", PASS if ok else FAIL, stats)


def check_mc_gap(scenario, trials, *, P_t_db=(-10.0, 0.0, 10.0), seed=0, rel_tol=0.05,
                 min_trials=100, max_rel_se=0.01, parallel=1, **mc_kw) -> CheckResult:
    """Monte-Carlo per-user rate against the closed forms, both modes.

    With fewer than ``min_trials`` trials, or a relative standard error above
    ``max_rel_se`` at any point, the check reports insufficient precision
    instead of a verdict.
    """
    gaps, rel_se = {}, []
    for mode, cf in (("mc-onebit", closed_form_onebit), ("mc-fr", closed_form_fr)):
        mom = mc_moments(scenario, trials, mode=mode, rng=RngStream(seed), parallel=parallel,
                         **mc_kw)
        for p_db in P_t_db:
            P_t = 10 ** (p_db / 10)
            mc = mom.rate_breakdown(P_t)
            ref = cf(scenario, P_t=P_t).per_user
            gaps[f"{mode}@{p_db:g}dB"] = abs(mc.per_user - ref) / ref
            if mc.per_user_se is not None:
                rel_se.append(mc.per_user_se / mc.per_user)
    worst = max(gaps.values())
    worst_se = max(rel_se) if rel_se else float("inf")
    stats = {"trials": trials, "max_rel_gap": worst, "max_rel_se": worst_se, "rel_tol": rel_tol}
    stats.update({f"gap[{k}]": v for k, v in gaps.items()})
    if trials < min_trials or worst_se > max_rel_se:
        status = INSUFFICIENT
    else:
        status = PASS if worst <= rel_tol else FAIL
    return CheckResult("Monte-Carlo vs closed form", status, stats)


def run_suite(scenario, *, trials=2000, seed=0, bussgang_samples=100_000, parallel=1,
              **mc_kw) -> list[CheckResult]:
    """All checks in a fixed order."""
    return [
        check_estimation_identity(scenario),
        check_pilot_contamination_ratio(scenario),
        check_zf_identity(scenario, seed=seed),
        check_bussgang(scenario, n_samples=bussgang_samples, seed=seed),
        check_mc_gap(scenario, trials, seed=seed, parallel=parallel, **mc_kw),
    ]
