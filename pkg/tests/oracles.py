"""Independent reference implementations used as test oracles.

Written with explicit loops over cells and users, straight from the scalar
formulas, so they share no code with the vectorized library.
"""

import math

import numpy as np


def estimate_variances(beta, K, rho_p):
    """Per-user one-bit and full-resolution estimate variances, dicts keyed (j, k)."""
    L = beta.shape[0]
    t, t_fr = {}, {}
    for j in range(L):
        for k in range(K):
            s = sum(K * rho_p * beta[j, l, k] for l in range(L)) + 1.0
            t_fr[j, k] = beta[j, j, k] ** 2 * rho_p * K / s
            t[j, k] = 2.0 / math.pi * t_fr[j, k]
    return t, t_fr


def sqinr_terms(beta, M, K, P_t, sigma2, rho_p, onebit):
    """(CU, QN, IUI, PC, TN, gamma, rate) per (j, k) for the closed-form rates."""
    L = beta.shape[0]
    t1, tfr = estimate_variances(beta, K, rho_p)
    t = t1 if onebit else tfr
    zeta = [sum(1.0 / t[j, k] for k in range(K)) / K for j in range(L)]
    c = M / K
    out = {}
    for j in range(L):
        for k in range(K):
            cu = (beta[j, j, k] - t[j, k]) / ((M - K) * t[j, k])
            iui = 0.0
            for m in range(K):
                if m != k:
                    iui += (beta[j, j, k] - t[j, k]) / (t[j, m] * (M - K))
            for l in range(L):
                if l == j:
                    continue
                for m in range(K):
                    if m != k:
                        iui += zeta[j] * beta[l, j, k] / (zeta[l] * t[l, m] * (M - K))
                iui += (zeta[j] * beta[l, j, k] / (zeta[l] * t[l, k] * (M - K))
                        * (1 - t[l, k] * beta[l, j, k] / beta[l, l, k] ** 2))
            pc = sum(zeta[j] * beta[l, j, k] ** 2 / (zeta[l] * beta[l, l, k] ** 2)
                     for l in range(L) if l != j)
            if onebit:
                qn = sum((1 - 2 / math.pi) * math.pi * M * beta[l, j, k] * zeta[j]
                         / (2 * K * (c - 1) ** 2) for l in range(L))
                tn = math.pi * M * sigma2 * zeta[j] / (2 * K * P_t * (c - 1) ** 2)
            else:
                qn = 0.0
                tn = sigma2 * K * zeta[j] / (P_t * (M - K))
            g = 1.0 / (cu + qn + iui + pc + tn)
            out[j, k] = (cu, qn, iui, pc, tn, g, math.log2(1 + g))
    return out


def asymptotic_per_user(beta, K, rho_p):
    L = beta.shape[0]
    cj = {(j, k): beta[j, j, k] ** 2 / (sum(K * rho_p * beta[j, l, k] for l in range(L)) + 1)
          for j in range(L) for k in range(K)}
    zb = [sum(1 / cj[j, k] for k in range(K)) for j in range(L)]
    rates = []
    for j in range(L):
        for k in range(K):
            pc = sum(zb[j] * beta[l, j, k] ** 2 / (zb[l] * beta[l, l, k] ** 2)
                     for l in range(L) if l != j)
            rates.append(math.log2(1 + 1 / pc))
    return sum(rates) / len(rates)


def pinv_zf(H):
    """Right pseudo-inverse transpose via SVD: W = U S^-1 V^H."""
    U, s, Vh = np.linalg.svd(H, full_matrices=False)
    return U @ np.diag(1 / s) @ Vh


def four_cell_beta(K=8, radius=250.0, spacing=525.0, alpha=3.0, const=1e-3):
    """beta[j, l, k] for the 2x2 square layout, users at angles 2 pi k / K."""
    bs = [(0.0, 0.0), (spacing, 0.0), (0.0, spacing), (spacing, spacing)]
    beta = np.empty((4, 4, K))
    for j, (bx, by) in enumerate(bs):
        for l, (cx, cy) in enumerate(bs):
            for k in range(K):
                ux = cx + radius * math.cos(2 * math.pi * k / K)
                uy = cy + radius * math.sin(2 * math.pi * k / K)
                beta[j, l, k] = const / math.hypot(ux - bx, uy - by) ** alpha
    return beta
