"""
What the one-bit DAC does to a ZF signal
========================================

The precoded signal ``x = W s`` is quantized to the four points
(+-1 +-j)/sqrt(2).  The Bussgang decomposition writes the output as
``A x + q`` with ``q`` uncorrelated to ``x``.  Here we look at that split on
one drawn channel.
"""

# %%
import numpy as np

from onebit_mimo import build_scenario, config_from_dict
from onebit_mimo.channel import RngStream, draw_channels
from onebit_mimo.estimation import estimation_stats, mmse_estimate_onebit, simulate_uplink_training
from onebit_mimo.precoding import (
    draw_symbols,
    exact_transmit_gain,
    quantized_transmit,
    transmit_bussgang_gain,
    zf_precoder,
)
from onebit_mimo.quantization import QUANT_NOISE_VAR

sc = build_scenario(config_from_dict({}), P_t=10.0)
rng = RngStream(1)
ch = draw_channels(sc, rng.child(0))
est = mmse_estimate_onebit(simulate_uplink_training(sc, ch, rng.child(1)), sc)
W = zf_precoder(est.H_hat).W[0]

# %%
# Exact per-antenna gains vs the deterministic equivalent used by the
# closed forms.
A_exact = exact_transmit_gain(W)
A_det = transmit_bussgang_gain(estimation_stats(sc), sc.constants)[0]
ratio = A_exact / A_det
print(f"exact / deterministic gain: {ratio.min():.3f} .. {ratio.max():.3f}")

# %%
s = draw_symbols(sc.K, 50_000, np.random.default_rng(0))
f = quantized_transmit(W, s, A_exact, P_t=sc.constants.P_t)
print(f"mean |q_m|^2 = {np.mean(np.abs(f.q) ** 2):.4f} (model {QUANT_NOISE_VAR:.4f})")
cross = np.abs(f.x @ f.q.conj().T) / s.shape[1]
scale = np.sqrt(np.mean(np.abs(f.x) ** 2, axis=1)[:, None] * np.mean(np.abs(f.q) ** 2, axis=1)[None])
print(f"largest |corr(x_m, q_n)| = {np.max(cross / scale):.4f}")

# %%
# The distortion is not spatially white: part of it lands on the users'
# own channels, which is why a symbol-sampled simulation sits below the
# closed-form rate.
h = ch.H[0, 0]  # BS 0 to its own users
on_user = np.mean(np.abs(h.conj().T @ f.q) ** 2, axis=1) / np.sum(np.abs(h) ** 2, axis=0)
print("quantization noise seen by each user, relative to white:", np.round(on_user / QUANT_NOISE_VAR, 2))
