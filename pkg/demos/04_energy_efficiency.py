"""
Energy efficiency versus sampling frequency
===========================================

At equal sum rate the one-bit BS needs about 3.8x the antennas, but each of
its DACs burns 512x less power than a 10-bit one.  Past some sampling rate
the converter power dominates and the one-bit design wins.
"""

# %%
import numpy as np

from onebit_mimo import PowerModel, build_scenario, config_from_dict, ee_sweep

sc = build_scenario(config_from_dict({}), P_t=10.0)
fs = np.arange(20, 401, 40) * 1e6
res = ee_sweep(sc, fs)

print(f"M_one={res.M_one}, M_conv={res.M_conv}, crossover at {res.crossover_fs / 1e6:.1f} MHz\n")
print(f"{'f_s [MHz]':>9} {'EE one-bit':>11} {'EE 10-bit':>10}")
for f, a, b in zip(fs, res.ee_onebit, res.ee_fr):
    print(f"{f / 1e6:9.0f} {a:11.4f} {b:10.4f}")

# %%
# Per-chain power at 100 MHz.
for bits in (1, 10):
    pm = PowerModel(f_s=100e6, bits=bits)
    print(f"{bits:2d}-bit: DAC {pm.P_DAC * 1e3:.4f} mW, chain {(2 * pm.P_DAC + pm.P_RF) * 1e3:.2f} mW")
