"""
How many more antennas does a one-bit BS need?
==============================================

kappa = M_one / M_conv is the antenna ratio at which the one-bit network
matches the full-resolution one.  At low power it sits near pi^2/4; at high
power it grows for small arrays and falls back for very large ones.
"""

# %%
from onebit_mimo import build_scenario, config_from_dict, kappa_search, low_snr_kappa
from onebit_mimo.analysis import rate_crossing

sc = build_scenario(config_from_dict({}))

print(f"low-SNR limit pi^2/4 = {low_snr_kappa():.4f}\n")
print(f"{'M_conv':>9} {'-30 dB':>8} {'0 dB':>8} {'20 dB':>8}")
for m in (100, 1_000, 10_000, 100_000, 1_000_000):
    row = [kappa_search(sc, m, P_t=10 ** (p / 10)).kappa for p in (-30, 0, 20)]
    print(f"{m:9d} " + " ".join(f"{k:8.3f}" for k in row))

# %%
# Equal-rate matching at 128 antennas and 10 dB, solved exactly.
r = kappa_search(sc, 128, 0.0, P_t=10.0, criterion="root")
print(f"\nM_conv=128 at 10 dB needs M_one = {r.M_one:.1f} (kappa {r.kappa:.2f})")

# %%
# Antennas needed for 3 bits/s/Hz per user.
print(f"3 bits/s/Hz: one-bit {rate_crossing(sc, 3.0, True, P_t=10.0):.0f}, "
      f"full resolution {rate_crossing(sc, 3.0, False, P_t=10.0):.0f} antennas")
