"""
Rates versus transmit power
===========================

Four cells, 128 antennas and 8 users per cell.  We compare the closed-form
per-user rate of the one-bit network with the full-resolution one, then check
both against a short Monte-Carlo run.
"""

# %%
import numpy as np

from onebit_mimo import build_scenario, closed_form_fr, closed_form_onebit, config_from_dict
from onebit_mimo.rates import mc_moments

cfg = config_from_dict({})
sc = build_scenario(cfg)
pt_db = np.arange(-30, 21, 5)

# %%
# The closed forms are cheap, so the whole grid is evaluated directly.
one = [closed_form_onebit(sc, P_t=10 ** (p / 10)).per_user for p in pt_db]
fr = [closed_form_fr(sc, P_t=10 ** (p / 10)).per_user for p in pt_db]

# %%
# The simulated moments do not depend on P_t, so one run covers every point.
mom_one = mc_moments(sc, 300, mode="mc-onebit", rng=0)
mom_fr = mc_moments(sc, 300, mode="mc-fr", rng=0)

print(f"{'P_t [dB]':>8} {'one-bit':>8} {'MC':>8} {'FR':>8} {'MC':>8}")
for p, a, b in zip(pt_db, one, fr):
    P = 10 ** (p / 10)
    print(f"{p:8d} {a:8.4f} {mom_one.rate_breakdown(P).per_user:8.4f} "
          f"{b:8.4f} {mom_fr.rate_breakdown(P).per_user:8.4f}")

# %%
# Both curves flatten at high power: thermal noise vanishes and the
# remaining terms do not scale with P_t.
r = closed_form_onebit(sc, P_t=10.0)
print("\nterm breakdown for user (0, 0) at 10 dB:")
for name in ("CU", "QN", "IUI", "PC", "TN"):
    print(f"  {name:>3} = {getattr(r, name)[0, 0]:.4f}")
