"""The continuous-time system behind the scheme, and a comparison system.

    x'' + (alpha/t) x' + (beta/t) A_eta(x + (t/gamma) x') = 0

is integrated on [0.1, 100] with an adaptive Dormand-Prince 5(4) method.
"""

# %%
import numpy as np

from comonotone import AlgoParams, IntegratorConfig, example1, example2, integrate_damped, integrate_ds

cfg = IntegratorConfig(t0=0.1, t_end=100.0)

# %%
# Monotone 3x3 example: the vanishing-damping system against constant damping.
p1 = example1()
ds = integrate_ds(p1, AlgoParams(15.0, 10.0, 10.0, 2.0), (1.0, -10.0, -20.0), (1.0, 1.0, 1.0), cfg)
ad = integrate_damped(p1, 15.0, 10.0, (1.0, -10.0, -20.0), (1.0, 1.0, 1.0), cfg)
for t in (1.0, 10.0, 100.0):
    print(f"t={t:6.1f}  ds err {ds.err[ds.at(t)]:.3e}   comparison err {ad.err[ad.at(t)]:.3e}")

# %%
# Cohypomonotone example: t||x'|| and t||A_eta(...)|| shrink, the energy decays.
p2 = example2()
tr = integrate_ds(p2, AlgoParams(5.0, 2.0, 2.5, 2.0), (10.0, -10.0), (1.0, 1.0), cfg)
for t in (10.0, 100.0):
    i = tr.at(t)
    print(f"t={tr.t[i]:6.1f}  t|x'|={tr.t_xdot[i]:.3e}  t|A|={tr.t_yosida[i]:.3e}  "
          f"err={tr.err[i]:.3e}  energy={tr.energy[i]:.3e}")
print("energy nonincreasing:", bool(np.all(np.diff(tr.energy) <= 1e-9 * (1 + np.abs(tr.energy[:-1])))))
print(f"{tr.accepted_steps} accepted / {tr.rejected_steps} rejected steps")
