"""Rate and energy diagnostics on a single run of the inertial scheme."""

# %%
import numpy as np

from comonotone import AlgoParams, StoppingRule, example2, rate_slope, run, summability_report
from comonotone.diagnostics import discrete_summary, monotone_violations

problem = example2()
params = AlgoParams(alpha=10.0, beta=4.0, gamma=7.0, eta=2.0)
log = run("ins", problem, params, (1.0, 1.0), StoppingRule(target_tol=1e-7))

# %%
# Tail slopes of log||x_n - x_{n-1}|| and log||A_eta(z_n)|| against log n.
# Anything at or below -0.9 is read as consistent with an o(1/n) rate.
for channel in ("diff", "yosida"):
    rep = rate_slope(log, channel)
    print(f"{channel:7s} slope {rep.slope:6.2f} over n in {rep.window}, "
          f"n*r_n at the end {rep.terminal_scaled_residual:.2e}")

# %%
# The weighted sums of squares flatten out: the last 10% of iterations add
# a negligible fraction of the total.
print("flatness:", summability_report(log).flatness)

# %%
# The anchored energy with b = gamma decreases once n exceeds alpha.
bad = monotone_violations(log.energy, log.n, params.alpha, 1e-12)
print("energy increases after n > alpha:", bad.size)
print("energy at n = 11, 50, 200:", log.energy[[10, 49, 199]])

# %%
print({k: v for k, v in discrete_summary(log).items()})
