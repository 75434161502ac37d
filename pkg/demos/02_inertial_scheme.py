"""The inertial Yosida scheme against three baselines.

All four methods start from x_1 = x_0 = (1, 1) and stop once
||x_n - x*|| <= 1e-7.  The Halpern baselines converge like 1/n, so they
need millions of iterations; the compiled loop keeps this to seconds.
"""

# %%
import time

from comonotone import AlgoParams, StoppingRule, example2, run, validate_params

problem = example2()
params = AlgoParams(alpha=10.0, beta=4.0, gamma=7.0, eta=2.0)

# %%
# The convergence hypotheses, with margins.
print(validate_params(params, problem.rho))

# %%
rule = StoppingRule(target_tol=1e-7, max_iter=10**8)
for method in ("ins", "ipa", "ohm", "hppa"):
    t0 = time.perf_counter()
    log = run(method, problem, params, (1.0, 1.0), rule, store_iterates=False)
    print(f"{method:5s} {log.iterations:>10d} iterations  "
          f"final err {log.err[-1]:.2e}  {time.perf_counter() - t0:.2f}s")

# %%
# Breaking alpha > gamma + 2 still runs but the log carries a warning.
import warnings

with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    log = run("ins", problem, AlgoParams(9.0, 4.0, 7.0, 2.0), (1.0, 1.0), rule)
print("params_ok:", log.params_ok, "|", caught[0].message)
