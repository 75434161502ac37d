"""Plot data for the four reference experiments.

Each builder returns ``{filename: (columns, data)}`` ready for
:func:`comonotone.io.write_table`.  ``lg_*`` columns are base-10 logs of
the matching raw channel.  Nothing here draws; the CSVs are the product.
"""

from __future__ import annotations

import numpy as np

from .algorithms import AlgoParams, StoppingRule, run
from .dynamics import IntegratorConfig, integrate_damped, integrate_ds
from .exceptions import UnknownFigure
from .io import lg
from .problems import example1, example2

EX1_PARAMS = AlgoParams(alpha=15.0, beta=10.0, gamma=10.0, eta=2.0)
EX1_X0 = (1.0, -10.0, -20.0)
EX1_V0 = (1.0, 1.0, 1.0)

EX2_ODE_PARAMS = AlgoParams(alpha=5.0, beta=2.0, gamma=2.5, eta=2.0)
EX2_X0 = (10.0, -10.0)
EX2_V0 = (1.0, 1.0)

EX2_ALGO = {
    "ins": AlgoParams(alpha=10.0, beta=4.0, gamma=7.0, eta=2.0),
    "ipa": AlgoParams(alpha=10.0, beta=4.0, gamma=7.0, eta=2.0),
    "hppa": AlgoParams(alpha=10.0, beta=4.0, gamma=7.0, eta=2.0),
    "ohm": AlgoParams(alpha=10.0, beta=4.0, gamma=7.0, eta=2.0),
}
EX2_START = (1.0, 1.0)
FIG4_TOL = 1e-7
# the Halpern baselines converge like 1/n and need ~1.3e7 iterations
FIG4_MAX_ITER = 10**8

INTERVAL = IntegratorConfig(t0=0.1, t_end=100.0)


def decimate(n, dense_until=1000, sparse_points=2000):
    """Row mask keeping every row up to ``dense_until`` and about
    ``sparse_points`` log-spaced rows after it, plus the last row."""
    n = np.asarray(n)
    keep = n <= dense_until
    if n.size and n[-1] > dense_until:
        grid = np.unique(np.geomspace(dense_until, n[-1], sparse_points).astype(np.int64))
        keep |= np.isin(n, grid)
        keep[-1] = True
    return keep


def _rates_table(traj):
    return {
        "t": traj.t,
        "err": traj.err, "lg_err": lg(traj.err),
        "xdot_norm": traj.xdot_norm, "lg_xdot": lg(traj.xdot_norm),
        "yosida": traj.yosida, "lg_yosida": lg(traj.yosida),
    }


def fig1(config=INTERVAL):
    """Log-errors of the Yosida system and the comparison system on example 1."""
    p = example1()
    ds = integrate_ds(p, EX1_PARAMS, EX1_X0, EX1_V0, config)
    ad = integrate_damped(p, EX1_PARAMS.alpha, EX1_PARAMS.gamma, EX1_X0, EX1_V0, config)
    cols_ds = ("t", "err", "lg_err", "xdot_norm", "lg_xdot", "yosida", "lg_yosida")
    cols_ad = ("t", "err", "lg_err", "residual", "lg_residual")
    return {
        "fig1_ds.csv": (cols_ds, _rates_table(ds)),
        "fig1_damped.csv": (cols_ad, {
            "t": ad.t, "err": ad.err, "lg_err": lg(ad.err),
            "residual": ad.yosida, "lg_residual": lg(ad.yosida),
        }),
    }


def _components(traj, prefix, values):
    return {f"{prefix}{i + 1}": values[:, i] for i in range(values.shape[1])}


def fig2(config=INTERVAL):
    """Trajectory components of both systems on example 1."""
    p = example1()
    out = {}
    for tag, traj in (
        ("ds", integrate_ds(p, EX1_PARAMS, EX1_X0, EX1_V0, config)),
        ("damped", integrate_damped(p, EX1_PARAMS.alpha, EX1_PARAMS.gamma, EX1_X0, EX1_V0, config)),
    ):
        data = {"t": traj.t, **_components(traj, "x", traj.x)}
        out[f"fig2_{tag}.csv"] = (tuple(data), data)
    return out


def fig3(config=INTERVAL):
    """Components of x, x' and the Yosida term of the system on example 2."""
    traj = integrate_ds(example2(), EX2_ODE_PARAMS, EX2_X0, EX2_V0, config)
    data = {
        "t": traj.t,
        **_components(traj, "x", traj.x),
        **_components(traj, "xdot", traj.xdot),
        **_components(traj, "yosida", traj.residual),
        "err": traj.err, "lg_err": lg(traj.err),
    }
    return {"fig3_ds.csv": (tuple(data), data)}


def fig4_logs(max_iter=FIG4_MAX_ITER):
    p = example2()
    rule = StoppingRule(target_tol=FIG4_TOL, max_iter=max_iter)
    return {
        m: run(m, p, prm, EX2_START, rule, store_iterates=False)
        for m, prm in EX2_ALGO.items()
    }


def fig4(max_iter=FIG4_MAX_ITER):
    """``lg ||x_n - x*||`` for the four discrete methods on example 2."""
    out = {}
    for m, log in fig4_logs(max_iter).items():
        keep = decimate(log.n)
        data = {"n": log.n[keep], "err": log.err[keep], "lg_err": lg(log.err[keep])}
        out[f"fig4_{m}.csv"] = (("n", "err", "lg_err"), data)
    return out


FIGURES = {"fig1": fig1, "fig2": fig2, "fig3": fig3, "fig4": fig4}


def figure_data(name):
    try:
        builder = FIGURES[name]
    except KeyError:
        raise UnknownFigure(f"unknown figure {name!r}; choose from {sorted(FIGURES)}") from None
    return builder()
