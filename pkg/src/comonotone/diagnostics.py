"""Lyapunov energies, rate estimates and summability checks.

The ``o(1/n)`` and ``o(1/t)`` statements are not testable at finite horizon.
They are read here as two symptoms: a small scaled terminal residual
``n ||r_n||`` and a tail log-log slope of at most ``-1 + 0.1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import BOutOfRange, InsufficientData
from .operators import as_vector

SLOPE_CONTRACT = -0.9


def _check_b(b, alpha):
    if not 0.0 <= b <= alpha - 1.0:
        raise BOutOfRange(f"b={b} outside [0, alpha-1] = [0, {alpha - 1.0}]")


def discrete_energy(b, x_star, n, x_n, x_prev, alpha):
    r"""Discrete energy

    .. math::
        \tfrac12\|b(x_n - x^*) + (n-\alpha)(x_n - x_{n-1})\|^2
        + \tfrac{b(\alpha-1-b)}{2}\|x_n - x^*\|^2
        + \tfrac{2\alpha-1-b}{2}\, n\, \|x_n - x_{n-1}\|^2
    """
    _check_b(b, alpha)
    x_n = as_vector(x_n)
    e = x_n - as_vector(x_star, x_n.size)
    d = x_n - as_vector(x_prev, x_n.size)
    v = b * e + (n - alpha) * d
    return float(
        0.5 * (v @ v)
        + 0.5 * b * (alpha - 1.0 - b) * (e @ e)
        + 0.5 * (2.0 * alpha - 1.0 - b) * n * (d @ d)
    )


def continuous_energy(b, x_star, t, x, xdot, alpha):
    r"""Continuous energy
    :math:`\tfrac12\|b(x - x^*) + t\dot x\|^2 + \tfrac{b(\alpha-1-b)}{2}\|x - x^*\|^2`."""
    _check_b(b, alpha)
    if t <= 0:
        raise ValueError("time must be positive")
    x = as_vector(x)
    e = x - as_vector(x_star, x.size)
    v = b * e + t * as_vector(xdot, x.size)
    return float(0.5 * (v @ v) + 0.5 * b * (alpha - 1.0 - b) * (e @ e))


def omega(n, x_n, x_prev, params, op, z_n=None):
    """Correction vector ``(alpha-1-gamma)(x_n - x_{n-1}) + beta A_eta(z_n)``.

    ``z_n`` defaults to the ``ins`` extrapolation ``x_n + (n/gamma)(x_n - x_{n-1})``.
    """
    x_n = as_vector(x_n, op.dim)
    d = x_n - as_vector(x_prev, op.dim)
    if z_n is None:
        z_n = x_n + (n / params.gamma) * d
    return (params.alpha - 1.0 - params.gamma) * d + params.beta * op.yosida(params.eta, z_n)


@dataclass(frozen=True)
class EnergyRecord:
    index_or_time: float
    eps_b: float
    b: float
    omega_norm: float | None = None


def discrete_energy_records(log, x_star, b=None):
    """Energy ``eps_{b,n}`` along a log that kept its iterates.

    ``b`` defaults to ``gamma``.  Row ``n`` pairs ``x_n`` with ``x_{n-1}``
    (``x_0 = x_1`` at the first row).
    """
    if log.iterates is None:
        raise InsufficientData("log was recorded without iterates")
    p = log.params
    b = p.gamma if b is None else b
    xs = log.iterates
    prev = np.vstack([xs[:1], xs[:-1]])
    return [
        EnergyRecord(float(n), discrete_energy(b, x_star, int(n), x, xp, p.alpha), b, float(w))
        for n, x, xp, w in zip(log.n, xs, prev, log.omega_norm)
    ]


def monotone_violations(values, index, start_after, rtol):
    """Indices ``i`` (with ``index[i] > start_after``) where
    ``values[i+1] > values[i] + rtol*(1 + |values[i]|)``."""
    v = np.asarray(values, dtype=float)
    idx = np.asarray(index, dtype=float)
    inc = v[1:] - v[:-1] - rtol * (1.0 + np.abs(v[:-1]))
    mask = (idx[:-1] > start_after) & (inc > 0)
    return np.nonzero(mask)[0]


@dataclass(frozen=True)
class RateReport:
    slope: float
    window: tuple
    terminal_scaled_residual: float
    points: int

    def conforms(self, contract=SLOPE_CONTRACT):
        return self.slope <= contract


def fit_rate(index, residual, window_fraction=0.5, min_points=20):
    """Least-squares slope of ``log residual`` against ``log index``.

    The window is the last ``window_fraction`` of the index range measured
    on a log scale.  Non-positive residuals are dropped.
    """
    index = np.asarray(index, dtype=float)
    residual = np.asarray(residual, dtype=float)
    if index.size == 0:
        raise InsufficientData("empty series")
    if not 0.0 < window_fraction <= 1.0:
        raise ValueError("window_fraction must lie in (0, 1]")
    lo, hi = np.log(index[0]), np.log(index[-1])
    start = np.exp(hi - window_fraction * (hi - lo))
    sel = (index >= start) & (residual > 0) & np.isfinite(residual)
    if sel.sum() < min_points:
        raise InsufficientData(f"{sel.sum()} usable points in tail window, need {min_points}")
    slope = np.polyfit(np.log(index[sel]), np.log(residual[sel]), 1)[0]
    return RateReport(
        slope=float(slope),
        window=(float(index[sel][0]), float(index[sel][-1])),
        terminal_scaled_residual=float(index[-1] * residual[-1]),
        points=int(sel.sum()),
    )


_CHANNELS = {
    "diff": ("n", "diff"),
    "yosida": ("n", "yosida"),
    "xdot": ("t", "xdot_norm"),
}


def rate_slope(log, channel="diff", window_fraction=0.5):
    """Tail rate of a discrete log or a continuous trajectory.

    ``channel`` is ``"diff"`` (``||x_n - x_{n-1}||`` or ``||xdot(t)||``) or
    ``"yosida"``.
    """
    if channel not in ("diff", "yosida"):
        raise ValueError(f"unknown channel {channel!r}")
    if hasattr(log, "t"):
        index = log.t
        residual = log.xdot_norm if channel == "diff" else log.yosida
    else:
        index = log.n
        residual = log.diff if channel == "diff" else log.yosida
    return fit_rate(index, residual, window_fraction)


@dataclass(frozen=True)
class SummabilityReport:
    """Partial sums of ``n||x_n - x_{n-1}||^2``, ``n||A_eta(z_n)||^2`` and
    ``n^2||A_eta(z_n) - A_eta(z_{n+1})||^2`` with their tail flatness."""

    diff_sums: np.ndarray
    yosida_sums: np.ndarray
    jump_sums: np.ndarray
    flatness: dict

    @property
    def max_flatness(self):
        return max(self.flatness.values())


def _flatness(sums, tail_fraction):
    if sums.size == 0 or sums[-1] == 0.0:
        return 0.0
    k = int(np.floor((1.0 - tail_fraction) * (sums.size - 1)))
    return float((sums[-1] - sums[k]) / sums[-1])


def summability_report(log, tail_fraction=0.1):
    n = np.asarray(log.n, dtype=float)
    jump = np.nan_to_num(np.asarray(log.yosida_jump, dtype=float), nan=0.0)
    sums = {
        "diff": np.cumsum(n * np.asarray(log.diff) ** 2),
        "yosida": np.cumsum(n * np.asarray(log.yosida) ** 2),
        "jump": np.cumsum(n**2 * jump**2),
    }
    return SummabilityReport(
        diff_sums=sums["diff"],
        yosida_sums=sums["yosida"],
        jump_sums=sums["jump"],
        flatness={k: _flatness(v, tail_fraction) for k, v in sums.items()},
    )


def discrete_summary(log, window_fraction=0.5):
    """Theorem-conclusion quantities of an ``ins`` run, keyed by name."""
    alpha = log.params.alpha
    last = -1
    out = {
        "iterations": log.iterations,
        "stop_reason": log.stop_reason,
        "terminal_n_diff": float(log.n_diff[last]),
        "terminal_n_yosida": float(log.n_yosida[last]),
        "slope_diff": rate_slope(log, "diff", window_fraction).slope,
        "slope_yosida": rate_slope(log, "yosida", window_fraction).slope,
        "max_flatness": summability_report(log).max_flatness,
        "terminal_n2_omega2": float(log.n[last] ** 2 * log.omega_norm[last] ** 2),
        "energy_violations": int(
            monotone_violations(log.energy, log.n, alpha, 1e-12).size
        ),
    }
    return out
