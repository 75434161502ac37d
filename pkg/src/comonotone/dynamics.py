"""Continuous-time inertial systems, integrated in first-order form.

The Yosida-driven system with vanishing damping,

    x'' + (alpha/t) x' + (beta/t) A_eta(x + (t/gamma) x') = 0,

becomes ``x' = y``, ``y' = -(alpha/t) y - (beta/t) A_eta(x + (t/gamma) y)``.
The comparison system with constant damping,

    x'' + alpha x' + A(x + gamma x') = 0,

applies ``A`` itself (or optionally ``A_eta``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatch, Divergence, NonpositiveTime
from .diagnostics import continuous_energy
from .ode import dopri5
from .operators import as_vector


@dataclass(frozen=True)
class OdeState:
    x: np.ndarray
    y: np.ndarray


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration window, tolerances and the log-spaced sample grid."""

    t0: float = 0.1
    t_end: float = 100.0
    rel_tol: float = 1e-6
    abs_tol: float = 1e-9
    max_step: float = np.inf
    sample_count: int = 500

    def __post_init__(self):
        if not self.t0 > 0:
            raise NonpositiveTime("t0 must be positive: the field is singular at t = 0")
        if not self.t_end > self.t0:
            raise ValueError("t_end must exceed t0")
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.max_step > 0):
            raise ValueError("tolerances and max_step must be positive")
        if self.sample_count < 2:
            raise ValueError("sample_count must be at least 2")

    def grid(self):
        g = np.geomspace(self.t0, self.t_end, self.sample_count)
        g[0], g[-1] = self.t0, self.t_end
        return g


def field_ds(t, state, params, op):
    """Right-hand side of the Yosida-driven system; one Yosida evaluation."""
    if t <= 0:
        raise NonpositiveTime(f"field evaluated at t={t}")
    x, y = state.x, state.y
    yz = op.yosida(params.eta, x + (t / params.gamma) * y)
    return OdeState(y, -(params.alpha / t) * y - (params.beta / t) * yz)


def field_damped(t, state, alpha, gamma, op, eta=None):
    """Right-hand side of the constant-damping comparison system.

    ``A`` is applied directly; pass ``eta`` to use ``A_eta`` instead, which
    is required when ``A`` itself is not monotone.
    """
    x, y = state.x, state.y
    if x.shape != y.shape or x.size != op.dim:
        raise DimensionMismatch("state does not match the operator dimension")
    w = x + gamma * y
    force = op.apply(w) if eta is None else op.yosida(eta, w)
    return OdeState(y, -alpha * y - force)


@dataclass
class Trajectory:
    """Samples of an integrated trajectory on a log-spaced time grid.

    ``residual`` holds the operator term driving the system at each sample:
    ``A_eta(x + (t/gamma) x')`` for the Yosida system, ``A(x + gamma x')``
    for the comparison system.  ``energy`` is the anchored energy with
    ``b = gamma`` (NaN when not defined).
    """

    t: np.ndarray
    x: np.ndarray
    xdot: np.ndarray
    residual: np.ndarray
    energy: np.ndarray
    x_star: np.ndarray | None
    accepted_steps: int
    rejected_steps: int
    evaluations: int

    @property
    def err(self):
        if self.x_star is None:
            return np.full(self.t.size, np.nan)
        return np.linalg.norm(self.x - self.x_star, axis=1)

    @property
    def xdot_norm(self):
        return np.linalg.norm(self.xdot, axis=1)

    @property
    def yosida(self):
        return np.linalg.norm(self.residual, axis=1)

    @property
    def t_xdot(self):
        return self.t * self.xdot_norm

    @property
    def t_yosida(self):
        return self.t * self.yosida

    def at(self, t):
        """Index of the sample closest to time ``t``."""
        return int(np.argmin(np.abs(self.t - t)))


def integrate(field, z0, config, channels=None, x_star=None):
    """Integrate ``field(t, OdeState) -> OdeState`` from ``z0``.

    ``channels(t, x, xdot) -> (residual_vector, energy)`` fills the
    diagnostic columns; without it they are NaN.
    """
    x0 = as_vector(z0.x)
    v0 = as_vector(z0.y, x0.size)
    d = x0.size

    def f(t, u):
        s = field(t, OdeState(u[:d], u[d:]))
        return np.concatenate([s.x, s.y])

    sol = dopri5(
        f, config.t0, np.concatenate([x0, v0]), config.t_end, config.grid(),
        rtol=config.rel_tol, atol=config.abs_tol, max_step=config.max_step,
    )
    if not np.all(np.isfinite(sol.y)):
        raise Divergence("trajectory left the finite range")
    xs, vs = sol.y[:, :d], sol.y[:, d:]
    residual = np.full_like(xs, np.nan)
    energy = np.full(sol.t.size, np.nan)
    if channels is not None:
        for i, (t, x, v) in enumerate(zip(sol.t, xs, vs)):
            residual[i], energy[i] = channels(t, x, v)
    return Trajectory(
        t=sol.t, x=xs, xdot=vs, residual=residual, energy=energy,
        x_star=None if x_star is None else as_vector(x_star, d),
        accepted_steps=sol.accepted_steps, rejected_steps=sol.rejected_steps,
        evaluations=sol.evaluations,
    )


def _zero_of(problem):
    op = getattr(problem, "operator", problem)
    z = getattr(problem, "zero", None)
    return op, (getattr(op, "zero", None) if z is None else z)


def integrate_ds(problem, params, x0, v0, config=None):
    """Trajectory of the Yosida-driven system with energy ``eps_gamma``."""
    config = config or IntegratorConfig()
    op, x_star = _zero_of(problem)
    b = params.gamma
    with_energy = x_star is not None and 0.0 <= b <= params.alpha - 1.0

    def channels(t, x, v):
        r = op.yosida(params.eta, x + (t / params.gamma) * v)
        e = continuous_energy(b, x_star, t, x, v, params.alpha) if with_energy else np.nan
        return r, e

    return integrate(
        lambda t, s: field_ds(t, s, params, op),
        OdeState(as_vector(x0, op.dim), as_vector(v0, op.dim)),
        config, channels, x_star,
    )


def integrate_damped(problem, alpha, gamma, x0, v0, config=None, eta=None):
    """Trajectory of the constant-damping comparison system."""
    config = config or IntegratorConfig()
    op, x_star = _zero_of(problem)

    def channels(t, x, v):
        w = x + gamma * v
        return (op.apply(w) if eta is None else op.yosida(eta, w)), np.nan

    return integrate(
        lambda t, s: field_damped(t, s, alpha, gamma, op, eta),
        OdeState(as_vector(x0, op.dim), as_vector(v0, op.dim)),
        config, channels, x_star,
    )
