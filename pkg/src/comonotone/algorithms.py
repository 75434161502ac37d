"""Discrete inertial and anchored schemes for ``0 in A(x)``.

Four methods share one driver, :func:`run`:

``ins``
    The implicit Newton-like inertial scheme::

        y_n     = x_n + (1 - alpha/n) (x_n - x_{n-1})
        z_n     = x_n + (n/gamma) (x_n - x_{n-1})
        x_{n+1} = y_n - (beta/n) A_eta(z_n)

``ipa``
    The inertial baseline evaluated at resolvent index ``eta + 1``::

        y_k     = x_k + (1 - alpha/k)(x_k - x_{k-1}) + (1 - beta/k)(y_{k-1} - x_k)
        x_{k+1} = (1 - 1/(eta+1)) y_k + 1/(eta+1) J_{eta+1} y_k

``hppa``
    Halpern-type proximal point ``x_{n+1} = a_n mu + (1 - a_n) J_c x_n``,
    ``a_n = 1/(n+1)``, constant index ``c``.

``ohm``
    Optimized Halpern ``x_{n+1} = b_n w0 + (1 - b_n) T x_n``, ``b_n = 1/(n+1)``,
    with ``T = Id + (J_eta - Id)/theta`` and
    ``theta = max(eta / (2 (rho + eta)), 1/2)``.  ``T`` is nonexpansive
    because ``J_eta`` is ``theta``-averaged; for monotone ``A`` it is the
    reflected resolvent ``2 J_eta - Id``.

Every method evaluates exactly one resolvent per iteration.  Each logged row
``n`` holds quantities at index ``n`` (``x_n``, ``||x_n - x_{n-1}||``, the
residual computed from that iteration's resolvent), so the stopping rule is
checked on a row before the next iterate is formed.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .exceptions import Divergence
from .operators import DenseLinearOperator, as_vector

METHODS = ("ins", "ipa", "hppa", "ohm")

DEFAULT_MAX_ITER = 10**6


@dataclass(frozen=True)
class AlgoParams:
    """Parameters ``(alpha, beta, gamma, eta)`` of the inertial schemes.

    ``ipa`` ignores ``gamma``; ``hppa`` uses ``eta`` as its constant
    resolvent index; ``ohm`` uses only ``eta``.
    """

    alpha: float
    beta: float
    gamma: float
    eta: float


@dataclass(frozen=True)
class Condition:
    name: str
    lhs: float
    rhs: float

    @property
    def margin(self):
        return self.lhs - self.rhs

    @property
    def ok(self):
        return self.lhs > self.rhs


@dataclass
class ValidationReport:
    conditions: list

    @property
    def ok(self):
        return all(c.ok for c in self.conditions)

    def failed(self):
        return [c.name for c in self.conditions if not c.ok]

    def __str__(self):
        width = max(len(c.name) for c in self.conditions)
        lines = [
            f"{c.name:<{width}}  {c.lhs:>12.6g} > {c.rhs:<12.6g} "
            f"margin {c.margin:+.6g}  {'PASS' if c.ok else 'FAIL'}"
            for c in self.conditions
        ]
        return "\n".join(lines)


def validate_params(params, rho):
    """Check the convergence hypotheses of the ``ins`` scheme against ``rho``.

    The conditions are ``eta > max(-2 rho, 0)``, ``alpha > gamma + 2``,
    ``gamma > beta / (2 (rho + eta))``, ``beta > 0`` and ``gamma > 0``.
    """
    p = params
    shift = rho + p.eta
    gamma_floor = p.beta / (2.0 * shift) if shift > 0 else np.inf
    return ValidationReport([
        Condition("eta > max(-2*rho, 0)", p.eta, max(-2.0 * rho, 0.0)),
        Condition("alpha > gamma + 2", p.alpha, p.gamma + 2.0),
        Condition("gamma > beta/(2*(rho+eta))", p.gamma, gamma_floor),
        Condition("beta > 0", p.beta, 0.0),
        Condition("gamma > 0", p.gamma, 0.0),
    ])


@dataclass(frozen=True)
class IterState:
    """``x_{n-1}``, ``x_n`` at index ``n``; ``y_prev`` is ``y_{n-1}`` (``ipa`` only)."""

    n: int
    x_prev: np.ndarray
    x_cur: np.ndarray
    y_prev: np.ndarray | None = None


def initial_state(x0, x_prev=None, n=1, with_y=False):
    x0 = as_vector(x0)
    xp = x0.copy() if x_prev is None else as_vector(x_prev, x0.size)
    return IterState(n, xp, x0, x0.copy() if with_y else None)


# -- ins ------------------------------------------------------------------

def _ins_probe(state, params, op):
    d = state.x_cur - state.x_prev
    z = state.x_cur + (state.n / params.gamma) * d
    return d, op.yosida(params.eta, z)


def _ins_advance(state, params, d, yz):
    n = state.n
    x_next = state.x_cur + (1.0 - params.alpha / n) * d - (params.beta / n) * yz
    return IterState(n + 1, state.x_cur, x_next)


def step_ins(state, params, op):
    """Advance the ``ins`` scheme from index ``n`` to ``n + 1``."""
    d, yz = _ins_probe(state, params, op)
    return _ins_advance(state, params, d, yz)


# -- ipa ------------------------------------------------------------------

def _ipa_probe(state, params, op):
    k = state.n
    x = state.x_cur
    y = x + (1.0 - params.alpha / k) * (x - state.x_prev) + (1.0 - params.beta / k) * (state.y_prev - x)
    return y, op.resolvent(params.eta + 1.0, y)


def _ipa_advance(state, params, y, jy):
    w = 1.0 / (params.eta + 1.0)
    return IterState(state.n + 1, state.x_cur, (1.0 - w) * y + w * jy, y)


def step_ipa(state, params, op):
    """Advance the ``ipa`` baseline; ``state.y_prev`` must be set."""
    if state.y_prev is None:
        raise ValueError("ipa iteration needs y_prev in the state")
    y, jy = _ipa_probe(state, params, op)
    return _ipa_advance(state, params, y, jy)


# -- Halpern-type ---------------------------------------------------------

def step_hppa(x, anchor, gamma_n, n, op):
    """``x_{n+1} = a_n anchor + (1 - a_n) J_{gamma_n} x_n`` with ``a_n = 1/(n+1)``."""
    a = 1.0 / (n + 1)
    return a * anchor + (1.0 - a) * op.resolvent(gamma_n, x)


def ohm_theta(eta, rho):
    return max(eta / (2.0 * (rho + eta)), 0.5)


def _ohm_map(x, jx, theta):
    return x + (jx - x) / theta


def step_ohm(x, anchor, n, eta, op):
    """``x_{n+1} = b_n anchor + (1 - b_n) T x_n`` with ``b_n = 1/(n+1)``."""
    b = 1.0 / (n + 1)
    x = as_vector(x, op.dim)
    return b * anchor + (1.0 - b) * _ohm_map(x, op.resolvent(eta, x), ohm_theta(eta, op.rho))


# -- driver ---------------------------------------------------------------

@dataclass(frozen=True)
class StoppingRule:
    """First rule to fire wins; ``max_iter`` bounds the number of logged rows.

    ``target_tol`` stops on ``||x_n - x*|| <= tol`` (needs a known zero),
    ``residual_tol`` on the method's Yosida residual channel.
    """

    target_tol: float | None = None
    residual_tol: float | None = None
    max_iter: int = DEFAULT_MAX_ITER

    @classmethod
    def default(cls, zero_known, max_iter=DEFAULT_MAX_ITER):
        if zero_known:
            return cls(target_tol=1e-7, max_iter=max_iter)
        return cls(residual_tol=1e-9, max_iter=max_iter)


@dataclass
class IterateLog:
    """Per-iteration channels of one run, indexed by ``n``.

    ``yosida`` is the residual produced by the iteration's own resolvent
    call: ``||A_eta(z_n)||`` for ``ins``, ``||A_{eta+1}(y_n)||`` for ``ipa``
    and ``||A_c(x_n)||`` for the Halpern methods.  ``yosida_jump[i]`` is the
    distance between consecutive residual vectors (NaN on the last row).
    ``energy`` and ``omega_norm`` are filled for ``ins`` only.
    """

    method: str
    params: AlgoParams
    n: np.ndarray
    err: np.ndarray
    diff: np.ndarray
    yosida: np.ndarray
    yosida_jump: np.ndarray
    energy: np.ndarray
    omega_norm: np.ndarray
    x_final: np.ndarray
    stop_reason: str
    evaluations: int
    iterates: np.ndarray | None = None
    params_ok: bool = True
    warnings: list = field(default_factory=list)

    def __len__(self):
        return self.n.size

    @property
    def n_diff(self):
        return self.n * self.diff

    @property
    def n_yosida(self):
        return self.n * self.yosida

    @property
    def iterations(self):
        return int(self.n[-1]) if self.n.size else 0


def _energy(b, x_star, n, x, x_prev, alpha):
    d = x - x_prev
    e = x - x_star
    v = b * e + (n - alpha) * d
    return 0.5 * (v @ v) + 0.5 * b * (alpha - 1.0 - b) * (e @ e) + 0.5 * (2.0 * alpha - 1.0 - b) * n * (d @ d)


class _Recorder:
    def __init__(self, x_star, store_iterates):
        self.x_star = x_star
        self.store = store_iterates
        self.rows = {k: [] for k in ("n", "err", "diff", "yosida", "jump", "energy", "omega")}
        self.iterates = []
        self.last_res = None

    def add(self, n, x, d, res_vec, energy=np.nan, omega=np.nan):
        r = self.rows
        if self.last_res is not None:
            r["jump"].append(float(np.linalg.norm(res_vec - self.last_res)))
        self.last_res = res_vec
        r["n"].append(n)
        r["err"].append(np.nan if self.x_star is None else float(np.linalg.norm(x - self.x_star)))
        r["diff"].append(float(np.linalg.norm(d)))
        r["yosida"].append(float(np.linalg.norm(res_vec)))
        r["energy"].append(energy)
        r["omega"].append(omega)
        if self.store:
            self.iterates.append(x.copy())
        if not np.all(np.isfinite(x)) or not np.isfinite(r["yosida"][-1]):
            raise Divergence(f"non-finite iterate at n={n}")

    def arrays(self):
        r = self.rows
        jump = np.array(r["jump"] + [np.nan])
        out = {
            "n": np.array(r["n"], dtype=np.int64),
            "err": np.array(r["err"]),
            "diff": np.array(r["diff"]),
            "yosida": np.array(r["yosida"]),
            "yosida_jump": jump,
            "energy": np.array(r["energy"]),
            "omega_norm": np.array(r["omega"]),
        }
        out["iterates"] = np.array(self.iterates) if self.store else None
        return out


def _stop(rule, err, res, rows):
    if rule.target_tol is not None and err <= rule.target_tol:
        return "target-tol"
    if rule.residual_tol is not None and res <= rule.residual_tol:
        return "residual-tol"
    if rows >= rule.max_iter:
        return "max-iter"
    return None


def _run_python(method, op, params, x0, rule, x_star, anchor, store_iterates):
    rec = _Recorder(x_star, store_iterates)
    p = params
    b = p.gamma
    energy_ok = x_star is not None and 0.0 <= b <= p.alpha - 1.0
    state = initial_state(x0, with_y=(method == "ipa"))
    theta = ohm_theta(p.eta, op.rho) if method == "ohm" else None
    rows = 0
    while True:
        n, x = state.n, state.x_cur
        d = x - state.x_prev
        if method == "ins":
            d, yz = _ins_probe(state, p, op)
            energy = _energy(b, x_star, n, x, state.x_prev, p.alpha) if energy_ok else np.nan
            omega = float(np.linalg.norm((p.alpha - 1.0 - p.gamma) * d + p.beta * yz))
            rec.add(n, x, d, yz, energy, omega)
            advance = lambda: _ins_advance(state, p, d, yz)  # noqa: E731
        elif method == "ipa":
            y, jy = _ipa_probe(state, p, op)
            rec.add(n, x, d, (y - jy) / (p.eta + 1.0))
            advance = lambda: _ipa_advance(state, p, y, jy)  # noqa: E731
        elif method in ("hppa", "ohm"):
            jx = op.resolvent(p.eta, x)
            rec.add(n, x, d, (x - jx) / p.eta)
            a = 1.0 / (n + 1)
            target = jx if method == "hppa" else _ohm_map(x, jx, theta)
            advance = lambda: IterState(n + 1, x, a * anchor + (1.0 - a) * target)  # noqa: E731
        else:
            raise ValueError(f"unknown method {method!r}")
        rows += 1
        reason = _stop(rule, rec.rows["err"][-1], rec.rows["yosida"][-1], rows)
        if reason:
            return rec.arrays(), x.copy(), reason, rows
        state = advance()


def run(method, problem, params, x0, stopping=None, anchor=None, store_iterates=True,
        fast=True):
    """Iterate ``method`` on ``problem`` from ``x_1 = x_0 = x0``.

    Parameters
    ----------
    method : {"ins", "ipa", "hppa", "ohm"}
    problem : ProblemInstance or operator
        Anything with ``resolvent``/``yosida``/``rho``/``dim``; a
        ``ProblemInstance`` also supplies the known zero.
    params : AlgoParams
    x0 : array_like
        Starting point; ``x_{-1}``, ``x_0`` (and ``y_0`` for ``ipa``) are set
        equal to it.  The Halpern anchor defaults to ``x0`` as well.
    stopping : StoppingRule, optional
        Defaults to :meth:`StoppingRule.default`.
    store_iterates : bool
        Keep every ``x_n`` in ``log.iterates``.
    fast : bool
        Use the compiled loop for plain :class:`DenseLinearOperator`
        problems.  Results agree with the reference loop to rounding.

    Returns
    -------
    IterateLog

    Raises
    ------
    Divergence
        If an iterate becomes non-finite.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    op = getattr(problem, "operator", problem)
    x_star = getattr(problem, "zero", None)
    if x_star is None:
        x_star = getattr(op, "zero", None)
    x0 = as_vector(x0, op.dim)
    anchor = x0.copy() if anchor is None else as_vector(anchor, op.dim)
    if stopping is None:
        stopping = StoppingRule.default(x_star is not None)
    if stopping.target_tol is not None and x_star is None:
        raise ValueError("target-distance stopping needs a known zero")
    if stopping.max_iter < 1:
        raise ValueError("max_iter must be at least 1")

    notes = []
    report = validate_params(params, op.rho)
    if method == "ins" and not report.ok:
        msg = "parameters violate: " + ", ".join(report.failed())
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append(msg)

    if fast and type(op) is DenseLinearOperator:
        from ._kernels import run_dense

        channels, x_final, reason, rows = run_dense(
            method, op, params, x0, stopping, x_star, anchor, store_iterates
        )
    else:
        channels, x_final, reason, rows = _run_python(
            method, op, params, x0, stopping, x_star, anchor, store_iterates
        )
    return IterateLog(
        method=method,
        params=params,
        x_final=x_final,
        stop_reason=reason,
        evaluations=rows,
        params_ok=report.ok,
        warnings=notes,
        **channels,
    )
