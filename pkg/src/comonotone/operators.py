"""Comonotone operators accessed through their resolvent.

Every algorithm in the package touches an operator ``A`` only through the
resolvent ``J = (I + eta*A)^{-1}`` and the Yosida regularization
``A_eta = (I - J)/eta``.  A new operator kind only has to provide
``resolvent(eta, x)``; :class:`DenseLinearOperator` is the shipped kind.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .exceptions import (
    DimensionMismatch,
    InadmissibleIndex,
    SingularOperator,
    SingularSystem,
)

#: Mixed absolute/relative tolerance used by the property checks.
PROPERTY_TOL = 1e-10

# I + eta*A with a larger condition number is treated as singular.
_MAX_CONDITION = 1e12


def as_vector(x, dim=None):
    """Return ``x`` as a finite 1-D float64 array, checking its length."""
    v = np.array(x, dtype=float, copy=True).reshape(-1)
    if v.size == 0:
        raise DimensionMismatch("empty vector")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite coordinates")
    if dim is not None and v.size != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {v.size}")
    return v


def as_matrix(a):
    m = np.array(a, dtype=float, copy=True)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def admissible_eta(eta, rho):
    """True when ``eta > max(-2*rho, 0)``."""
    return eta > max(-2.0 * rho, 0.0)


class DenseLinearOperator:
    """A maximally comonotone operator ``x -> M x`` given by a dense matrix.

    Parameters
    ----------
    matrix : array_like, shape (d, d)
        The linear map.
    rho : float, optional
        Declared comonotonicity modulus.  Defaults to the exact modulus
        :func:`comonotone_modulus` of ``matrix`` (which requires it to be
        invertible).
    zero : array_like, optional
        A known element of ``zer A``.

    Notes
    -----
    Instances are immutable.  LU factors of ``I + eta*M`` are cached per
    ``eta``; the cache is guarded by a lock so concurrent readers are safe.
    """

    kind = "dense-linear"

    def __init__(self, matrix, rho=None, zero=None, name=None):
        m = as_matrix(matrix)
        m.setflags(write=False)
        self._matrix = m
        self.name = name
        self.rho = float(comonotone_modulus(m) if rho is None else rho)
        if zero is not None:
            zero = as_vector(zero, self.dim)
            zero.setflags(write=False)
        self.zero = zero
        self._factors = {}
        self._lock = threading.Lock()

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<DenseLinearOperator{label} dim={self.dim} rho={self.rho:g}>"

    @property
    def matrix(self):
        return self._matrix

    @property
    def dim(self):
        return self._matrix.shape[0]

    def apply(self, x):
        """Evaluate ``A x`` directly."""
        return self._matrix @ as_vector(x, self.dim)

    def factor(self, eta):
        """LU factors ``(lu, piv)`` of ``I + eta*A`` (cached per ``eta``)."""
        eta = float(eta)
        f = self._factors.get(eta)
        if f is not None:
            return f
        if not eta > 0.0:
            raise ValueError(f"resolvent index must be positive, got {eta}")
        if not admissible_eta(eta, self.rho):
            raise InadmissibleIndex(
                f"eta={eta} violates eta > max(-2*rho, 0) with rho={self.rho}"
            )
        system = np.eye(self.dim) + eta * self._matrix
        if np.linalg.cond(system) > _MAX_CONDITION:
            raise SingularSystem(f"I + {eta}*A is numerically singular")
        lu, piv = scipy.linalg.lu_factor(system, check_finite=False)
        lu.setflags(write=False)
        piv.setflags(write=False)
        with self._lock:
            f = self._factors.setdefault(eta, (lu, piv))
        return f

    def resolvent(self, eta, x):
        x = as_vector(x, self.dim)
        return scipy.linalg.lu_solve(self.factor(eta), x, check_finite=False)

    def yosida(self, eta, x):
        x = as_vector(x, self.dim)
        return (x - self.resolvent(eta, x)) / eta


class CountingOperator:
    """Proxy that counts resolvent evaluations of a wrapped operator.

    A Yosida evaluation is one resolvent evaluation plus vector arithmetic,
    so ``counts["resolvent"]`` is the total number of linear solves.
    """

    def __init__(self, op):
        self.op = op
        self.counts = {"resolvent": 0, "yosida": 0}

    def __getattr__(self, name):
        return getattr(self.op, name)

    def resolvent(self, eta, x):
        self.counts["resolvent"] += 1
        return self.op.resolvent(eta, x)

    def yosida(self, eta, x):
        self.counts["yosida"] += 1
        x = as_vector(x, self.op.dim)
        return (x - self.resolvent(eta, x)) / eta


@dataclass(frozen=True)
class ResolventResult:
    point: np.ndarray
    eta: float


def resolvent(op, eta, x):
    """Solve ``(I + eta*A) v = x`` and return ``J_eta x`` wrapped with ``eta``."""
    return ResolventResult(point=op.resolvent(eta, x), eta=float(eta))


def yosida(op, eta, x):
    """Yosida regularization ``A_eta x = (x - J_eta x) / eta``."""
    return op.yosida(eta, x)


def reflected_resolvent(op, eta, x):
    return 2.0 * op.resolvent(eta, x) - as_vector(x, op.dim)


def comonotone_modulus(matrix):
    """Largest ``rho`` such that the linear map is ``rho``-comonotone.

    For linear ``A`` the modulus is ``min <x, Ax> / ||Ax||^2`` over ``x != 0``,
    the smallest eigenvalue of the symmetric-definite pencil
    ``(sym(A), A^T A)``.

    Raises
    ------
    SingularOperator
        If ``A`` is not invertible (the infimum is then unbounded or the
        pencil is not definite).
    """
    a = as_matrix(matrix)
    s = scipy.linalg.svdvals(a)
    if s[-1] <= s[0] * a.shape[0] * np.finfo(float).eps * 16 or s[0] == 0.0:
        raise SingularOperator("comonotonicity modulus requires an invertible map")
    sym = 0.5 * (a + a.T)
    gram = a.T @ a
    return float(scipy.linalg.eigh(sym, gram, eigvals_only=True)[0])


@dataclass
class PropertyReport:
    """Outcome of a sampled operator-calculus check.

    ``violations`` holds ``(sample_index, condition, lhs, rhs)`` tuples; an
    empty list means every sampled pair satisfied every condition.
    """

    name: str
    eta: float
    rho: float
    samples: int
    violations: list = field(default_factory=list)
    worst_margin: float = np.inf

    @property
    def ok(self):
        return not self.violations

    def __str__(self):
        status = "ok" if self.ok else f"{len(self.violations)} violations"
        return (
            f"{self.name}: eta={self.eta:g} rho={self.rho:g} "
            f"samples={self.samples} worst_margin={self.worst_margin:.3e} [{status}]"
        )


def _sample_pairs(dim, sample_count, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((sample_count, dim)), rng.standard_normal((sample_count, dim))


def _require_admissible(op, eta):
    if not admissible_eta(eta, op.rho):
        raise InadmissibleIndex(f"eta={eta} violates eta > max(-2*rho, 0) with rho={op.rho}")


def check_cocoercivity(op, eta, sample_count=1000, seed=0, tol=PROPERTY_TOL):
    """Sample ``<x-y, A_eta x - A_eta y> >= (rho+eta) ||A_eta x - A_eta y||^2``."""
    _require_admissible(op, eta)
    rep = PropertyReport("cocoercivity", eta, op.rho, sample_count)
    xs, ys = _sample_pairs(op.dim, sample_count, seed)
    c = op.rho + eta
    for i, (x, y) in enumerate(zip(xs, ys)):
        d = x - y
        g = op.yosida(eta, x) - op.yosida(eta, y)
        lhs = float(d @ g)
        rhs = c * float(g @ g)
        margin = lhs - rhs + tol * (1.0 + d @ d)
        rep.worst_margin = min(rep.worst_margin, margin)
        if margin < 0:
            rep.violations.append((i, "cocoercive", lhs, rhs))
    return rep


def averaging_constant(eta, rho):
    """``theta = eta / (2 (rho + eta))`` for which ``J_eta`` is averaged."""
    return eta / (2.0 * (rho + eta))


def check_averaged(op, eta, sample_count=1000, seed=0, tol=PROPERTY_TOL):
    """Sample averagedness and nonexpansiveness of ``J_eta`` and the Lipschitz
    bound ``1/(rho+eta)`` of ``A_eta``."""
    _require_admissible(op, eta)
    theta = averaging_constant(eta, op.rho)
    if not 0.0 < theta < 1.0:
        raise InadmissibleIndex(f"averaging constant {theta} outside (0, 1)")
    rep = PropertyReport("averaged", eta, op.rho, sample_count)
    lip = 1.0 / (op.rho + eta)
    xs, ys = _sample_pairs(op.dim, sample_count, seed)
    for i, (x, y) in enumerate(zip(xs, ys)):
        d = x - y
        dd = float(d @ d)
        jd = op.resolvent(eta, x) - op.resolvent(eta, y)
        rd = d - jd
        scale = tol * (1.0 + dd)
        checks = (
            ("averaged", (1.0 - theta) * float(rd @ rd), theta * (dd - float(jd @ jd))),
            ("nonexpansive", float(np.linalg.norm(jd)), float(np.sqrt(dd))),
            ("lipschitz", float(np.linalg.norm(rd)) / eta, lip * float(np.sqrt(dd))),
        )
        for cond, lhs, rhs in checks:
            margin = rhs - lhs + scale
            rep.worst_margin = min(rep.worst_margin, margin)
            if margin < 0:
                rep.violations.append((i, cond, lhs, rhs))
    return rep


def check_graph_identity(op, eta, x):
    """Return ``||A_eta x - A(J_eta x)||``; zero up to rounding when
    ``(J_eta x, A_eta x)`` lies on the graph of ``A``."""
    x = as_vector(x, op.dim)
    jx = op.resolvent(eta, x)
    return float(np.linalg.norm((x - jx) / eta - op.apply(jx)))


def check_graph_samples(op, eta, sample_count=1000, seed=0, tol=PROPERTY_TOL):
    """Graph identity over seeded normal samples, as a report."""
    rep = PropertyReport("graph-identity", eta, op.rho, sample_count)
    xs, _ = _sample_pairs(op.dim, sample_count, seed)
    for i, x in enumerate(xs):
        gap = check_graph_identity(op, eta, x)
        bound = tol * (1.0 + float(np.linalg.norm(x)))
        rep.worst_margin = min(rep.worst_margin, bound - gap)
        if gap > bound:
            rep.violations.append((i, "graph", gap, bound))
    return rep


def property_suite(op, eta, sample_count=1000, seed=0):
    """Run every sampled check at ``(op.rho, eta)``; returns a list of reports."""
    return [
        check_cocoercivity(op, eta, sample_count, seed),
        check_averaged(op, eta, sample_count, seed),
        check_graph_samples(op, eta, sample_count, seed),
    ]
