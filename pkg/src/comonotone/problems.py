"""Problem instances: the two reference test operators, seeded generators,
and a plain-text problem file format.

Problem file layout (``#`` starts a comment)::

    dim 2
    name example2        # optional
    rho -0.5             # optional, declared modulus
    zero 0 0             # optional, known solution
    -0.4 0.8
    -0.8 -0.4

The matrix follows the header as ``dim`` rows of ``dim`` decimal entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .algorithms import AlgoParams
from .exceptions import ConfigError, InfeasibleTarget
from .operators import DenseLinearOperator, as_vector, comonotone_modulus


@dataclass(frozen=True)
class ProblemInstance:
    name: str
    operator: DenseLinearOperator
    rho: float
    zero: np.ndarray
    recommended_params: AlgoParams | None = None

    @property
    def dim(self):
        return self.operator.dim


EXAMPLE1_MATRIX = (
    (5.7943, -10.8168, 10.7544),
    (-10.8168, 65.5739, -28.2603),
    (10.7544, -28.2603, 35.6622),
)

EXAMPLE2_MATRIX = (
    (-2.0 / 5.0, 4.0 / 5.0),
    (-4.0 / 5.0, -2.0 / 5.0),
)


def _instance(name, matrix, rho, zero, params=None):
    op = DenseLinearOperator(matrix, rho=rho, zero=zero, name=name)
    return ProblemInstance(name, op, op.rho, op.zero, params)


def example1():
    """Symmetric positive semidefinite 3x3 test matrix, treated as monotone."""
    return _instance(
        "example1",
        EXAMPLE1_MATRIX,
        rho=0.0,
        zero=np.zeros(3),
        params=AlgoParams(alpha=15.0, beta=10.0, gamma=10.0, eta=2.0),
    )


def example2():
    """Scaled rotation, maximally (-1/2)-comonotone with unique zero 0."""
    return _instance(
        "example2",
        EXAMPLE2_MATRIX,
        rho=-0.5,
        zero=np.zeros(2),
        params=AlgoParams(alpha=10.0, beta=4.0, gamma=7.0, eta=2.0),
    )


def random_spd(dim, seed):
    """``M^T M`` for a seeded standard normal ``M``; declared monotone."""
    if dim < 1:
        raise ValueError("dim must be positive")
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((dim, dim))
    return _instance(
        f"random_spd(dim={dim},seed={seed})",
        m.T @ m,
        rho=0.0,
        zero=np.zeros(dim),
        params=AlgoParams(alpha=10.0, beta=4.0, gamma=7.0, eta=2.0),
    )


def random_cohypomonotone(dim, rho_target, seed, eta=2.0):
    """Block-diagonal operator with 2x2 blocks ``s*[[-c, d], [-d, -c]]``.

    A block with ``c = cos(phi) > 0``, ``d = sin(phi)`` has modulus ``-c/s``.
    The first block is scaled to reach ``rho_target`` exactly; the others
    get a smaller magnitude modulus, so the minimum over blocks is the target.

    Raises
    ------
    InfeasibleTarget
        If ``rho_target`` is not in ``(-eta/2, 0)``, i.e. the instance could
        not be used with resolvent index ``eta``.
    """
    if dim < 2 or dim % 2:
        raise ValueError("dim must be a positive even integer")
    rho_target = float(rho_target)
    if not (np.isfinite(rho_target) and -eta / 2.0 < rho_target < 0.0):
        raise InfeasibleTarget(
            f"rho_target={rho_target} must lie in (-eta/2, 0) = ({-eta / 2.0}, 0)"
        )
    rng = np.random.default_rng(seed)
    a = np.zeros((dim, dim))
    for k in range(dim // 2):
        phi = rng.uniform(0.15, 0.5) * np.pi
        c, d = np.cos(phi), np.sin(phi)
        rho_k = rho_target if k == 0 else rho_target * rng.uniform(0.3, 1.0)
        s = -c / rho_k
        i = 2 * k
        a[i:i + 2, i:i + 2] = s * np.array([[-c, d], [-d, -c]])
    return _instance(
        f"random_cohypomonotone(dim={dim},rho={rho_target:g},seed={seed})",
        a,
        rho=comonotone_modulus(a),
        zero=np.zeros(dim),
        params=AlgoParams(alpha=10.0, beta=4.0, gamma=7.0, eta=eta),
    )


BUILTIN = {"example1": example1, "example2": example2}


def get_problem(name, seed=0, dim=None, rho=None):
    """Look up a builtin or generated instance by name."""
    if name in BUILTIN:
        return BUILTIN[name]()
    if name == "random_spd":
        return random_spd(dim or 3, seed)
    if name == "random_cohypomonotone":
        return random_cohypomonotone(dim or 2, -0.5 if rho is None else rho, seed)
    raise ConfigError(f"unknown problem {name!r}")


def _fmt(v):
    return repr(float(v))


def dump_problem(problem, path):
    """Write ``problem`` in the text problem format (round-trip precision)."""
    op = problem.operator
    lines = [f"dim {op.dim}", f"name {problem.name}", f"rho {_fmt(problem.rho)}"]
    if problem.zero is not None:
        lines.append("zero " + " ".join(_fmt(v) for v in problem.zero))
    lines += [" ".join(_fmt(v) for v in row) for row in op.matrix]
    Path(path).write_text("\n".join(lines) + "\n")


def load_problem(path):
    """Read a problem file written by :func:`dump_problem` or by hand."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read problem file {path}: {exc}") from exc
    header = {}
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        if key in ("dim", "name", "rho", "zero") and not rows:
            header[key] = rest.strip()
            continue
        try:
            rows.append([float(t) for t in line.split()])
        except ValueError as exc:
            raise ConfigError(f"{path}: bad matrix row {raw!r}") from exc
    if "dim" not in header:
        raise ConfigError(f"{path}: missing 'dim' header")
    dim = int(header["dim"])
    if len(rows) != dim or any(len(r) != dim for r in rows):
        raise ConfigError(f"{path}: expected {dim} rows of {dim} entries")
    rho = float(header["rho"]) if "rho" in header else None
    zero = (
        as_vector([float(t) for t in header["zero"].split()], dim)
        if "zero" in header
        else np.zeros(dim)
    )
    name = header.get("name", path.stem)
    op = DenseLinearOperator(rows, rho=rho, zero=zero, name=name)
    if np.linalg.norm(op.apply(zero)) > 1e-12 * (1.0 + np.abs(op.matrix).max()):
        raise ConfigError(f"{path}: declared zero is not a zero of the matrix")
    return ProblemInstance(name, op, op.rho, op.zero)
