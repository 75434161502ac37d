"""Experiment configuration files.

INI-style key/value text, one flat section per concern::

    [experiment]
    problem = example2          ; builtin name, generator name, or problem file
    methods = ins, ipa, hppa, ohm
    x0 = 1, 1
    seed = 0
    out = results

    [stopping]
    rule = target               ; target | residual | max-iter
    tol = 1e-7
    max_iter = 1000000

    [ins]
    alpha = 10
    beta = 4
    gamma = 7
    eta = 2

Method sections are optional; missing keys fall back to the problem's
recommended parameters.  ``ode-ds`` and ``ode-damped`` sections additionally
accept ``t0``, ``t_end``, ``rel_tol``, ``abs_tol``, ``max_step``,
``samples`` and ``v0`` (``ode-damped`` reads ``eta`` only to switch to the
Yosida regularization).
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algorithms import DEFAULT_MAX_ITER, METHODS, AlgoParams, StoppingRule
from .dynamics import IntegratorConfig
from .exceptions import ConfigError
from .problems import get_problem, load_problem

ODE_METHODS = ("ode-ds", "ode-damped")
ALL_METHODS = METHODS + ODE_METHODS

ENV_OUT = "COMONOTONE_OUT"
ENV_SEED = "COMONOTONE_SEED"

_FALLBACK = AlgoParams(alpha=10.0, beta=4.0, gamma=7.0, eta=2.0)


@dataclass
class MethodSpec:
    name: str
    params: AlgoParams
    integrator: IntegratorConfig | None = None
    v0: np.ndarray | None = None
    yosida_eta: float | None = None


@dataclass
class ExperimentConfig:
    problem: object
    problem_ref: str
    methods: list
    x0: np.ndarray
    stopping: StoppingRule
    out: Path
    seed: int
    raw: dict = field(default_factory=dict)


def _floats(text, what):
    try:
        return np.array([float(t) for t in text.replace(",", " ").split()])
    except ValueError as exc:
        raise ConfigError(f"{what}: cannot parse {text!r} as numbers") from exc


def _get_float(section, key, default):
    if section is None or key not in section:
        return default
    try:
        return float(section[key])
    except ValueError as exc:
        raise ConfigError(f"[{section.name}] {key}: not a number: {section[key]!r}") from exc


def _resolve_problem(exp, seed, base):
    ref = exp.get("problem", "").strip()
    if not ref:
        raise ConfigError("[experiment] problem is required")
    dim = exp.get("dim")
    rho = exp.get("rho")
    try:
        dim = None if dim is None else int(dim)
        rho = None if rho is None else float(rho)
    except ValueError as exc:
        raise ConfigError(f"bad generator argument: {exc}") from exc
    path = Path(ref)
    if not path.is_absolute():
        path = base / path
    if path.is_file():
        return load_problem(path)
    try:
        return get_problem(ref, seed=seed, dim=dim, rho=rho)
    except ConfigError:
        raise
    except Exception as exc:  # generator argument errors
        raise ConfigError(f"cannot build problem {ref!r}: {exc}") from exc


def _method_spec(name, cp, problem):
    sec = cp[name] if cp.has_section(name) else None
    base = problem.recommended_params or _FALLBACK
    params = AlgoParams(
        alpha=_get_float(sec, "alpha", base.alpha),
        beta=_get_float(sec, "beta", base.beta),
        gamma=_get_float(sec, "gamma", base.gamma),
        eta=_get_float(sec, "eta", base.eta),
    )
    spec = MethodSpec(name, params)
    if name in ODE_METHODS:
        defaults = IntegratorConfig()
        try:
            spec.integrator = IntegratorConfig(
                t0=_get_float(sec, "t0", defaults.t0),
                t_end=_get_float(sec, "t_end", defaults.t_end),
                rel_tol=_get_float(sec, "rel_tol", defaults.rel_tol),
                abs_tol=_get_float(sec, "abs_tol", defaults.abs_tol),
                max_step=_get_float(sec, "max_step", defaults.max_step),
                sample_count=int(_get_float(sec, "samples", defaults.sample_count)),
            )
        except ValueError as exc:
            raise ConfigError(f"[{name}] {exc}") from exc
        if sec is not None and "v0" in sec:
            spec.v0 = _floats(sec["v0"], f"[{name}] v0")
        if name == "ode-damped" and sec is not None and "eta" in sec:
            spec.yosida_eta = params.eta
    return spec


def load_config(path, out=None, seed=None, max_iter=None, tol=None):
    """Parse an experiment file; keyword arguments override file values.

    Precedence for ``out`` and ``seed``: argument, then the environment
    variables ``COMONOTONE_OUT`` / ``COMONOTONE_SEED``, then the file.
    """
    path = Path(path)
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not cp.has_section("experiment"):
        raise ConfigError("config needs an [experiment] section")
    exp = cp["experiment"]

    if seed is None and os.environ.get(ENV_SEED):
        seed = os.environ[ENV_SEED]
    try:
        seed = int(exp.get("seed", "0") if seed is None else seed)
    except ValueError as exc:
        raise ConfigError(f"seed must be an integer: {exc}") from exc
    if out is None:
        out = os.environ.get(ENV_OUT) or exp.get("out", "results")

    problem = _resolve_problem(exp, seed, path.parent)

    names = [m.strip() for m in exp.get("methods", "ins").split(",") if m.strip()]
    unknown = [m for m in names if m not in ALL_METHODS]
    if unknown or not names:
        raise ConfigError(f"unknown methods {unknown}; choose from {ALL_METHODS}")
    methods = [_method_spec(m, cp, problem) for m in names]

    x0 = _floats(exp.get("x0", ""), "[experiment] x0") if "x0" in exp else np.ones(problem.dim)
    if x0.size != problem.dim:
        raise ConfigError(f"x0 has dimension {x0.size}, problem has {problem.dim}")
    for m in methods:
        if m.v0 is None:
            m.v0 = np.ones(problem.dim)
        if m.v0.size != problem.dim:
            raise ConfigError(f"[{m.name}] v0 has the wrong dimension")

    stop = cp["stopping"] if cp.has_section("stopping") else {}
    rule = stop.get("rule", "target" if problem.zero is not None else "residual").strip()
    try:
        limit = int(float(stop.get("max_iter", DEFAULT_MAX_ITER)) if max_iter is None else max_iter)
        tol_value = float(stop.get("tol", "nan") if tol is None else tol)
    except ValueError as exc:
        raise ConfigError(f"[stopping] {exc}") from exc
    if limit < 1:
        raise ConfigError("max_iter must be positive")
    if rule == "target":
        if problem.zero is None:
            raise ConfigError("target rule needs a problem with a known zero")
        stopping = StoppingRule(target_tol=1e-7 if np.isnan(tol_value) else tol_value, max_iter=limit)
    elif rule == "residual":
        stopping = StoppingRule(residual_tol=1e-9 if np.isnan(tol_value) else tol_value, max_iter=limit)
    elif rule == "max-iter":
        stopping = StoppingRule(max_iter=limit)
    else:
        raise ConfigError(f"unknown stopping rule {rule!r}")

    raw = {s: dict(cp[s]) for s in cp.sections()}
    return ExperimentConfig(
        problem=problem,
        problem_ref=exp["problem"],
        methods=methods,
        x0=x0,
        stopping=stopping,
        out=Path(out),
        seed=seed,
        raw=raw,
    )

