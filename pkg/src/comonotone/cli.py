"""Command-line harness: ``comonotone run | check | reproduce``.

Exit codes: 0 success, 1 failed check, 2 configuration error, 3 numerical
failure.  Diagnostics go to standard error; nothing is written when the
configuration is rejected.
"""

from __future__ import annotations

import argparse
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .algorithms import METHODS, AlgoParams, run, validate_params
from .config import load_config
from .dynamics import integrate_damped, integrate_ds
from .exceptions import (
    ComonotoneError, ConfigError, Divergence, InadmissibleIndex, SingularSystem,
    StepSizeUnderflow, UnknownFigure,
)
from .figures import FIGURES, figure_data
from .io import write_log, write_manifest, write_table, write_trajectory
from .operators import admissible_eta, property_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
NUMERIC_ERRORS = (Divergence, StepSizeUnderflow, SingularSystem)


def _err(msg):
    print(f"comonotone: {msg}", file=sys.stderr)


def _validate(cfg):
    """Reject configurations that would fail before any file is touched."""
    rho = cfg.problem.rho
    for m in cfg.methods:
        eta = m.params.eta
        if m.name == "ode-damped" and m.yosida_eta is None:
            continue
        if not admissible_eta(eta, rho):
            raise ConfigError(f"[{m.name}] eta={eta} not admissible for rho={rho}: need eta > max(-2 rho, 0)")
        if m.name == "ipa" and not admissible_eta(eta + 1.0, rho):
            raise ConfigError(f"[ipa] eta+1={eta + 1.0} not admissible for rho={rho}")


def _run_method(m, cfg):
    p = cfg.problem
    if m.name in METHODS:
        log = run(m.name, p, m.params, cfg.x0, cfg.stopping, store_iterates=False)
        return log, {"stop_reason": log.stop_reason, "rows": len(log),
                     "params_ok": log.params_ok, "final_err": float(log.err[-1])}
    if m.name == "ode-ds":
        traj = integrate_ds(p, m.params, cfg.x0, m.v0, m.integrator)
    else:
        traj = integrate_damped(p, m.params.alpha, m.params.gamma, cfg.x0, m.v0,
                              m.integrator, eta=m.yosida_eta)
    return traj, {"stop_reason": "t_end", "rows": traj.t.size,
                  "accepted_steps": traj.accepted_steps,
                  "rejected_steps": traj.rejected_steps}


def cmd_run(args):
    try:
        cfg = load_config(args.config, out=args.out, seed=args.seed,
                          max_iter=args.max_iter, tol=args.tol)
        _validate(cfg)
    except ComonotoneError as exc:
        _err(f"config error: {exc}")
        return EXIT_CONFIG

    stem = Path(cfg.problem_ref).stem
    results = {}
    started = time.perf_counter()
    try:
        for m in cfg.methods:
            t0 = time.perf_counter()
            result, info = _run_method(m, cfg)
            info["wall_time_s"] = round(time.perf_counter() - t0, 6)
            results[m.name] = (result, info)
    except NUMERIC_ERRORS as exc:
        _err(f"numerical failure: {type(exc).__name__}: {exc}")
        return EXIT_NUMERIC

    cfg.out.mkdir(parents=True, exist_ok=True)
    for name, (result, info) in results.items():
        path = cfg.out / f"{stem}_{name}.csv"
        if name in METHODS:
            write_log(path, result)
        else:
            write_trajectory(path, result)
        info["file"] = path.name
        print(f"{name:9s} {info['stop_reason']:13s} rows={info['rows']:<9d} -> {path}")

    sections = {
        "run": {
            "version": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "config": Path(args.config).resolve(),
            "seed": cfg.seed,
            "wall_time_s": round(time.perf_counter() - started, 6),
        },
    }
    for s, items in cfg.raw.items():
        sections[f"config.{s}"] = items
    for name, (_, info) in results.items():
        sections[f"result.{name}"] = info
    write_manifest(cfg.out / "manifest.ini", sections)
    return EXIT_OK


def cmd_check(args):
    try:
        cfg = load_config(args.config, out=args.out, seed=args.seed)
    except ComonotoneError as exc:
        _err(f"config error: {exc}")
        return EXIT_CONFIG
    p = cfg.problem
    ok = True
    print(f"problem {p.name}  dim={p.dim}  rho={p.rho!r}")
    for m in cfg.methods:
        print(f"\n[{m.name}] {m.params}")
        if m.name == "ins":
            report = validate_params(m.params, p.rho)
            print(report)
            ok &= report.ok
        try:
            for r in property_suite(p.operator, m.params.eta):
                print(r)
                ok &= r.ok
        except InadmissibleIndex as exc:
            print(f"FAIL  eta admissibility: {exc}")
            ok = False
    print("\nall conditions pass" if ok else "\nsome conditions FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_reproduce(args):
    if not args.figure:
        _err("reproduce needs --figure NAME")
        return EXIT_CONFIG
    try:
        tables = figure_data(args.figure)
    except UnknownFigure as exc:
        _err(str(exc.args[0]))
        return EXIT_CONFIG
    except NUMERIC_ERRORS as exc:
        _err(f"numerical failure: {type(exc).__name__}: {exc}")
        return EXIT_NUMERIC
    out = Path(args.out or "figures")
    out.mkdir(parents=True, exist_ok=True)
    for fname, (columns, data) in tables.items():
        path = write_table(out / fname, columns, data)
        print(f"{fname}: {len(data[columns[0]])} rows -> {path}")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="comonotone", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, metavar="PATH")
        p.add_argument("--out", metavar="DIR")
        p.add_argument("--seed", type=int, metavar="N")

    p = sub.add_parser("run", help="run the configured methods and write CSV logs")
    common(p)
    p.add_argument("--max-iter", type=int, metavar="N")
    p.add_argument("--tol", type=float, metavar="X")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check", help="check parameter conditions and operator properties")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reproduce", help="write plot data for a reference figure")
    p.add_argument("--figure", metavar="NAME", help=", ".join(FIGURES))
    p.add_argument("--out", metavar="DIR")
    p.set_defaults(func=cmd_reproduce)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad usage, which matches the config-error code
        return exc.code
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
