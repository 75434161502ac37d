"""CSV and manifest writers.

Floats are written with ``repr`` so every value round-trips exactly; a run
with the same configuration therefore reproduces byte-identical files.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

DISCRETE_COLUMNS = (
    "n", "err", "diff", "n_diff", "yosida", "n_yosida", "energy_gamma", "omega_norm",
)
CONTINUOUS_COLUMNS = (
    "t", "err", "xdot_norm", "t_xdot", "yosida", "t_yosida", "energy_gamma",
)


def fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def lg(values):
    """Base-10 logarithm with ``lg 0 = -inf`` and no warnings."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log10(np.asarray(values, dtype=float))


def write_table(path, columns, data):
    """Write ``data`` (mapping column -> 1-D array) with a header row."""
    path = Path(path)
    length = len(data[columns[0]])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        cols = [data[c] for c in columns]
        for i in range(length):
            w.writerow([fmt(c[i]) for c in cols])
    return path


def discrete_table(log):
    return {
        "n": log.n,
        "err": log.err,
        "diff": log.diff,
        "n_diff": log.n_diff,
        "yosida": log.yosida,
        "n_yosida": log.n_yosida,
        "energy_gamma": log.energy,
        "omega_norm": log.omega_norm,
    }


def continuous_table(traj):
    return {
        "t": traj.t,
        "err": traj.err,
        "xdot_norm": traj.xdot_norm,
        "t_xdot": traj.t_xdot,
        "yosida": traj.yosida,
        "t_yosida": traj.t_yosida,
        "energy_gamma": traj.energy,
    }


def write_log(path, log):
    return write_table(path, DISCRETE_COLUMNS, discrete_table(log))


def write_trajectory(path, traj):
    return write_table(path, CONTINUOUS_COLUMNS, continuous_table(traj))


def read_table(path):
    """Read a CSV written by :func:`write_table` into float arrays."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return {h: np.array([float(r[i]) for r in body]) for i, h in enumerate(header)}


def write_manifest(path, sections):
    """Key/value text: ``[section]`` headers followed by ``key = value`` lines."""
    lines = []
    for name, items in sections.items():
        lines.append(f"[{name}]")
        for k, v in items.items():
            if isinstance(v, float) and not math.isfinite(v):
                v = repr(v)
            lines.append(f"{k} = {v}")
        lines.append("")
    Path(path).write_text("\n".join(lines))
