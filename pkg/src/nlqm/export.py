"""CSV and JSON writers for trajectories, tables and reports."""
from __future__ import annotations

import json
import math

import numpy as np

from .params import Trajectory

__all__ = ["format_float", "write_csv", "trajectory_rows", "trajectory_json"]


def format_float(v) -> str:
    """17 significant digits; ``None`` becomes an empty cell."""
    if v is None:
        return ""
    v = float(v)
    if not math.isfinite(v):
        raise ValueError(f"refusing to emit non-finite value {v!r}")
    return "%.17g" % v


def write_csv(stream, header, rows) -> None:
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(format_float(v) for v in row) + "\n")


def trajectory_rows(tr: Trajectory):
    """Header and rows: ``t,x,y`` for the coupled form, ``t,u,du`` otherwise."""
    if tr.labels == ("y", "x"):
        header = ("t", "x", "y")
        cols = (tr.t, tr.states[:, 1], tr.states[:, 0])
    else:
        header = ("t",) + tuple(tr.labels)
        cols = (tr.t, tr.states[:, 0], tr.states[:, 1])
    return header, list(zip(*(c.tolist() for c in cols)))


def trajectory_json(tr: Trajectory, form: str) -> str:
    header, rows = trajectory_rows(tr)
    data = {
        "form": form,
        "method": tr.method,
        "stats": {
            "accepted": tr.stats.accepted,
            "rejected": tr.stats.rejected,
            "max_local_error": None if np.isnan(tr.stats.max_local_error) else tr.stats.max_local_error,
        },
        "columns": list(header),
        "rows": [[float(format_float(v)) for v in row] for row in rows],
    }
    return json.dumps(data, indent=1)
