"""Parsers for the solver's CSV output schemas, with line-numbered errors.

This package is a read-only consumer: it parses the documented file formats
and never recomputes solver results. Front CSVs carry
`id,parent_id,x_1..x_n,f_1..f_m`; profile CSVs carry `metric,solver,tau,rho`
with per-curve monotonicity invariants.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np


class SchemaError(ValueError):
    """A file failed to parse under its declared schema."""

    def __init__(self, path, message, line=None):
        self.path = str(path)
        self.line = line
        where = f"{self.path}: " if line is None else f"{self.path}: line {line}: "
        super().__init__(where + message)


def _open_rows(path):
    path = Path(path)
    if not path.is_file():
        raise SchemaError(path, "file not found")
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def _float(field, path, lineno, column):
    try:
        value = float(field)
    except ValueError:
        raise SchemaError(path, f"bad {column} value {field!r}", lineno) from None
    if not math.isfinite(value):
        raise SchemaError(path, f"non-finite {column} value {field!r}", lineno)
    return value


def read_front_csv(path):
    """Objective matrix of a front CSV: an (N, m) float array, N >= 1.

    Decision-vector columns are validated but not returned; plots only use
    objective space.
    """
    rows = _open_rows(path)
    if not rows:
        raise SchemaError(path, "empty file", 1)
    header = rows[0]
    n = sum(1 for c in header if c.startswith("x_"))
    m = sum(1 for c in header if c.startswith("f_"))
    expected = (
        ["id", "parent_id"]
        + [f"x_{i}" for i in range(1, n + 1)]
        + [f"f_{j}" for j in range(1, m + 1)]
    )
    if n < 1 or m < 2 or header != expected:
        raise SchemaError(
            path, f"bad header {header!r}, expected id,parent_id,x_1..x_n,f_1..f_m", 1
        )
    points = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise SchemaError(
                path, f"expected {len(header)} fields, got {len(row)}", lineno
            )
        try:
            int(row[0])
        except ValueError:
            raise SchemaError(path, f"bad id {row[0]!r}", lineno) from None
        if row[1] != "":
            try:
                int(row[1])
            except ValueError:
                raise SchemaError(path, f"bad parent_id {row[1]!r}", lineno) from None
        for i, field in enumerate(row[2 : 2 + n], start=1):
            _float(field, path, lineno, f"x_{i}")
        fx = [_float(field, path, lineno, f"f_{j}") for j, field in enumerate(row[2 + n :], start=1)]
        points.append(fx)
    if not points:
        raise SchemaError(path, "no data rows")
    return np.asarray(points, dtype=float)


PROFILE_HEADER = ["metric", "solver", "tau", "rho"]


def read_profiles_csv(path):
    """Profile curves keyed by metric: {metric: [(solver, tau, rho), ...]}.

    Curves keep file order. Each curve must have tau >= 1 strictly increasing
    and rho in [0, 1] nondecreasing; violations report the offending line.
    """
    rows = _open_rows(path)
    if not rows:
        raise SchemaError(path, "empty file", 1)
    if rows[0] != PROFILE_HEADER:
        raise SchemaError(
            path, f"bad header {rows[0]!r}, expected {','.join(PROFILE_HEADER)}", 1
        )
    curves = {}  # (metric, solver) -> [taus, rhos, linenos]
    order = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 4:
            raise SchemaError(path, f"expected 4 fields, got {len(row)}", lineno)
        metric, solver = row[0], row[1]
        tau = _float(row[2], path, lineno, "tau")
        rho = _float(row[3], path, lineno, "rho")
        key = (metric, solver)
        if key not in curves:
            curves[key] = ([], [], [])
            order.append(key)
        taus, rhos, linenos = curves[key]
        if not taus and tau < 1.0:
            raise SchemaError(path, f"tau starts below 1 ({tau})", lineno)
        if taus and tau <= taus[-1]:
            raise SchemaError(
                path, f"tau not strictly increasing ({taus[-1]} then {tau})", lineno
            )
        if not 0.0 <= rho <= 1.0:
            raise SchemaError(path, f"rho outside [0, 1] ({rho})", lineno)
        if rhos and rho < rhos[-1]:
            raise SchemaError(
                path, f"rho decreases ({rhos[-1]} then {rho})", lineno
            )
        taus.append(tau)
        rhos.append(rho)
        linenos.append(lineno)
    if not order:
        raise SchemaError(path, "no data rows")
    out = {}
    for metric, solver in order:
        taus, rhos, _ = curves[(metric, solver)]
        out.setdefault(metric, []).append(
            (solver, np.asarray(taus), np.asarray(rhos))
        )
    return out
