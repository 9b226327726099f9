"""Delimited text writers and readers for fields and diagnostics.

All files are comma-separated with a single header line, decimal text
at 17 significant digits (lossless for binary64 round trips), "\n"
newlines and no locale dependence.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .eos.core import EosSpec
from .region import InvariantRegion, entropy_total, membership_mask
from .solver import DiagnosticsSeries, FieldState

SNAPSHOT_COLUMNS = ("x", "rho", "u", "P", "e", "s", "q", "in_sigma")


def snapshot_table(field: FieldState, eos: EosSpec, region: InvariantRegion) -> dict:
    """Per-cell snapshot columns (see SNAPSHOT_COLUMNS) as arrays."""
    W = field.cell_averages
    rho = W[0]
    v = 1.0 / rho
    u = W[1] * v
    e = W[2] * v - 0.5 * u * u
    with np.errstate(all="ignore"):
        s = entropy_total(eos, e, v)
        P = -np.asarray(eos.F_v(s, v), dtype=float)
        q = rho * (region.s0 - s)
    in_sigma = membership_mask(W, eos, region).astype(float)
    return {
        "x": field.grid.cell_centers(),
        "rho": rho,
        "u": u,
        "P": P,
        "e": e,
        "s": s,
        "q": q,
        "in_sigma": in_sigma,
    }


def write_snapshot(field: FieldState, eos: EosSpec, region: InvariantRegion, path):
    """Write one field snapshot as delimited text.

    Header `x,rho,u,P,e,s,q,in_sigma`, one row per cell.  Refuses to
    write non-finite values (they indicate an unhealthy state that
    should be investigated, not serialized); I/O problems raise the
    usual OSError (IOError).
    """
    table = snapshot_table(field, eos, region)
    write_table(path, SNAPSHOT_COLUMNS, table)


def write_diagnostics(series: DiagnosticsSeries, path):
    """Write the per-step diagnostics series as delimited text."""
    write_table(path, DiagnosticsSeries.COLUMNS, series.as_dict(), allow_nan=True)


def read_table(path) -> dict:
    """Read a delimited file written by this module back into arrays."""
    with open(path, "r", newline="") as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return {name: data[:, k] for k, name in enumerate(header)}


def write_table(path, columns, table, allow_nan: bool = False):
    """Write named column arrays as delimited text (17 significant digits)."""
    arrays = [np.asarray(table[name], dtype=float) for name in columns]
    n = arrays[0].size
    if not allow_nan:
        for name, arr in zip(columns, arrays):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite value in column {name!r}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for i in range(n):
            fh.write(",".join("%.17g" % arr[i] for arr in arrays) + "\n")
