"""Deterministic CSV tables for trajectories and reports.

Plain comma-separated values with a mandatory header row and floats
rendered with 17 significant digits, which round-trips IEEE doubles
exactly.  Identical data always serializes to identical bytes, so output
files can be compared bit for bit.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .errors import ConfigError


def format_float(v: float) -> str:
    return f"{float(v):.17g}"


def render_table(names, columns) -> str:
    """Render named columns (equal-length 1-d arrays) to CSV text."""
    names = list(names)
    columns = [np.asarray(c, dtype=float) for c in columns]
    if len(names) != len(columns):
        raise ConfigError(f"{len(names)} names for {len(columns)} columns")
    length = len(columns[0]) if columns else 0
    for name, col in zip(names, columns):
        if col.ndim != 1 or len(col) != length:
            raise ConfigError(f"column {name!r} has shape {col.shape}, expected ({length},)")
    buf = io.StringIO()
    buf.write(",".join(names) + "\n")
    for row in zip(*columns):
        buf.write(",".join(format_float(v) for v in row) + "\n")
    return buf.getvalue()


def write_table(path, names, columns) -> None:
    Path(path).write_text(render_table(names, columns), encoding="ascii", newline="\n")


def read_table(path) -> dict[str, np.ndarray]:
    """Read a CSV written by write_table (or any float table with a header).

    Returns columns keyed by header name, in file order.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        raise ConfigError(f"{path}: empty CSV")
    header = [cell.strip() for cell in rows[0]]
    if all(_is_float(cell) for cell in header):
        raise ConfigError(f"{path}: missing header row (first row is numeric)")
    data = []
    for k, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ConfigError(
                f"{path}: line {k} has {len(row)} fields, header has {len(header)}"
            )
        try:
            data.append([float(cell) for cell in row])
        except ValueError as exc:
            raise ConfigError(f"{path}: line {k}: {exc}") from exc
    if not data:
        raise ConfigError(f"{path}: no data rows")
    mat = np.asarray(data, dtype=float)
    return {name: mat[:, j] for j, name in enumerate(header)}


def _is_float(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True
