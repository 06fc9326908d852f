"""CSV/JSON writers; every number is printed with 17 significant digits."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Sequence

import numpy as np

FMT = "%.17g"


def _tag_line(tag: str | None) -> str:
    return f"# {tag}\n" if tag else ""


def write_table(path, columns: Sequence[str], rows: np.ndarray, tag: str | None = None) -> Path:
    path = Path(path)
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    np.savetxt(path, rows, fmt=FMT, delimiter=",", header=_tag_line(tag) + ",".join(columns), comments="")
    return path


def read_table(path) -> tuple[list[str], np.ndarray]:
    """Inverse of :func:`write_table`; leading ``#`` lines are skipped."""
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    columns = lines[0].strip().split(",")
    data = np.loadtxt(lines[1:], delimiter=",", ndmin=2) if len(lines) > 1 else np.zeros((0, len(columns)))
    return columns, data


def write_expanded(path, name: str, times, coeffs, tag: str | None = None) -> Path:
    """``t,<name>_0,...,<name>_{size-1}`` per grid time."""
    coeffs = np.asarray(coeffs)
    cols = ["t"] + [f"{name}_{i}" for i in range(coeffs.shape[1])]
    return write_table(path, cols, np.column_stack([times, coeffs]), tag)


def write_moments(path, series, tag: str | None = None) -> Path:
    """Rows ``raw_1..raw_m, central_1..central_m``; columns are the grid times."""
    m = series.raw.shape[0]
    labels = [f"raw_{k}" for k in range(1, m + 1)] + [f"central_{k}" for k in range(1, m + 1)]
    body = np.vstack([series.raw, series.central])
    path = Path(path)
    with open(path, "w") as fh:
        fh.write(_tag_line(tag))
        fh.write(",".join(["moment"] + [FMT % t for t in series.times]) + "\n")
        for label, row in zip(labels, body):
            fh.write(",".join([label] + [FMT % v for v in row]) + "\n")
    return path


def read_moments(path) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    times = np.array([float(v) for v in lines[0].split(",")[1:]])
    rows = {}
    for ln in lines[1:]:
        label, *vals = ln.split(",")
        rows[label] = np.array([float(v) for v in vals])
    return times, rows


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        # round-trips exactly; JSON has no infinity literal
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def write_json(path, payload) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(payload), indent=2) + "\n")
    return path
