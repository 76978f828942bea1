"""Deterministic CSV/JSON writers: UTF-8, LF endings, shortest round-trip floats."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def _cell(v):
    if isinstance(v, (float, np.floating)):
        x = float(v)
        return repr(x) if math.isfinite(x) else "nan"
    return v


def write_csv(path: Path, rows: list[dict], columns: list[str]) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(row.get(c, "")) for c in columns])
    return path


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_clean(obj), fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")
    return path


def write_plot_csv(path: Path, series: dict[str, tuple]) -> Path:
    """Long-format ``x, y, series`` table; ``series`` maps a label to ``(xs, ys)``."""
    rows = []
    for label, (xs, ys) in series.items():
        for x, y in zip(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)):
            rows.append({"x": x, "y": y, "series": label})
    return write_csv(path, rows, ["x", "y", "series"])


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False)
