"""Deterministic CSV emission for result tables."""

from __future__ import annotations

import csv
import io


def _cell(value) -> str:
    # repr keeps full float precision and is stable across runs
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows: list[dict], fieldnames: list[str] | None = None) -> str:
    if fieldnames is None:
        fieldnames = list(rows[0].keys()) if rows else []
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fieldnames)
    for row in rows:
        writer.writerow([_cell(row.get(name, "")) for name in fieldnames])
    return buf.getvalue()


def write_rows(path, rows: list[dict], fieldnames: list[str] | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(rows_to_csv(rows, fieldnames))


def mean_and_se(values) -> tuple[float, float]:
    """Mean and standard error using the unbiased sample standard deviation."""
    import numpy as np

    arr = np.asarray(values, dtype=np.float64)
    if arr.size <= 1:
        return float(arr.mean()) if arr.size else float("nan"), 0.0
    return float(arr.mean()), float(arr.std(ddof=1) / np.sqrt(arr.size))
