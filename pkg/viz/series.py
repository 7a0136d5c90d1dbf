"""Time-series helpers for the plotting scripts."""
import csv
from pathlib import Path

import numpy as np

RUN_HEADER = ["t", "x1", "x2", "x3", "x4", "e_norm", "f_err_norm", "u_norm", "theta_norm"]


def load_run_csv(path):
    """Read a run CSV into a dict of float arrays, validating the schema."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"run CSV not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != RUN_HEADER:
            raise ValueError(f"{path}: unexpected CSV header {header!r}, expected {RUN_HEADER!r}")
        rows = np.array([[float(v) for v in row] for row in reader])
    if rows.size == 0:
        raise ValueError(f"{path}: no data rows")
    return {name: rows[:, i] for i, name in enumerate(RUN_HEADER)}


def moving_rms(values, t, window):
    """Trailing moving RMS of `values` over `window` seconds.

    The window is truncated at the start of the series, so a constant series
    maps to itself. With window equal to the sample spacing the result is the
    raw instantaneous magnitude.
    """
    values = np.asarray(values, dtype=float)
    t = np.asarray(t, dtype=float)
    if values.ndim != 1 or values.shape != t.shape:
        raise ValueError("values and t must be 1-D arrays of equal length")
    if t.size > 1:
        dt = t[1] - t[0]
    else:
        dt = window
    if window < dt - 1e-12:
        raise ValueError(f"window {window} is shorter than the sample spacing {dt}")
    n = max(1, int(round(window / dt)))
    sq = values**2
    csum = np.concatenate(([0.0], np.cumsum(sq)))
    idx = np.arange(1, sq.size + 1)
    lo = np.maximum(0, idx - n)
    count = idx - lo
    return np.sqrt((csum[idx] - csum[lo]) / count)
