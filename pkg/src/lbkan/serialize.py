"""Flat parameter-vector serialization.

Two interchangeable formats: single-column CSV, or binary little-endian
float64 preceded by an 8-byte little-endian length header. Format is picked
by file extension (.csv vs anything else).
"""
from __future__ import annotations

import struct

import numpy as np


def save_params(flat, path):
    flat = np.asarray(flat, dtype=float).ravel()
    path = str(path)
    if path.endswith(".csv"):
        with open(path, "w") as fh:
            for v in flat:
                fh.write(f"{v:.17g}\n")
    else:
        with open(path, "wb") as fh:
            fh.write(struct.pack("<Q", flat.size))
            fh.write(flat.astype("<f8").tobytes())


def load_params(path) -> np.ndarray:
    path = str(path)
    if path.endswith(".csv"):
        return np.loadtxt(path, dtype=float, ndmin=1)
    with open(path, "rb") as fh:
        (n,) = struct.unpack("<Q", fh.read(8))
        data = np.frombuffer(fh.read(8 * n), dtype="<f8")
    if data.size != n:
        raise ValueError(f"truncated parameter file {path}: header says {n}, got {data.size}")
    return data.copy()
