"""Uniform B-spline basis evaluation and differentiation.

The spline grid underlies every learnable edge activation: an edge output
is w_b*silu(x) + sum_m w_s*c_m*B_m(x), where the B_m are degree-k B-splines
on a uniform knot vector extended k intervals beyond the core domain.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SplineGrid:
    """Uniform knot vector of degree `degree` over `grid_size` core intervals.

    The knots extend `degree` extra intervals beyond each side of
    [lo, hi], giving exactly grid_size + degree basis functions whose
    restriction to the core domain forms a partition of unity.
    """

    degree: int
    grid_size: int
    lo: float
    hi: float
    knots: np.ndarray = field(repr=False)

    @property
    def num_basis(self) -> int:
        return self.grid_size + self.degree

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / self.grid_size


def make_grid(k: int, G: int, lo: float, hi: float) -> SplineGrid:
    """Build a uniform spline grid of degree k with G core intervals on [lo, hi]."""
    if k < 1:
        raise ValueError(f"spline degree must be >= 1, got {k}")
    if G < 1:
        raise ValueError(f"grid size must be >= 1, got {G}")
    if not lo < hi:
        raise ValueError(f"degenerate domain [{lo}, {hi}]")
    h = (hi - lo) / G
    knots = lo + h * np.arange(-k, G + k + 1, dtype=float)
    return SplineGrid(degree=k, grid_size=G, lo=float(lo), hi=float(hi), knots=knots)


def _prepare(grid: SplineGrid, x):
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)):
        raise ValueError("NaN spline input")
    clamped = (x < grid.lo) | (x > grid.hi)
    xc = np.clip(x, grid.lo, grid.hi)
    return xc, clamped


def _recurse(grid: SplineGrid, xc: np.ndarray):
    """Cox-de Boor recursion; returns (degree-k values, degree-(k-1) values)."""
    t = grid.knots
    k = grid.degree
    M = grid.num_basis
    # Interval index j with t[j] <= x < t[j+1], pinned to the core intervals
    # so x == hi lands in the last core interval.
    j = np.searchsorted(t, xc, side="right") - 1
    j = np.clip(j, k, M - 1)
    vals = (j[..., None] == np.arange(M + k)).astype(float)
    prev = vals
    for d in range(1, k + 1):
        m = M + k - d
        i = np.arange(m)
        left = (xc[..., None] - t[i]) / (t[i + d] - t[i])
        right = (t[i + d + 1] - xc[..., None]) / (t[i + d + 1] - t[i + 1])
        prev = vals
        vals = left * vals[..., :m] + right * vals[..., 1 : m + 1]
    return vals, prev


def eval_basis(grid: SplineGrid, x) -> np.ndarray:
    """Evaluate all M basis functions at x (scalar or array; x clamped to the domain).

    Returns an array with trailing dimension M; entries are nonnegative and
    sum to 1 for x inside [lo, hi].
    """
    xc, _ = _prepare(grid, x)
    vals, _ = _recurse(grid, xc)
    return vals


def eval_basis_deriv(grid: SplineGrid, x) -> np.ndarray:
    """Evaluate dB_m/dx at x; zero vector where x fell outside [lo, hi]."""
    _, deriv = eval_basis_and_deriv(grid, x)
    return deriv


def eval_basis_and_deriv(grid: SplineGrid, x):
    """Values and derivatives in one recursion pass (shared by the network code)."""
    xc, clamped = _prepare(grid, x)
    vals, lower = _recurse(grid, xc)
    t = grid.knots
    k = grid.degree
    M = grid.num_basis
    i = np.arange(M)
    # B'_{i,k} = k [ B_{i,k-1}/(t_{i+k}-t_i) - B_{i+1,k-1}/(t_{i+k+1}-t_{i+1}) ]
    deriv = k * (lower[..., :M] / (t[i + k] - t[i]) - lower[..., 1 : M + 1] / (t[i + k + 1] - t[i + 1]))
    if np.any(clamped):
        deriv = np.where(clamped[..., None], 0.0, deriv)
    return vals, deriv
