"""KAN forward evaluation and exact parameter Jacobian.

A network of L layers with widths [n_1, ..., n_{L+1}]. Every edge carries a
learnable univariate activation phi(x) = row . [silu(x), B_1(x), ..., B_M(x)],
so layer l is the linear map eta_{l+1} = theta_l @ X_l with
X_l the stacked per-node feature vectors. The Jacobian of the output with
respect to the flattened parameters is assembled layer by layer from

    Psi'_l = (Xi_L ... Xi_{l+1}) (X_l^T kron I_{n_{l+1}}),   Xi_l = theta_l X'_l,

without ever materializing the identity Kronecker factor.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .spline import SplineGrid, eval_basis, eval_basis_and_deriv, make_grid


class StaleEvalError(RuntimeError):
    """The cached evaluation does not match the parameters it is used with."""


@dataclass(frozen=True)
class KanShape:
    """Layer widths plus the spline grid shared by every edge."""

    layer_widths: tuple
    grid: SplineGrid

    def __post_init__(self):
        widths = tuple(int(w) for w in self.layer_widths)
        object.__setattr__(self, "layer_widths", widths)
        if len(widths) < 2 or any(w < 1 for w in widths):
            raise ValueError(f"invalid layer widths {widths}")

    @property
    def num_layers(self) -> int:
        return len(self.layer_widths) - 1

    @property
    def n_in(self) -> int:
        return self.layer_widths[0]

    @property
    def n_out(self) -> int:
        return self.layer_widths[-1]

    def layer_matrix_shape(self, l: int):
        """(rows, cols) of the parameter matrix of layer l (0-based)."""
        M = self.grid.num_basis
        return self.layer_widths[l + 1], self.layer_widths[l] * (M + 1)

    def layer_param_counts(self):
        return [r * c for r, c in (self.layer_matrix_shape(l) for l in range(self.num_layers))]


def default_shape(widths=(4, 6, 4, 4), G: int = 5, k: int = 3, lo: float = -10.0, hi: float = 10.0) -> KanShape:
    return KanShape(tuple(widths), make_grid(k, G, lo, hi))


def param_count(shape: KanShape) -> int:
    """Total flattened parameter count: (sum_l n_l n_{l+1}) * (M+1)."""
    w = shape.layer_widths
    edges = sum(w[l] * w[l + 1] for l in range(shape.num_layers))
    return edges * (shape.grid.num_basis + 1)


class KanParams:
    """Per-layer parameter matrices with a column-major flattened view.

    The flat vector is [vec(theta_1); ...; vec(theta_L)] where vec stacks
    columns, matching the ordering the adaptation law updates.
    """

    def __init__(self, shape: KanShape, matrices):
        self.shape = shape
        mats = []
        for l, m in enumerate(matrices):
            m = np.asarray(m, dtype=float)
            expect = shape.layer_matrix_shape(l)
            if m.shape != expect:
                raise ValueError(f"layer {l} matrix shape {m.shape}, expected {expect}")
            mats.append(m)
        if len(mats) != shape.num_layers:
            raise ValueError(f"expected {shape.num_layers} layer matrices, got {len(mats)}")
        self.matrices = mats

    @classmethod
    def zeros(cls, shape: KanShape) -> "KanParams":
        return cls(shape, [np.zeros(shape.layer_matrix_shape(l)) for l in range(shape.num_layers)])

    @classmethod
    def from_flat(cls, shape: KanShape, flat) -> "KanParams":
        flat = np.asarray(flat, dtype=float).ravel()
        if flat.size != param_count(shape):
            raise ValueError(f"flat vector length {flat.size}, expected {param_count(shape)}")
        mats = []
        pos = 0
        for l in range(shape.num_layers):
            rows, cols = shape.layer_matrix_shape(l)
            seg = flat[pos : pos + rows * cols]
            mats.append(seg.reshape((cols, rows)).T.copy())
            pos += rows * cols
        return cls(shape, mats)

    def flat(self) -> np.ndarray:
        return np.concatenate([m.flatten(order="F") for m in self.matrices])

    def checksum(self) -> float:
        return float(sum(m.sum() for m in self.matrices))


@dataclass
class KanEval:
    """Cached forward pass: per-layer inputs, feature vectors, and derivatives."""

    layer_inputs: list  # eta_l for l = 1..L+1
    features: list  # X_l, length n_l*(M+1)
    feature_derivs: list  # per-node derivative columns, (n_l, M+1)
    output: np.ndarray
    params_checksum: float


def silu(x):
    """SiLU value and derivative, x*sigmoid(x); works elementwise on arrays."""
    s = expit(x)
    return x * s, s + x * s * (1.0 - s)


def _layer_features(grid: SplineGrid, eta):
    """Feature matrix and its derivative for a batch of layer inputs.

    eta: (B, n_l). Returns X (B, n_l*(M+1)) and the per-node derivative
    columns xp (B, n_l, M+1) that make up the block-diagonal X'_l.
    """
    bval, bder = silu(eta)
    basis, dbasis = eval_basis_and_deriv(grid, eta)
    X = np.concatenate([bval[..., None], basis], axis=-1)
    xp = np.concatenate([bder[..., None], dbasis], axis=-1)
    return X.reshape(eta.shape[0], -1), xp


def _forward_batch(shape: KanShape, theta_mats, x):
    """Batched forward pass.

    theta_mats: list of (B, n_{l+1}, n_l(M+1)) or (n_{l+1}, n_l(M+1)) arrays.
    x: (B, n_in). Returns (etas, Xs, xps) caches with the final eta as output.
    """
    etas = [x]
    Xs = []
    xps = []
    eta = x
    for th in theta_mats:
        X, xp = _layer_features(shape.grid, eta)
        Xs.append(X)
        xps.append(xp)
        if th.ndim == 2:
            eta = X @ th.T
        else:
            eta = np.einsum("bjd,bd->bj", th, X)
        etas.append(eta)
    return etas, Xs, xps


def _jacobian_batch(shape: KanShape, theta_mats, Xs, xps):
    """Batched parameter Jacobian (B, n_out, a1) from forward caches."""
    B = Xs[0].shape[0]
    L = shape.num_layers
    M1 = shape.grid.num_basis + 1
    n_out = shape.n_out
    # Xi_l = theta_l X'_l, contracting each node's (M+1) feature block.
    xis = []
    for l in range(L):
        th = theta_mats[l]
        n_l = shape.layer_widths[l]
        if th.ndim == 2:
            th_r = th.reshape(th.shape[0], n_l, M1)
            xi = np.einsum("jim,bim->bji", th_r, xps[l])
        else:
            th_r = th.reshape(B, th.shape[1], n_l, M1)
            xi = np.einsum("bjim,bim->bji", th_r, xps[l])
        xis.append(xi)
    # Suffix products P_l = Xi_L ... Xi_{l+1}; P_L = I.
    blocks = [None] * L
    P = np.broadcast_to(np.eye(n_out), (B, n_out, n_out)).copy()
    for l in range(L - 1, -1, -1):
        # Psi'_l = X_l^T kron P_l: column (d*n_{l+1} + c) is X_l[d] * P[:, c].
        psi = np.einsum("bd,brc->brdc", Xs[l], P)
        blocks[l] = psi.reshape(B, n_out, -1)
        if l > 0:
            P = np.einsum("brc,bci->bri", P, xis[l])
    return np.concatenate(blocks, axis=2)


def forward(shape: KanShape, params: KanParams, x) -> KanEval:
    """Evaluate the network at a single input vector, caching layer quantities."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size != shape.n_in:
        raise ValueError(f"input length {x.size}, expected {shape.n_in}")
    etas, Xs, xps = _forward_batch(shape, params.matrices, x[None, :])
    return KanEval(
        layer_inputs=[e[0] for e in etas],
        features=[X[0] for X in Xs],
        feature_derivs=[xp[0] for xp in xps],
        output=etas[-1][0],
        params_checksum=params.checksum(),
    )


def jacobian(shape: KanShape, params: KanParams, ev: KanEval) -> np.ndarray:
    """Exact Jacobian d(output)/d(flat params), shape (n_out, a1)."""
    if ev.params_checksum != params.checksum():
        raise StaleEvalError("forward cache does not match these parameters")
    jac = _jacobian_batch(
        shape,
        params.matrices,
        [X[None, :] for X in ev.features],
        [xp[None, :, :] for xp in ev.feature_derivs],
    )
    return jac[0]


def edge_activation(shape: KanShape, params: KanParams, l: int, j: int, i: int, eta):
    """Sample the learned univariate activation on edge (layer l, node i -> node j).

    Indices are 0-based; eta may be an array of evaluation points.
    """
    eta = np.asarray(eta, dtype=float)
    M1 = shape.grid.num_basis + 1
    row = params.matrices[l][j, i * M1 : (i + 1) * M1]
    bval, _ = silu(eta)
    basis = eval_basis(shape.grid, eta)
    return row[0] * bval + basis @ row[1:]


class KanApproximator:
    """Batched forward/Jacobian provider for the simulator."""

    def __init__(self, shape: KanShape):
        self.shape = shape
        self.param_count = param_count(shape)
        self.name = "kan"

    def _unpack(self, theta):
        """Split (B, a1) flat parameters into per-layer (B, rows, cols) matrices."""
        mats = []
        pos = 0
        B = theta.shape[0]
        for l in range(self.shape.num_layers):
            rows, cols = self.shape.layer_matrix_shape(l)
            seg = theta[:, pos : pos + rows * cols]
            mats.append(seg.reshape(B, cols, rows).transpose(0, 2, 1))
            pos += rows * cols
        return mats

    def forward_jacobian(self, theta, x):
        """theta: (B, a1), x: (B, n) -> (phi (B, n), jac (B, n, a1))."""
        mats = self._unpack(theta)
        etas, Xs, xps = _forward_batch(self.shape, mats, x)
        jac = _jacobian_batch(self.shape, mats, Xs, xps)
        return etas[-1], jac

    def forward_only(self, theta, x):
        mats = self._unpack(theta)
        etas, _, _ = _forward_batch(self.shape, mats, x)
        return etas[-1]

    def init_params(self, rng: np.random.Generator, batch: int, scale: float = 0.1):
        return rng.uniform(-scale, scale, size=(batch, self.param_count))
