"""Fully connected tanh baseline sharing the adaptation law.

Each layer stores W_l of shape (n_{l+1}, n_l + 1); the trailing column
multiplies a constant 1 appended to the layer input, providing the bias.
Hidden activations are tanh, the output layer is linear, and the parameter
Jacobian mirrors the KAN assembly with Xi_l = W_l[:, :-1] diag(1 - tanh^2).
"""
from __future__ import annotations

import numpy as np

from .kan import StaleEvalError

DEFAULT_WIDTHS = (4, 5, 5, 5, 4)


def mlp_param_count(widths=DEFAULT_WIDTHS) -> int:
    w = tuple(widths)
    return sum((w[l] + 1) * w[l + 1] for l in range(len(w) - 1))


class MlpParams:
    """Per-layer weight matrices with the same column-major flattening as KanParams."""

    def __init__(self, widths, matrices):
        self.widths = tuple(int(w) for w in widths)
        mats = []
        for l, m in enumerate(matrices):
            m = np.asarray(m, dtype=float)
            expect = (self.widths[l + 1], self.widths[l] + 1)
            if m.shape != expect:
                raise ValueError(f"layer {l} matrix shape {m.shape}, expected {expect}")
            mats.append(m)
        if len(mats) != len(self.widths) - 1:
            raise ValueError("wrong number of layer matrices")
        self.matrices = mats

    @classmethod
    def zeros(cls, widths=DEFAULT_WIDTHS) -> "MlpParams":
        widths = tuple(widths)
        return cls(widths, [np.zeros((widths[l + 1], widths[l] + 1)) for l in range(len(widths) - 1)])

    @classmethod
    def from_flat(cls, widths, flat) -> "MlpParams":
        widths = tuple(widths)
        flat = np.asarray(flat, dtype=float).ravel()
        if flat.size != mlp_param_count(widths):
            raise ValueError(f"flat vector length {flat.size}, expected {mlp_param_count(widths)}")
        mats = []
        pos = 0
        for l in range(len(widths) - 1):
            rows, cols = widths[l + 1], widths[l] + 1
            seg = flat[pos : pos + rows * cols]
            mats.append(seg.reshape((cols, rows)).T.copy())
            pos += rows * cols
        return cls(widths, mats)

    def flat(self) -> np.ndarray:
        return np.concatenate([m.flatten(order="F") for m in self.matrices])

    def checksum(self) -> float:
        return float(sum(m.sum() for m in self.matrices))


def _forward_batch(mats, x):
    """Batched forward pass; mats are (rows, cols) or (B, rows, cols) arrays.

    Returns (output, zs, pre) with zs the augmented layer inputs and pre the
    hidden-layer pre-activations.
    """
    B = x.shape[0]
    L = len(mats)
    zs = []
    pre = []
    z = np.concatenate([x, np.ones((B, 1))], axis=1)
    for l, W in enumerate(mats):
        zs.append(z)
        a = z @ W.T if W.ndim == 2 else np.einsum("bjc,bc->bj", W, z)
        if l < L - 1:
            pre.append(a)
            z = np.concatenate([np.tanh(a), np.ones((B, 1))], axis=1)
    return a, zs, pre


def _jacobian_batch(mats, zs, pre, n_out):
    """Batched parameter Jacobian (B, n_out, P) from forward caches."""
    B = zs[0].shape[0]
    L = len(mats)
    blocks = [None] * L
    P = np.broadcast_to(np.eye(n_out), (B, n_out, n_out)).copy()
    for l in range(L - 1, -1, -1):
        psi = np.einsum("bd,brc->brdc", zs[l], P)
        blocks[l] = psi.reshape(B, n_out, -1)
        if l > 0:
            W = mats[l]
            Wn = W[:, :-1] if W.ndim == 2 else W[:, :, :-1]
            sig = 1.0 - np.tanh(pre[l - 1]) ** 2
            if Wn.ndim == 2:
                xi = Wn[None, :, :] * sig[:, None, :]
            else:
                xi = Wn * sig[:, None, :]
            P = np.einsum("brc,bci->bri", P, xi)
    return np.concatenate(blocks, axis=2)


def mlp_forward(params: MlpParams, x):
    """Single-input forward pass; returns (output, cache for the Jacobian)."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size != params.widths[0]:
        raise ValueError(f"input length {x.size}, expected {params.widths[0]}")
    out, zs, pre = _forward_batch(params.matrices, x[None, :])
    cache = {"zs": zs, "pre": pre, "checksum": params.checksum()}
    return out[0], cache


def mlp_jacobian(params: MlpParams, cache) -> np.ndarray:
    """Jacobian d(output)/d(flat weights), shape (n_out, P)."""
    if cache["checksum"] != params.checksum():
        raise StaleEvalError("forward cache does not match these parameters")
    jac = _jacobian_batch(params.matrices, cache["zs"], cache["pre"], params.widths[-1])
    return jac[0]


class MlpApproximator:
    """Batched forward/Jacobian provider for the simulator."""

    def __init__(self, widths=DEFAULT_WIDTHS):
        self.widths = tuple(widths)
        self.param_count = mlp_param_count(self.widths)
        self.name = "dnn"

    def _unpack(self, theta):
        mats = []
        pos = 0
        B = theta.shape[0]
        for l in range(len(self.widths) - 1):
            rows, cols = self.widths[l + 1], self.widths[l] + 1
            seg = theta[:, pos : pos + rows * cols]
            mats.append(seg.reshape(B, cols, rows).transpose(0, 2, 1))
            pos += rows * cols
        return mats

    def forward_jacobian(self, theta, x):
        mats = self._unpack(theta)
        out, zs, pre = _forward_batch(mats, x)
        jac = _jacobian_batch(mats, zs, pre, self.widths[-1])
        return out, jac

    def forward_only(self, theta, x):
        mats = self._unpack(theta)
        out, _, _ = _forward_batch(mats, x)
        return out

    def init_params(self, rng: np.random.Generator, batch: int, scale: float = 0.1):
        return rng.uniform(-scale, scale, size=(batch, self.param_count))
