"""Simulation-only truth: drift dynamics, disturbance, and desired trajectory.

Only the simulator integrates the drift; the controller never sees it. The
metrics pipeline reads it to form the approximation-error diagnostic
||f(x) - phi_hat||.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit


def default_drift(x):
    """Four-state drift field; x has trailing dimension 4."""
    x = np.asarray(x, dtype=float)
    x1, x2, x3, x4 = x[..., 0], x[..., 1], x[..., 2], x[..., 3]
    return np.stack(
        [
            4.0 * np.tanh(x1 + np.sin(np.pi * x2)),
            5.0 * np.exp(-(x2**2 + x3**2)) - 2.0,
            3.0 * np.sin(np.pi * (x1 + x4)) + 2.0 * np.cos(np.pi * (x3 + x2)),
            4.0 * expit(x1 - x2) + np.sin(2.0 * x4) - 2.0,
        ],
        axis=-1,
    )


@dataclass(frozen=True)
class PlantSpec:
    n: int = 4
    drift: callable = default_drift
    dist_amplitude: float = 0.1
    dist_frequency: float = 0.5  # rad/s

    def disturbance(self, t):
        """Scalar cosine broadcast identically to all state components."""
        t = np.asarray(t, dtype=float)
        d = self.dist_amplitude * np.cos(self.dist_frequency * t)
        return np.broadcast_to(d[..., None], d.shape + (self.n,)).copy()


@dataclass(frozen=True)
class Trajectory:
    """Sinusoid a*sin(b t + c) applied to every state component."""

    a: float = 1.0
    b: float = 0.3
    c: float = 0.0

    def desired(self, t, n: int = 4):
        """Returns (x_d, xd_dot), each with trailing dimension n."""
        t = np.asarray(t, dtype=float)
        phase = self.b * t + self.c
        xd = self.a * np.sin(phase)
        xd_dot = self.a * self.b * np.cos(phase)
        shape = t.shape + (n,)
        return (
            np.broadcast_to(xd[..., None], shape).copy(),
            np.broadcast_to(xd_dot[..., None], shape).copy(),
        )


def desired(t, a, b, c, n: int = 4):
    """Functional form of Trajectory.desired; a, b, c may be arrays for batches."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    phase = b * np.asarray(t, dtype=float) + c
    xd = a * np.sin(phase)
    xd_dot = a * b * np.cos(phase)
    shape = np.broadcast(xd, xd_dot).shape + (n,)
    return (
        np.broadcast_to(xd[..., None], shape).copy(),
        np.broadcast_to(xd_dot[..., None], shape).copy(),
    )


def sample_trajectory(rng: np.random.Generator) -> Trajectory:
    """Per-run trajectory parameters: a~U(0.5,1.5), b~U(0.2,0.5), c~U(0,pi)."""
    return Trajectory(
        a=float(rng.uniform(0.5, 1.5)),
        b=float(rng.uniform(0.2, 0.5)),
        c=float(rng.uniform(0.0, np.pi)),
    )


def sample_initial_state(rng: np.random.Generator, n: int = 4) -> np.ndarray:
    """x(0) ~ U(-8, 8) per component."""
    return rng.uniform(-8.0, 8.0, size=n)
