"""Control law and projection-bounded weight adaptation.

u = -phi_hat - k_e e - k_s sgn(e) + xd_dot, with the raw weight update
gamma * J^T e pushed through a smooth ball projection that keeps the
flattened weights inside radius theta_bar*(1 + proj_eps).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ProjectionContractError(RuntimeError):
    """Weights escaped the outer projection ball; indicates an integration fault."""


@dataclass(frozen=True)
class ControllerConfig:
    k_e: float = 11.0
    k_s: float = 0.01
    gamma: float = 4.2
    theta_bar: float = 5.0
    proj_eps: float = 0.1
    smooth_sgn: bool = False
    sgn_delta: float = 0.01

    def __post_init__(self):
        if not self.k_e > 0:
            raise ValueError(f"k_e must be > 0, got {self.k_e}")
        if self.k_s < 0:
            raise ValueError(f"k_s must be >= 0, got {self.k_s}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if not self.theta_bar > 0:
            raise ValueError(f"theta_bar must be > 0, got {self.theta_bar}")
        if not self.proj_eps > 0:
            raise ValueError(f"proj_eps must be > 0, got {self.proj_eps}")
        if not self.sgn_delta > 0:
            raise ValueError(f"sgn_delta must be > 0, got {self.sgn_delta}")


def _sgn(e, cfg: ControllerConfig):
    if cfg.smooth_sgn:
        return np.tanh(e / cfg.sgn_delta)
    return np.sign(e)  # sign(0) = 0


def control_input(phi_hat, e, xd_dot, cfg: ControllerConfig):
    """u = -phi_hat - k_e e - k_s sgn(e) + xd_dot (elementwise, batched ok)."""
    phi_hat = np.asarray(phi_hat, dtype=float)
    e = np.asarray(e, dtype=float)
    xd_dot = np.asarray(xd_dot, dtype=float)
    if np.any(np.isnan(phi_hat)) or np.any(np.isnan(e)) or np.any(np.isnan(xd_dot)):
        raise ValueError("NaN in controller inputs")
    return -phi_hat - cfg.k_e * e - cfg.k_s * _sgn(e, cfg) + xd_dot


def update_direction(jac, e, cfg: ControllerConfig):
    """Raw adaptation direction gamma * J^T e (projection applied separately)."""
    jac = np.asarray(jac, dtype=float)
    e = np.asarray(e, dtype=float)
    if jac.shape[-2] != e.shape[-1]:
        raise ValueError(f"Jacobian rows {jac.shape[-2]} != error length {e.shape[-1]}")
    if jac.ndim == 2:
        return cfg.gamma * (jac.T @ e)
    return cfg.gamma * np.einsum("bna,bn->ba", jac, e)


def project(theta_hat, raw_dot, cfg: ControllerConfig, check: bool = True):
    """Smooth ball projection of the raw update direction.

    Inside the ball of radius theta_bar, or when the update points inward,
    the direction passes unchanged; in the boundary layer the radial
    component is blended out, fully removed at radius theta_bar*(1+proj_eps).
    Accepts a single vector or a (B, a1) batch.
    """
    theta_hat = np.asarray(theta_hat, dtype=float)
    raw_dot = np.asarray(raw_dot, dtype=float)
    single = theta_hat.ndim == 1
    th = theta_hat[None, :] if single else theta_hat
    rd = raw_dot[None, :] if single else raw_dot

    bar2 = cfg.theta_bar**2
    outer2 = (cfg.theta_bar * (1.0 + cfg.proj_eps)) ** 2
    norm2 = np.sum(th * th, axis=-1)
    if check and np.any(norm2 > outer2 * (1.0 + 1e-9)):
        raise ProjectionContractError("weights outside the outer projection ball")

    inner = np.sum(th * rd, axis=-1)
    active = (norm2 >= bar2) & (inner > 0.0)
    c = np.clip((norm2 - bar2) / (((1.0 + cfg.proj_eps) ** 2 - 1.0) * bar2), 0.0, 1.0)
    scale = np.where(active, c * inner / np.where(norm2 > 0.0, norm2, 1.0), 0.0)
    out = rd - scale[..., None] * th
    return out[0] if single else out
