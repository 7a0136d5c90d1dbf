"""Closed-loop fixed-step simulation of the adaptive controller.

Explicit Euler on the coupled state / weight ODEs with both integrated from
the pre-step values. Runs are batched: every array carries a leading run
dimension so Monte Carlo candidates and paired comparison runs share one
time loop.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .control import ControllerConfig, control_input, project, update_direction
from .plant import PlantSpec, desired

DIVERGENCE_NORM = 1e6

CSV_HEADER = "t,x1,x2,x3,x4,e_norm,f_err_norm,u_norm,theta_norm"


class SimulationDiverged(RuntimeError):
    def __init__(self, step: int):
        super().__init__(f"simulation diverged at step {step}")
        self.step = step


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.001
    t_final: float = 100.0
    seed: int = 0
    approximator: str = "kan"

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.t_final < self.dt:
            raise ValueError(f"t_final must be >= dt, got {self.t_final}")

    @property
    def num_steps(self) -> int:
        return int(np.floor(self.t_final / self.dt + 1e-9))


@dataclass
class RunLog:
    """Per-step time series of one run plus its summary statistics."""

    t: np.ndarray
    x: np.ndarray
    e: np.ndarray
    e_norm: np.ndarray
    phi: np.ndarray
    f_err_norm: np.ndarray
    u: np.ndarray
    u_norm: np.ndarray
    theta_norm: np.ndarray
    summary: dict


def step(state, cfg: ControllerConfig, plant: PlantSpec, traj, approx, theta, dt: float):
    """One Euler step from (x, theta, t); returns (x', theta', t').

    Convenience single-run wrapper around the batched loop internals; the
    approximation and Jacobian are evaluated at the pre-step state.
    """
    x, t = state
    x = np.asarray(x, dtype=float)[None, :]
    theta = np.asarray(theta, dtype=float)[None, :]
    xd, xd_dot = desired(t, traj.a, traj.b, traj.c, plant.n)
    e = x - xd
    phi, jac = approx.forward_jacobian(theta, x)
    u = control_input(phi, e, xd_dot, cfg)
    theta_dot = project(theta, update_direction(jac, e, cfg), cfg)
    x_next = x + dt * (plant.drift(x) + u + plant.disturbance(t))
    theta_next = theta + dt * theta_dot
    if not (np.all(np.isfinite(x_next)) and np.all(np.isfinite(theta_next))):
        raise SimulationDiverged(0)
    return x_next[0], theta_next[0], t + dt


def run_batch(
    approx,
    theta0: np.ndarray,
    x0: np.ndarray,
    traj_a,
    traj_b,
    traj_c,
    ctrl: ControllerConfig,
    plant: PlantSpec,
    dt: float,
    t_final: float,
    cost_horizon: float = 60.0,
    skip_transient: float = 0.0,
    collect: str = "summary",
):
    """Integrate a batch of runs sharing gains and plant but not state.

    theta0: (B, a1), x0: (B, n), traj_*: length-B arrays. Returns a dict of
    per-run summary arrays; with collect="full" it also carries the full
    logged series under "series".
    """
    theta0 = np.atleast_2d(np.asarray(theta0, dtype=float))
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    a = np.atleast_1d(np.asarray(traj_a, dtype=float))
    b = np.atleast_1d(np.asarray(traj_b, dtype=float))
    c = np.atleast_1d(np.asarray(traj_c, dtype=float))
    B, n = x0.shape
    N = int(np.floor(t_final / dt + 1e-9))
    H = min(int(np.floor(cost_horizon / dt + 1e-9)), N)
    skip = min(int(np.floor(skip_transient / dt + 1e-9)), N)
    outer = ctrl.theta_bar * (1.0 + ctrl.proj_eps)

    x = x0.copy()
    theta = theta0.copy()
    alive = np.ones(B, dtype=bool)
    diverged_step = np.full(B, -1, dtype=int)

    sum_e = np.zeros(B)
    sum_f_err = np.zeros(B)
    count = 0
    cost = np.zeros(B)
    max_theta_norm = np.zeros(B)

    full = collect == "full"
    if full:
        series = {
            "t": np.arange(N + 1) * dt,
            "x": np.zeros((B, N + 1, n)),
            "e": np.zeros((B, N + 1, n)),
            "e_norm": np.zeros((B, N + 1)),
            "phi": np.zeros((B, N + 1, n)),
            "f_err_norm": np.zeros((B, N + 1)),
            "u": np.zeros((B, N + 1, n)),
            "u_norm": np.zeros((B, N + 1)),
            "theta_norm": np.zeros((B, N + 1)),
        }

    for i in range(N + 1):
        t = i * dt
        xd, xd_dot = desired(t, a, b, c, n)
        e = x - xd
        phi, jac = approx.forward_jacobian(theta, x)
        u = control_input(phi, e, xd_dot, ctrl)
        f = plant.drift(x)
        d = plant.disturbance(t)
        e_norm = np.linalg.norm(e, axis=1)
        f_err = np.linalg.norm(f - phi, axis=1)
        theta_norm = np.linalg.norm(theta, axis=1)
        np.maximum(max_theta_norm, np.where(alive, theta_norm, max_theta_norm), out=max_theta_norm)

        if i >= skip:
            sum_e += np.where(alive, e_norm, 0.0)
            sum_f_err += np.where(alive, f_err, 0.0)
            count += 1
        if i <= H:
            w = 0.5 * dt if i in (0, H) else dt
            cost += np.where(alive, w * f_err**2, 0.0)

        if full:
            series["x"][:, i] = x
            series["e"][:, i] = e
            series["e_norm"][:, i] = e_norm
            series["phi"][:, i] = phi
            series["f_err_norm"][:, i] = f_err
            series["u"][:, i] = u
            series["u_norm"][:, i] = np.linalg.norm(u, axis=1)
            series["theta_norm"][:, i] = theta_norm

        if i == N:
            break

        theta_dot = project(theta, update_direction(jac, e, ctrl), ctrl, check=False)
        x_new = x + dt * (f + u + d)
        theta_new = theta + dt * theta_dot
        # Euler overshoot guard: the smooth projection bounds the continuous
        # flow, the discrete step can creep past the outer ball.
        norm_new = np.linalg.norm(theta_new, axis=1)
        over = norm_new > outer
        if np.any(over):
            theta_new[over] *= (outer / norm_new[over])[:, None]

        ok = (
            np.all(np.isfinite(x_new), axis=1)
            & np.all(np.isfinite(theta_new), axis=1)
            & (np.linalg.norm(x_new, axis=1) <= DIVERGENCE_NORM)
        )
        newly_dead = alive & ~ok
        if np.any(newly_dead):
            diverged_step[newly_dead] = i + 1
            alive = alive & ok
            if not np.any(alive):
                x = np.where(ok[:, None], x_new, x)
                theta = np.where(ok[:, None], theta_new, theta)
                break
        x = np.where(alive[:, None], x_new, x)
        theta = np.where(alive[:, None], theta_new, theta)

    result = {
        "avg_e_norm": sum_e / max(count, 1),
        "avg_f_err_norm": sum_f_err / max(count, 1),
        "cost": cost,
        "max_theta_norm": max_theta_norm,
        "diverged": diverged_step >= 0,
        "diverged_step": diverged_step,
        "final_theta": theta,
        "num_records": N + 1,
    }
    if full:
        result["series"] = series
    return result


def run(approx, theta0, x0, traj, ctrl: ControllerConfig, plant: PlantSpec, sim_cfg: SimConfig, seed=None) -> RunLog:
    """Single deterministic run with full logging."""
    res = run_batch(
        approx,
        np.asarray(theta0, dtype=float)[None, :],
        np.asarray(x0, dtype=float)[None, :],
        [traj.a],
        [traj.b],
        [traj.c],
        ctrl,
        plant,
        sim_cfg.dt,
        sim_cfg.t_final,
        cost_horizon=min(60.0, sim_cfg.t_final),
        collect="full",
    )
    if res["diverged"][0]:
        raise SimulationDiverged(int(res["diverged_step"][0]))
    s = res["series"]
    summary = {
        "avg_e_norm": float(res["avg_e_norm"][0]),
        "avg_f_err_norm": float(res["avg_f_err_norm"][0]),
        "cost": float(res["cost"][0]),
        "max_theta_norm": float(res["max_theta_norm"][0]),
        "a": float(traj.a),
        "b": float(traj.b),
        "c": float(traj.c),
        "seed": seed,
        "dt": sim_cfg.dt,
        "t_final": sim_cfg.t_final,
        "approximator": approx.name,
    }
    return RunLog(
        t=s["t"],
        x=s["x"][0],
        e=s["e"][0],
        e_norm=s["e_norm"][0],
        phi=s["phi"][0],
        f_err_norm=s["f_err_norm"][0],
        u=s["u"][0],
        u_norm=s["u_norm"][0],
        theta_norm=s["theta_norm"][0],
        summary=summary,
    )


def write_runlog_csv(log: RunLog, path):
    """Stream the per-step norms to CSV with 17 significant digits."""
    cols = np.column_stack(
        [log.t, log.x, log.e_norm, log.f_err_norm, log.u_norm, log.theta_norm]
    )
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in cols:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def write_summary_json(log: RunLog, path):
    with open(path, "w") as fh:
        json.dump(log.summary, fh, indent=2)
        fh.write("\n")
