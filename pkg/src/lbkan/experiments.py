"""Monte Carlo weight initialization and paired architecture comparison.

mc_init shakes down many candidate initial weight vectors over a fixed
horizon and keeps the one with the lowest integrated squared approximation
error. compare runs both architectures over shared per-run trajectories and
initial states and reports mean +/- std of the time-averaged norms.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .control import ControllerConfig
from .plant import PlantSpec, sample_initial_state, sample_trajectory
from .sim import run_batch


class McFailedError(RuntimeError):
    """Every Monte Carlo candidate diverged."""


@dataclass(frozen=True)
class McConfig:
    num_candidates: int = 100
    init_scale: float = 0.1  # weights drawn from U(-scale, scale)
    horizon: float = 60.0
    seed: int = 0

    def __post_init__(self):
        if self.num_candidates < 1:
            raise ValueError(f"num_candidates must be >= 1, got {self.num_candidates}")


def mc_init(approx, mc_cfg: McConfig, ctrl: ControllerConfig, plant: PlantSpec, dt: float = 0.001):
    """Pick the candidate initial weights with the lowest cost J.

    All candidates share one sampled plant setup (initial state and desired
    trajectory) drawn from the base seed, so J ranks the weights alone.
    Ties break toward the lowest candidate index. Returns
    (best_theta0, costs, best_index).
    """
    rng = np.random.default_rng(mc_cfg.seed)
    traj = sample_trajectory(rng)
    x0 = sample_initial_state(rng, plant.n)
    B = mc_cfg.num_candidates
    theta0 = approx.init_params(rng, B, scale=mc_cfg.init_scale)
    res = run_batch(
        approx,
        theta0,
        np.tile(x0, (B, 1)),
        np.full(B, traj.a),
        np.full(B, traj.b),
        np.full(B, traj.c),
        ctrl,
        plant,
        dt,
        mc_cfg.horizon,
        cost_horizon=mc_cfg.horizon,
    )
    costs = np.where(res["diverged"], np.inf, res["cost"])
    if not np.any(np.isfinite(costs)):
        raise McFailedError(
            f"all {B} candidates diverged (first divergence steps: {res['diverged_step'][:10]})"
        )
    best = int(np.argmin(costs))  # argmin returns the first minimizer
    return theta0[best].copy(), costs, best


def compare(
    approximators: dict,
    theta0s: dict,
    ctrl,
    plant: PlantSpec,
    num_runs: int = 20,
    t_final: float = 100.0,
    dt: float = 0.001,
    seed: int = 0,
    skip_transient: float = 0.0,
):
    """Paired comparison: run index r gets identical (x0, a, b, c) everywhere.

    approximators / theta0s are name-keyed; every architecture starts from
    its own mc-selected weights. ctrl is a single ControllerConfig or a
    name-keyed dict (the adaptation gain is tuned per architecture).
    Diverged runs are excluded from the statistics and counted. Returns a
    JSON-ready report dict.
    """
    if num_runs < 2:
        raise ValueError("need at least 2 runs for a standard deviation")
    ctrls = ctrl if isinstance(ctrl, dict) else {name: ctrl for name in approximators}
    rng = np.random.default_rng(seed)
    x0 = np.stack([sample_initial_state(rng, plant.n) for _ in range(num_runs)])
    trajs = [sample_trajectory(rng) for _ in range(num_runs)]
    a = np.array([tr.a for tr in trajs])
    b = np.array([tr.b for tr in trajs])
    c = np.array([tr.c for tr in trajs])

    report = {
        "config": {
            "num_runs": num_runs,
            "t_final": t_final,
            "dt": dt,
            "seed": seed,
            "skip_transient": skip_transient,
            "gains": {
                name: {"k_e": cc.k_e, "k_s": cc.k_s, "gamma": cc.gamma, "theta_bar": cc.theta_bar}
                for name, cc in ctrls.items()
            },
        },
        "runs": {
            "x0": x0.tolist(),
            "a": a.tolist(),
            "b": b.tolist(),
            "c": c.tolist(),
        },
        "architectures": {},
    }
    for name, approx in approximators.items():
        theta0 = np.tile(np.asarray(theta0s[name], dtype=float), (num_runs, 1))
        res = run_batch(
            approx,
            theta0,
            x0,
            a,
            b,
            c,
            ctrls[name],
            plant,
            dt,
            t_final,
            cost_horizon=min(60.0, t_final),
            skip_transient=skip_transient,
        )
        ok = ~res["diverged"]
        rows = [
            {
                "run": r,
                "avg_e_norm": float(res["avg_e_norm"][r]),
                "avg_f_err_norm": float(res["avg_f_err_norm"][r]),
                "diverged": bool(res["diverged"][r]),
            }
            for r in range(num_runs)
        ]
        e_vals = res["avg_e_norm"][ok]
        f_vals = res["avg_f_err_norm"][ok]
        report["architectures"][name] = {
            "rows": rows,
            "num_diverged": int(np.sum(~ok)),
            "mean_e_norm": float(np.mean(e_vals)) if e_vals.size else None,
            "std_e_norm": float(np.std(e_vals, ddof=1)) if e_vals.size >= 2 else None,
            "mean_f_err_norm": float(np.mean(f_vals)) if f_vals.size else None,
            "std_f_err_norm": float(np.std(f_vals, ddof=1)) if f_vals.size >= 2 else None,
        }
    return report


def write_report(report: dict, path):
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")


def write_comparison_runs(approximators, theta0s, report, ctrl, plant, out_dir, chunk: int = 5):
    """Replay the comparison runs with full logging and emit one CSV per run."""
    from pathlib import Path

    from .sim import CSV_HEADER

    ctrls = ctrl if isinstance(ctrl, dict) else {name: ctrl for name in approximators}

    out_dir = Path(out_dir)
    cfg = report["config"]
    runs = report["runs"]
    x0 = np.asarray(runs["x0"], dtype=float)
    a = np.asarray(runs["a"], dtype=float)
    b = np.asarray(runs["b"], dtype=float)
    c = np.asarray(runs["c"], dtype=float)
    for name, approx in approximators.items():
        theta0 = np.asarray(theta0s[name], dtype=float)
        for lo in range(0, cfg["num_runs"], chunk):
            hi = min(lo + chunk, cfg["num_runs"])
            res = run_batch(
                approx,
                np.tile(theta0, (hi - lo, 1)),
                x0[lo:hi],
                a[lo:hi],
                b[lo:hi],
                c[lo:hi],
                ctrls[name],
                plant,
                cfg["dt"],
                cfg["t_final"],
                cost_horizon=min(60.0, cfg["t_final"]),
                collect="full",
            )
            s = res["series"]
            for r in range(lo, hi):
                i = r - lo
                cols = np.column_stack(
                    [
                        s["t"],
                        s["x"][i],
                        s["e_norm"][i],
                        s["f_err_norm"][i],
                        s["u_norm"][i],
                        s["theta_norm"][i],
                    ]
                )
                with open(out_dir / f"{name}_run{r:03d}.csv", "w") as fh:
                    fh.write(CSV_HEADER + "\n")
                    for row in cols:
                        fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
