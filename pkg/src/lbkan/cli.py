"""Command line entry point: run / mc-init / compare / decompose.

Configuration precedence is CLI flag > config-file key > built-in default,
where the built-in defaults are the published experiment parameters. The
fully resolved configuration is echoed to config.json in every output
directory. Exit codes: 0 ok, 2 usage, 3 diverged, 4 I/O.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .control import ControllerConfig
from .dnn import MlpApproximator
from .experiments import McConfig, McFailedError, compare, mc_init, write_comparison_runs, write_report
from .kan import KanApproximator, KanParams, default_shape, edge_activation
from .plant import PlantSpec, Trajectory, sample_initial_state, sample_trajectory
from .serialize import load_params, save_params
from .sim import SimConfig, SimulationDiverged, run, write_runlog_csv, write_summary_json

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DIVERGED = 3
EXIT_IO = 4

DEFAULTS = {
    "dt": 0.001,
    "t_final": 100.0,
    "grid_size": 5,
    "spline_order": 3,
    "shape": "4,6,4,4",
    "dnn_widths": "4,5,5,5,4",
    "domain": 10.0,  # spline core domain is [-domain, domain]
    "k_e": 11.0,
    "k_s": 0.01,
    "gamma": 4.2,
    "gamma_dnn": 6.0,
    "theta_bar": 5.0,
    "proj_eps": 0.1,
    "sgn_smoothing_delta": 0.01,
    "smooth_sgn": False,
    "seed": 0,
    "approximator": "kan",
    "num_candidates": 100,
    "mc_horizon": 60.0,
    "runs": 20,
    "skip_transient": 0.0,
    "out": "out",
    "params": None,
    "decompose_points": 512,
}

_TYPES = {k: type(v) for k, v in DEFAULTS.items() if v is not None}
_TYPES.update({"params": str})


class UsageError(Exception):
    pass


def _coerce(key: str, value: str):
    ty = _TYPES[key]
    try:
        if ty is bool:
            if value.lower() in ("1", "true", "yes", "on"):
                return True
            if value.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
        return ty(value)
    except ValueError:
        raise UsageError(f"malformed value for key '{key}': {value!r}")


def read_config_file(path) -> dict:
    """Plain key=value lines; '#' starts a comment; unknown keys rejected."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}")
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{lineno}: unknown key '{key}'")
        out[key] = _coerce(key, value)
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lbkan", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("run", "single closed-loop simulation"),
        ("mc-init", "Monte Carlo initial-weight selection"),
        ("compare", "paired KAN vs DNN comparison statistics"),
        ("decompose", "sample every learned edge activation over the grid domain"),
    ]:
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", help="key=value config file")
        for key, default in DEFAULTS.items():
            flag = "--" + key
            if isinstance(default, bool):
                sp.add_argument(flag, default=None, type=str)
            else:
                sp.add_argument(flag, default=None, type=str)
        sp.add_argument("--full", action="store_true", help="use 1000 Monte Carlo candidates")
    return p


def resolve_config(args) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(read_config_file(args.config))
    for key in DEFAULTS:
        val = getattr(args, key.replace("-", "_"))
        if val is not None:
            cfg[key] = _coerce(key, val)
    if args.full:
        cfg["num_candidates"] = 1000
    _validate(cfg)
    return cfg


def _validate(cfg: dict):
    if cfg["k_e"] <= 0:
        raise UsageError(f"out-of-range gain 'k_e': {cfg['k_e']} (must be > 0)")
    if cfg["k_s"] < 0:
        raise UsageError(f"out-of-range gain 'k_s': {cfg['k_s']} (must be >= 0)")
    if cfg["gamma"] <= 0:
        raise UsageError(f"out-of-range gain 'gamma': {cfg['gamma']} (must be > 0)")
    if cfg["theta_bar"] <= 0:
        raise UsageError(f"out-of-range 'theta_bar': {cfg['theta_bar']} (must be > 0)")
    if cfg["dt"] <= 0 or cfg["t_final"] < cfg["dt"]:
        raise UsageError("out-of-range 'dt'/'t_final'")
    if cfg["approximator"] not in ("kan", "dnn"):
        raise UsageError(f"unknown approximator '{cfg['approximator']}'")


def _parse_widths(text: str):
    try:
        widths = tuple(int(s) for s in text.split(","))
    except ValueError:
        raise UsageError(f"malformed width list {text!r}")
    if len(widths) < 2 or any(w < 1 for w in widths):
        raise UsageError(f"invalid width list {text!r}")
    return widths


def make_approximator(cfg: dict, kind: str):
    if kind == "kan":
        shape = default_shape(
            _parse_widths(cfg["shape"]),
            G=cfg["grid_size"],
            k=cfg["spline_order"],
            lo=-cfg["domain"],
            hi=cfg["domain"],
        )
        return KanApproximator(shape)
    return MlpApproximator(_parse_widths(cfg["dnn_widths"]))


def make_controller(cfg: dict) -> ControllerConfig:
    return ControllerConfig(
        k_e=cfg["k_e"],
        k_s=cfg["k_s"],
        gamma=cfg["gamma"],
        theta_bar=cfg["theta_bar"],
        proj_eps=cfg["proj_eps"],
        smooth_sgn=cfg["smooth_sgn"],
        sgn_delta=cfg["sgn_smoothing_delta"],
    )


def _echo_config(cfg: dict, out_dir: Path, created):
    path = out_dir / "config.json"
    with open(path, "w") as fh:
        json.dump(cfg, fh, indent=2, sort_keys=True)
        fh.write("\n")
    created.append(path)


def cmd_run(cfg: dict, out_dir: Path, created) -> int:
    approx = make_approximator(cfg, cfg["approximator"])
    ctrl = make_controller(cfg)
    plant = PlantSpec()
    rng = np.random.default_rng(cfg["seed"])
    traj = sample_trajectory(rng)
    x0 = sample_initial_state(rng, plant.n)
    if cfg["params"]:
        theta0 = load_params(cfg["params"])
    else:
        theta0 = approx.init_params(rng, 1)[0]
    sim_cfg = SimConfig(dt=cfg["dt"], t_final=cfg["t_final"], seed=cfg["seed"])
    log = run(approx, theta0, x0, traj, ctrl, plant, sim_cfg, seed=cfg["seed"])
    csv_path = out_dir / "run.csv"
    created.append(csv_path)
    write_runlog_csv(log, csv_path)
    summary_path = out_dir / "summary.json"
    created.append(summary_path)
    write_summary_json(log, summary_path)
    print(f"run: {log.t.size} records, avg |e| = {log.summary['avg_e_norm']:.4g}")
    return EXIT_OK


def cmd_mc_init(cfg: dict, out_dir: Path, created) -> int:
    approx = make_approximator(cfg, cfg["approximator"])
    ctrl = make_controller(cfg)
    mc_cfg = McConfig(num_candidates=cfg["num_candidates"], horizon=cfg["mc_horizon"], seed=cfg["seed"])
    theta0, costs, best = mc_init(approx, mc_cfg, ctrl, PlantSpec(), dt=cfg["dt"])
    theta_path = out_dir / "theta0.csv"
    created.append(theta_path)
    save_params(theta0, theta_path)
    cost_path = out_dir / "costs.csv"
    created.append(cost_path)
    with open(cost_path, "w") as fh:
        fh.write("candidate,cost\n")
        for i, v in enumerate(costs):
            fh.write(f"{i},{v:.17g}\n")
    print(f"mc-init: best candidate {best}, cost {costs[best]:.6g}")
    return EXIT_OK


def cmd_compare(cfg: dict, out_dir: Path, created) -> int:
    plant = PlantSpec()
    approxes = {
        "kan": make_approximator(cfg, "kan"),
        "dnn": make_approximator(cfg, "dnn"),
    }
    ctrls = {
        "kan": make_controller(cfg),
        "dnn": make_controller({**cfg, "gamma": cfg["gamma_dnn"]}),
    }
    mc_cfg = McConfig(num_candidates=cfg["num_candidates"], horizon=cfg["mc_horizon"], seed=cfg["seed"])
    theta0s = {}
    for name, approx in approxes.items():
        theta0s[name], _, _ = mc_init(approx, mc_cfg, ctrls[name], plant, dt=cfg["dt"])
    report = compare(
        approxes,
        theta0s,
        ctrls,
        plant,
        num_runs=cfg["runs"],
        t_final=cfg["t_final"],
        dt=cfg["dt"],
        seed=cfg["seed"],
        skip_transient=cfg["skip_transient"],
    )
    report_path = out_dir / "report.json"
    created.append(report_path)
    write_report(report, report_path)
    for name in approxes:
        for r in range(cfg["runs"]):
            created.append(out_dir / f"{name}_run{r:03d}.csv")
    write_comparison_runs(approxes, theta0s, report, ctrls, plant, out_dir)
    for name, stats in report["architectures"].items():
        print(
            f"{name}: |e| = {stats['mean_e_norm']:.4g} +/- {stats['std_e_norm']:.4g}, "
            f"|f-phi| = {stats['mean_f_err_norm']:.4g} +/- {stats['std_f_err_norm']:.4g}"
        )
    return EXIT_OK


def cmd_decompose(cfg: dict, out_dir: Path, created) -> int:
    approx = make_approximator(cfg, "kan")
    shape = approx.shape
    if cfg["params"]:
        params = KanParams.from_flat(shape, load_params(cfg["params"]))
    else:
        rng = np.random.default_rng(cfg["seed"])
        params = KanParams.from_flat(shape, approx.init_params(rng, 1)[0])
    eta = np.linspace(shape.grid.lo, shape.grid.hi, cfg["decompose_points"])
    count = 0
    for l in range(shape.num_layers):
        for j in range(shape.layer_widths[l + 1]):
            for i in range(shape.layer_widths[l]):
                phi = edge_activation(shape, params, l, j, i, eta)
                path = out_dir / f"edge_l{l + 1}_j{j + 1}_i{i + 1}.csv"
                created.append(path)
                with open(path, "w") as fh:
                    fh.write("eta,phi_value\n")
                    for xv, yv in zip(eta, phi):
                        fh.write(f"{xv:.17g},{yv:.17g}\n")
                count += 1
    print(f"decompose: wrote {count} edge files")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    created = []
    out_dir = None
    try:
        cfg = resolve_config(args)
        cfg["command"] = args.command
        out_dir = Path(cfg["out"])
        out_dir.mkdir(parents=True, exist_ok=True)
        _echo_config(cfg, out_dir, created)
        handler = {
            "run": cmd_run,
            "mc-init": cmd_mc_init,
            "compare": cmd_compare,
            "decompose": cmd_decompose,
        }[args.command]
        return handler(cfg, out_dir, created)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        _cleanup(created)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        _cleanup(created)
        return EXIT_USAGE
    except (SimulationDiverged, McFailedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        _cleanup(created)
        return EXIT_DIVERGED
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        _cleanup(created)
        return EXIT_IO


def _cleanup(created):
    for path in created:
        try:
            Path(path).unlink(missing_ok=True)
        except OSError:
            pass


if __name__ == "__main__":
    sys.exit(main())
