#!/usr/bin/env python3
"""Overlay moving-RMS tracking-error and approximation-error traces.

Usage: plot.py <run_dir> [<run_dir> ...] [--window 1.0] [--out fig.png]

Each run directory must contain a run.csv written by the simulator. One curve
per directory is drawn in each panel, labeled by the directory name (or by the
approximator recorded in summary.json when present).
"""
import argparse
import json
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from series import load_run_csv, moving_rms


def run_label(run_dir):
    summary = Path(run_dir) / "summary.json"
    if summary.exists():
        try:
            name = json.loads(summary.read_text()).get("approximator")
            if name:
                return str(name)
        except (ValueError, OSError):
            pass
    return Path(run_dir).name


def render(run_dirs, window):
    fig, (ax_e, ax_f) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    for run_dir in run_dirs:
        data = load_run_csv(Path(run_dir) / "run.csv")
        label = run_label(run_dir)
        ax_e.plot(data["t"], moving_rms(data["e_norm"], data["t"], window), label=label)
        ax_f.plot(data["t"], moving_rms(data["f_err_norm"], data["t"], window), label=label)
    ax_e.set_ylabel(f"RMS ||e|| ({window:g} s window)")
    ax_f.set_ylabel(f"RMS ||f - phi|| ({window:g} s window)")
    ax_f.set_xlabel("t (s)")
    for ax in (ax_e, ax_f):
        ax.grid(True, alpha=0.3)
        ax.legend()
    fig.tight_layout()
    return fig


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("run_dirs", nargs="+", help="run directories containing run.csv")
    parser.add_argument("--window", type=float, default=1.0, help="moving-RMS window in seconds")
    parser.add_argument("--out", default="fig.png", help="output image path")
    args = parser.parse_args(argv)
    try:
        fig = render(args.run_dirs, args.window)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    fig.savefig(args.out, dpi=150)
    plt.close(fig)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
