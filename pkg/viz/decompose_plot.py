#!/usr/bin/env python3
"""Grid of learned per-edge activation functions.

Usage: decompose_plot.py <dir> [--out fig.png]

Reads every edge_l{l}_j{j}_i{i}.csv in the directory (as written by the
`decompose` command) and draws one small panel per edge, grouped by layer.
"""
import argparse
import csv
import re
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

EDGE_RE = re.compile(r"edge_l(\d+)_j(\d+)_i(\d+)\.csv$")


def load_edges(directory):
    """Return [(l, j, i, eta, phi)] sorted by layer, then target, then source."""
    directory = Path(directory)
    edges = []
    for path in sorted(directory.glob("edge_l*_j*_i*.csv")):
        m = EDGE_RE.search(path.name)
        if not m:
            continue
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["eta", "phi_value"]:
                raise ValueError(f"{path}: unexpected header {header!r}")
            rows = np.array([[float(a), float(b)] for a, b in reader])
        if rows.size == 0:
            raise ValueError(f"{path}: no data rows")
        l, j, i = (int(g) for g in m.groups())
        edges.append((l, j, i, rows[:, 0], rows[:, 1]))
    if not edges:
        raise FileNotFoundError(f"no edge_l*_j*_i*.csv files in {directory}")
    edges.sort(key=lambda e: e[:3])
    return edges


def render(directory):
    edges = load_edges(directory)
    n = len(edges)
    ncols = int(np.ceil(np.sqrt(n)))
    nrows = int(np.ceil(n / ncols))
    fig, axes = plt.subplots(nrows, ncols, figsize=(2.0 * ncols, 1.6 * nrows), squeeze=False)
    flat_axes = axes.ravel()
    for ax, (l, j, i, eta, phi) in zip(flat_axes, edges):
        ax.plot(eta, phi, linewidth=0.9)
        ax.set_title(rf"$\hat\varphi_{{{l},{j},{i}}}$", fontsize=7)
        ax.tick_params(labelsize=5)
    for ax in flat_axes[n:]:
        ax.axis("off")
        fig.delaxes(ax)
    fig.tight_layout()
    return fig


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("directory", help="directory of edge CSVs")
    parser.add_argument("--out", default="fig.png", help="output image path")
    args = parser.parse_args(argv)
    try:
        fig = render(args.directory)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    fig.savefig(args.out, dpi=150)
    plt.close(fig)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
