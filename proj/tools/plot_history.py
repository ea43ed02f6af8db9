#!/usr/bin/env python3
"""Plot residual histories written by boostconv_bench.

    python3 tools/plot_history.py out/*.history.csv -o residuals.png
    python3 tools/plot_history.py out/burgers-*.history.csv --norm inf --energy
"""

import argparse
import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    cols = {key: [] for key in rows[0]} if rows else {}
    for row in rows:
        for key, value in row.items():
            cols[key].append(float(value) if value != "" else float("nan"))
    return cols


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("histories", nargs="+", type=Path)
    parser.add_argument("--norm", choices=["rel2", "inf"], default="rel2",
                        help="relative 2-norm (linear runs) or absolute inf-norm (Burgers)")
    parser.add_argument("--energy", action="store_true", help="add a panel with energy_l2")
    parser.add_argument("-o", "--output", type=Path, default=Path("history.png"))
    args = parser.parse_args()

    panels = 2 if args.energy else 1
    fig, axes = plt.subplots(1, panels, figsize=(6 * panels, 4), squeeze=False)
    column = "relres2" if args.norm == "rel2" else "resinf"
    for path in args.histories:
        h = load(path)
        label = path.name.removesuffix(".history.csv")
        axes[0][0].semilogy(h["k"], h[column], label=label)
        if args.energy and "energy_l2" in h:
            axes[0][1].semilogy(h["k"], h["energy_l2"], label=label)

    axes[0][0].set_xlabel("iteration k")
    axes[0][0].set_ylabel("|r_k| / |r_0|" if args.norm == "rel2" else "|R(u)|_inf")
    axes[0][0].legend()
    if args.energy:
        axes[0][1].set_xlabel("iteration k")
        axes[0][1].set_ylabel("|u|_L2")
        axes[0][1].legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
