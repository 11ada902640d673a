#!/usr/bin/env python3
"""Render convergence plots from the CSV traces the CLI writes.

Usage:
    python3 scripts/plot_results.py out_benchmark [--output benchmark.png]
    python3 scripts/plot_results.py out_sweep --sweep [--output sweep.png]

The first form plots e^t against iterations (semilog-y) for every per-run
CSV in the directory. The second form reads topology_sweep.csv and draws a
bar chart of iterations-to-threshold per topology (median over seeds).
"""

import argparse
import csv
import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def load_trace(path):
    iters, errors = [], []
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        for row in reader:
            iters.append(int(row["iteration"]))
            errors.append(float(row["error_e_t"]))
    return iters, errors


def plot_traces(directory, output):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for path in sorted(directory.glob("*.csv")):
        if path.name in ("topology_sweep.csv", "dataset.csv"):
            continue
        if path.name.startswith(("w.", "w_tilde")):
            continue
        iters, errors = load_trace(path)
        ax.semilogy(iters, errors, label=path.stem, linewidth=1.2)
    ax.set_xlabel("iteration $t$")
    ax.set_ylabel("$e^t = \\sum_n \\|x_n^t - x^*\\|^2$")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(output, dpi=150)
    print(f"wrote {output}")


def plot_sweep(directory, output):
    rows = []
    with open(directory / "topology_sweep.csv", newline="") as f:
        for row in csv.DictReader(f):
            rows.append(row)
    by_topology = {}
    for row in rows:
        hit = row["hit_iteration"]
        by_topology.setdefault(row["topology"], []).append(
            None if hit == "not_reached" else int(hit)
        )

    labels, medians = [], []
    for topology, hits in by_topology.items():
        reached = sorted(h for h in hits if h is not None)
        labels.append(topology)
        medians.append(reached[len(reached) // 2] if reached else 0)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    bars = ax.bar(labels, medians, color="#4878a8")
    for bar, (topology, hits) in zip(bars, by_topology.items()):
        if all(h is None for h in hits):
            ax.text(bar.get_x() + bar.get_width() / 2, 10, "not reached",
                    ha="center", rotation=90, color="crimson")
    ax.set_ylabel("median iterations to threshold")
    ax.tick_params(axis="x", rotation=20)
    fig.tight_layout()
    fig.savefig(output, dpi=150)
    print(f"wrote {output}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("directory", type=pathlib.Path)
    parser.add_argument("--sweep", action="store_true",
                        help="plot topology_sweep.csv instead of run traces")
    parser.add_argument("--output", type=pathlib.Path, default=None)
    args = parser.parse_args()

    if not args.directory.is_dir():
        sys.exit(f"not a directory: {args.directory}")
    output = args.output or args.directory / (
        "sweep.png" if args.sweep else "convergence.png"
    )
    if args.sweep:
        plot_sweep(args.directory, output)
    else:
        plot_traces(args.directory, output)


if __name__ == "__main__":
    main()
