#!/usr/bin/env python3
"""Render the CSVs produced by reproduce_figures.py as PNGs (needs matplotlib)."""

import argparse
import csv
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def plot_cdf(results_dir, out_dir):
    rows = read_rows(results_dir / "cdf" / "cdf_points.csv")
    fig, ax = plt.subplots(figsize=(6, 4.5))
    curves = defaultdict(list)
    for row in rows:
        curves[(row["method"], float(row["alpha"]))].append(
            (float(row["sum_rate_bps_hz"]), float(row["cdf"])))
    for (method, alpha), pts in sorted(curves.items()):
        xs, ys = zip(*pts)
        ax.plot(xs, ys, label=f"{method}, alpha={alpha:g}")
    ax.set_xlabel("sum rate (bits/s/Hz)")
    ax.set_ylabel("CDF")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_dir / "cdf.png", dpi=150)


def plot_sweep(path, xlabel, out_png):
    rows = read_rows(path)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    curves = defaultdict(list)
    for row in rows:
        curves[(row["method"], float(row["alpha"]))].append(
            (float(row["value"]), float(row["mean"]), float(row["stderr"])))
    for (method, alpha), pts in sorted(curves.items()):
        xs, ys, es = zip(*sorted(pts))
        ax.errorbar(xs, ys, yerr=es, marker="o", capsize=3,
                    label=f"{method}, alpha={alpha:g}")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("mean sum rate (bits/s/Hz)")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_png, dpi=150)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--results", default="results")
    args = ap.parse_args()
    results = Path(args.results)

    if (results / "cdf" / "cdf_points.csv").exists():
        plot_cdf(results, results)
    for name, xlabel in (("sweep_g", "movable region size G"),
                         ("sweep_g_l3", "movable region size G"),
                         ("sweep_l", "number of channel paths L")):
        csv_path = results / name / f"sweep_{name.split('_')[1]}.csv"
        if csv_path.exists():
            plot_sweep(csv_path, xlabel, results / f"{name}.png")
    print(f"figures written under {results}/")


if __name__ == "__main__":
    main()
