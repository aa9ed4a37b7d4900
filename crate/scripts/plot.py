#!/usr/bin/env python3
"""Plot the CSV tables written by `mogp`.

    python3 scripts/plot.py out/           # every table found in out/
    python3 scripts/plot.py out/ -o figs/  # save PNGs instead of showing

Needs matplotlib.
"""
import argparse
import csv
import math
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib

if "--output" in sys.argv or "-o" in sys.argv:
    matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    for r in rows:
        for k, v in r.items():
            try:
                r[k] = float(v)
            except (TypeError, ValueError):
                pass
    return rows


def group(rows, *keys):
    out = defaultdict(list)
    for r in rows:
        out[tuple(r[k] for k in keys)].append(r)
    return out


def histogram(rows, ax):
    for (model, source), rs in sorted(group(rows, "model", "source").items()):
        ax.plot([r["bin_center"] for r in rs], [r["density"] for r in rs],
                "-" if source == "finite" else "--", label=f"{model} ({source})")
    ax.set(xlabel="output", ylabel="density", title="Output density")


def tail(rows, ax):
    for (model, source), rs in sorted(group(rows, "model", "source").items()):
        ax.loglog([r["u"] for r in rs], [r["survival"] for r in rs],
                  "-" if source == "finite" else "--", label=f"{model} ({source})")
    ax.set(xlabel="u", ylabel="P(|Z| > u)", title="Output tail")


def output_corr(rows, ax):
    for (model,), rs in sorted(group(rows, "model").items()):
        ax.errorbar([r["width"] for r in rs], [r["corr"] for r in rs],
                    yerr=[r["corr_se"] for r in rs], marker="o", capsize=3, label=model)
    ax.set(xscale="log", xlabel="width", ylabel="corr(Z1², Z2²)", title="Squared-output correlation")


def max_weight_cdf(rows, ax):
    for (model, width), rs in sorted(group(rows, "model", "width").items()):
        line, = ax.plot([r["w"] for r in rs], [r["ecdf"] for r in rs], label=f"{model} p={int(width)}")
        if not math.isnan(rs[0]["limit_cdf"]) and width == max(r["width"] for r in rows if r["model"] == model):
            ax.plot([r["w"] for r in rs], [r["limit_cdf"] for r in rs], "--", color=line.get_color())
    ax.set(xscale="log", xlabel="w", ylabel="P(max |W| ≤ w)", title="Largest weight")


def truncation_error(rows, ax):
    last = max(r["layer"] for r in rows)
    for (alpha,), rs in sorted(group([r for r in rows if r["layer"] == last], "alpha").items()):
        line = ax.errorbar([r["eps"] for r in rs], [r["error"] for r in rs],
                           yerr=[2 * r["error_se"] for r in rs], marker="o", capsize=3, label=f"α={alpha}")
        ax.plot([r["eps"] for r in rs], [r["bound"] for r in rs], ":", color=line[0].get_color())
    ax.set(xscale="log", yscale="log", xlabel="ε", ylabel="E[(Z − Z*)²]", title=f"ε-pruning error, layer {int(last)}")


def kernel_realizations(rows, ax):
    for (model, draw), rs in sorted(group(rows, "model", "draw").items()):
        ax.plot([r["rho"] for r in rs], [r["k2"] for r in rs], lw=0.6, alpha=0.6)
    for (model,), rs in group(rows, "model").items():
        first = [r for r in rs if r["draw"] == rs[0]["draw"]]
        ax.plot([r["rho"] for r in first], [r["gp_kernel"] for r in first], "k--", lw=2)
    ax.set(xlabel="ρ", ylabel="K(x, x′)", title="Random kernel draws (dashed: GP kernel)")


def compressibility(rows, ax):
    for (model,), rs in sorted(group(rows, "model").items()):
        ax.errorbar([r["width"] for r in rs], [r["lambda_ratio"] for r in rs],
                    yerr=[r["lambda_ratio_se"] for r in rs], marker="o", capsize=3, label=model)
    ax.set(xscale="log", xlabel="width", ylabel="pruned mass fraction", title="κ-pruning mass ratio")


PLOTS = {
    "histogram": histogram,
    "tail": tail,
    "output_corr": output_corr,
    "max_weight_cdf": max_weight_cdf,
    "truncation_error": truncation_error,
    "kernel_realizations": kernel_realizations,
    "compressibility": compressibility,
}


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("dirs", nargs="+", type=Path, help="output directories of mogp runs")
    ap.add_argument("-o", "--output", type=Path, help="write PNGs here instead of opening windows")
    args = ap.parse_args()
    found = 0
    for d in args.dirs:
        for name, plot in PLOTS.items():
            path = d / f"{name}.csv"
            if not path.exists():
                continue
            found += 1
            fig, ax = plt.subplots(figsize=(7, 4.5))
            plot(read(path), ax)
            if ax.get_legend_handles_labels()[0]:
                ax.legend(fontsize=7)
            fig.tight_layout()
            if args.output:
                args.output.mkdir(parents=True, exist_ok=True)
                fig.savefig(args.output / f"{d.name}_{name}.png", dpi=130)
                plt.close(fig)
    if not found:
        sys.exit("no known CSV tables found")
    if not args.output:
        plt.show()


if __name__ == "__main__":
    main()
