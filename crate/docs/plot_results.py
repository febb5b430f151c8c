#!/usr/bin/env python3
"""Render the standard figures from linc CSV exports.

Inputs are whichever of the three tables you have:

  * ``linc model --out model.csv``    -> theory curves
  * ``linc sim   --out sim.csv``      -> measured points (mean +/- stderr)
  * ``linc optimize --out surface.csv`` -> goodput-ratio surface

Produces up to four PNGs in --out-dir: aggregate packet rate vs code
rate, retransmission rate vs code rate, mean end-to-end delay vs code
rate, and the (k, n) goodput-ratio surface with its optimum marked.

Usage:
    python3 docs/plot_results.py --model model.csv --sim sim.csv \
        --surface surface.csv --out-dir figures/
"""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd


def sim_mean_stderr(sim: pd.DataFrame) -> pd.DataFrame:
    """Aggregate rows (link_id == all) with their mean/stderr columns joined."""
    rows = sim[sim["link_id"] == "all"]
    mean = rows[rows["seed"] == "mean"].copy()
    err = rows[rows["seed"] == "stderr"]
    keys = ["epsilon", "k", "n"]
    return mean.merge(err, on=keys, suffixes=("", "_se"))


def eps_label(eps: float) -> str:
    return f"loss {eps:g}"


def plot_vs_rate(sim, model, column, se_column, theory_column, ylabel, path,
                 logy=False, uncoded_column=None):
    """One curve per loss probability: sim errorbars, model line overlay."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    eps_values = sorted(sim["epsilon"].unique()) if sim is not None else \
        sorted(model["epsilon"].unique())
    colors = plt.cm.viridis(np.linspace(0.0, 0.85, len(eps_values)))
    for eps, color in zip(eps_values, colors):
        if model is not None and theory_column is not None:
            m = model[np.isclose(model["epsilon"], eps)].sort_values("n")
            if not m.empty:
                ax.plot(m["n"] / m["k"], m[theory_column], "-", color=color,
                        lw=1.2, label=f"{eps_label(eps)} (theory)")
                if uncoded_column is not None:
                    ax.plot(m["n"] / m["k"], m[uncoded_column], ":",
                            color=color, lw=1.0)
        if sim is not None:
            s = sim[np.isclose(sim["epsilon"], eps)].sort_values("n")
            if not s.empty:
                ax.errorbar(s["n"] / s["k"], s[column], yerr=s[se_column],
                            fmt="o", ms=3.5, color=color, capsize=2,
                            label=f"{eps_label(eps)} (sim)")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel("code rate n/k")
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    print(f"wrote {path}")


def plot_surface(surface: pd.DataFrame, out_dir: Path):
    for eps in sorted(surface["epsilon"].unique()):
        s = surface[np.isclose(surface["epsilon"], eps)]
        grid = s.pivot(index="n", columns="k", values="goodput_ratio")
        fig, ax = plt.subplots(figsize=(6.0, 5.0))
        mesh = ax.pcolormesh(grid.columns, grid.index, grid.values,
                             shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax, label="goodput ratio (uncoded / coded)")
        best = s.loc[s["goodput_ratio"].idxmax()]
        ax.plot(best["k"], best["n"], "r*", ms=12,
                label=f"optimum k={int(best['k'])} n={int(best['n'])}")
        ax.set_xlabel("data packets per block k")
        ax.set_ylabel("total packets per block n")
        ax.set_title(eps_label(eps))
        ax.legend(loc="lower right", fontsize=8)
        fig.tight_layout()
        path = out_dir / f"surface_eps{eps:g}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        print(f"wrote {path}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", type=Path, help="CSV from `linc model`")
    ap.add_argument("--sim", type=Path, help="CSV from `linc sim`")
    ap.add_argument("--surface", type=Path, help="CSV from `linc optimize`")
    ap.add_argument("--out-dir", type=Path, default=Path("figures"))
    args = ap.parse_args()
    if not (args.model or args.sim or args.surface):
        ap.error("give at least one of --model, --sim, --surface")
    args.out_dir.mkdir(parents=True, exist_ok=True)

    model = pd.read_csv(args.model) if args.model else None
    sim = None
    if args.sim:
        raw = pd.read_csv(args.sim, dtype={"seed": str})
        sim = sim_mean_stderr(raw)
    if model is not None:
        model = model.assign(
            rate_coded=model["lambda_lossy_coded"] + model["lambda_nonlossy_coded"],
            rate_uncoded=model["lambda_lossy_uncoded"]
            + model["lambda_nonlossy_uncoded"],
        )

    if model is not None or sim is not None:
        plot_vs_rate(sim, model, "arrival_rate_pps", "arrival_rate_pps_se",
                     "rate_coded", "aggregate packet rate (pps)",
                     args.out_dir / "aggregate_rate.png",
                     uncoded_column="rate_uncoded")
        plot_vs_rate(sim, model, "retrans_rate", "retrans_rate_se",
                     "retrans_rate_coded", "retransmission rate",
                     args.out_dir / "retrans_rate.png", logy=True)
    if sim is not None:
        plot_vs_rate(sim, None, "mean_delay_s", "mean_delay_s_se", None,
                     "mean end-to-end delay (s)",
                     args.out_dir / "delay.png")
    if args.surface:
        plot_surface(pd.read_csv(args.surface), args.out_dir)


if __name__ == "__main__":
    main()
