#!/usr/bin/env python3
"""Reproduce the headline dynamics and reconcile simulation with the closed form.

Runs a seeded ensemble of the default 40x40 news automaton, reports the
convergence window, stabilization ratio and three-curve cross point, fits
logistic curves to the ensemble mean, and prints a side-by-side table of
simulated, fitted and built-in reference curves. Optionally saves a plot.

Usage:
    python scripts/reproduce_dynamics.py --runs 100 --seed 42 --outdir out --plot
"""
import argparse
import sys
from pathlib import Path

import numpy as np

from newsca import (
    SimulationConfig,
    cross_point,
    eval_black,
    eval_grey,
    eval_white,
    fit_model,
    reference_model,
    run_ensemble,
    stabilization_ratio,
)
from newsca.cli import write_convergence_csv, write_mean_series_csv


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--runs", type=int, default=100)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--outdir", type=Path, default=Path("out"))
    parser.add_argument("--plot", action="store_true", help="save curves.png (needs matplotlib)")
    args = parser.parse_args(argv)

    args.outdir.mkdir(parents=True, exist_ok=True)
    config = SimulationConfig(rng_seed=args.seed)
    print(f"running {args.runs} seeded simulations of the default "
          f"{config.width}x{config.height} field...")
    result = run_ensemble(config, args.runs, jobs=args.jobs)
    mean = result.mean_fractions

    stats = result.convergence_stats()
    print(f"convergence steps: min={stats[0]:g} median={stats[1]:g} max={stats[2]:g} "
          f"({len(result.unconverged)} unconverged)")
    grey, white, black = stabilization_ratio(mean)
    print(f"stabilization grey:white:black = {grey:.4f} : {white:.4f} : {black:g}")
    cp = cross_point(mean)
    print(f"cross point: step={cp.step} level={cp.level:.4f} spread={cp.spread:.4f}")

    steps = np.arange(len(mean), dtype=float)
    fit = fit_model(steps, mean[:, 1], mean[:, 0])
    if fit.model is None:
        print("fit failed:", fit.grey.message or fit.white.message, file=sys.stderr)
        return 1
    print(f"fitted grey:  c={fit.model.grey.c:.4f} tau={fit.model.grey.tau:.2f} "
          f"gamma={fit.model.grey.gamma:.4f} (rmse {fit.grey.rmse:.4f})")
    print(f"fitted white: c={fit.model.white.c:.4f} tau={fit.model.white.tau:.2f} "
          f"gamma={fit.model.white.gamma:.4f} (rmse {fit.white.rmse:.4f})")
    print(f"implied black rmse: {fit.black_rmse:.4f}")

    ref = reference_model()
    print(f"\n{'step':>5} {'sim g/w/b':>26} {'fit g/w/b':>26} {'reference g/w/b':>26}")
    for t in range(0, min(len(mean), 121), 10):
        sim = f"{mean[t, 1]:.3f}/{mean[t, 0]:.3f}/{mean[t, 2]:.3f}"
        fitted = f"{eval_grey(t, fit.model):.3f}/{eval_white(t, fit.model):.3f}/{eval_black(t, fit.model):.3f}"
        refv = f"{eval_grey(t, ref):.3f}/{eval_white(t, ref):.3f}/{eval_black(t, ref):.3f}"
        print(f"{t:>5} {sim:>26} {fitted:>26} {refv:>26}")

    write_mean_series_csv(args.outdir / "mean_series.csv", mean)
    write_convergence_csv(args.outdir / "convergence.csv", result)
    print(f"\nwrote {args.outdir / 'mean_series.csv'} and {args.outdir / 'convergence.csv'}")

    if args.plot:
        try:
            import matplotlib
            matplotlib.use("Agg")
            import matplotlib.pyplot as plt
        except ImportError:
            print("matplotlib is not installed; skipping the plot", file=sys.stderr)
            return 0
        fig, ax = plt.subplots(figsize=(8, 5))
        t = np.arange(len(mean))
        ax.plot(t, mean[:, 1], "k-", lw=1, label="grey (simulated)")
        ax.plot(t, mean[:, 0], "k--", lw=1, label="white (simulated)")
        ax.plot(t, mean[:, 2], "k-", lw=2.5, label="black (simulated)")
        tt = np.linspace(0, len(mean) - 1, 400)
        ax.plot(tt, eval_grey(tt, fit.model), "g-", alpha=0.6, label="grey (fitted)")
        ax.plot(tt, eval_white(tt, fit.model), "g--", alpha=0.6, label="white (fitted)")
        ax.plot(tt, eval_black(tt, fit.model), "g-", alpha=0.6, lw=2.5, label="black (fitted)")
        ax.set_xlabel("step")
        ax.set_ylabel("fraction of field")
        ax.set_xlim(0, 120)
        ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(args.outdir / "curves.png", dpi=150)
        print(f"wrote {args.outdir / 'curves.png'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
