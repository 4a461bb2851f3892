"""Command-line front-end: simulate, ensemble, eval-model, fit.

Every command writes a JSON manifest next to its outputs; re-running a
command from its manifest reproduces the outputs byte for byte. Exit codes:
0 success, 1 usage, 2 I/O or malformed input, 3 non-convergence, 4 fit
failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import cross_point, normalize, stabilization_ratio
from .engine import (
    GENERATOR_NAME,
    EnsembleResult,
    SimulationConfig,
    Trajectory,
    run,
    run_ensemble,
)
from .grid import ADOPTION_CHARS, NEWS_CHARS, Boundary, Grid, grid_to_text
from .model import (
    AnalyticModel,
    FitResult,
    LogisticParams,
    eval_black,
    eval_grey,
    eval_white,
    fit_model,
    reference_model,
)
from .rules import InnovationRuleParams, NewsRuleParams

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NO_CONVERGENCE = 3
EXIT_FIT_FAILURE = 4

OUTDIR_ENV = "NEWSCA_OUTDIR"

# Greyscale levels for portable graymap snapshots, indexed by cell code.
NEWS_PGM_LEVELS = np.array([255, 128, 0], dtype=np.int64)
ADOPTION_PGM_LEVELS = np.array([255, 0], dtype=np.int64)


class CsvFormatError(ValueError):
    """Malformed series CSV; carries the 1-based offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


# ---------------------------------------------------------------------------
# manifest

def config_to_dict(config: SimulationConfig) -> dict:
    if isinstance(config.rule_params, NewsRuleParams):
        model = "news"
        rule = {
            "adoption_threshold": config.rule_params.adoption_threshold,
            "boost_factor": config.rule_params.boost_factor,
            "boost_below": config.rule_params.boost_below,
        }
    else:
        model = "innovation"
        rule = {"threshold": config.rule_params.threshold}
    return {
        "width": config.width,
        "height": config.height,
        "seed_position": list(config.seed_position) if config.seed_position else None,
        "boundary": config.boundary.value,
        "rng_seed": config.rng_seed,
        "max_steps": config.max_steps,
        "snapshot_every": config.snapshot_every,
        "model": model,
        "rule_params": rule,
    }


def config_from_dict(d: dict) -> SimulationConfig:
    rule = d["rule_params"]
    if d["model"] == "news":
        params: NewsRuleParams | InnovationRuleParams = NewsRuleParams(
            adoption_threshold=rule["adoption_threshold"],
            boost_factor=rule["boost_factor"],
            boost_below=rule["boost_below"],
        )
    elif d["model"] == "innovation":
        params = InnovationRuleParams(threshold=rule["threshold"])
    else:
        raise ValueError(f"unknown model {d['model']!r}")
    seed_position = tuple(d["seed_position"]) if d["seed_position"] else None
    return SimulationConfig(
        width=d["width"],
        height=d["height"],
        seed_position=seed_position,
        boundary=Boundary(d["boundary"]),
        rng_seed=d["rng_seed"],
        max_steps=d["max_steps"],
        rule_params=params,
        snapshot_every=d["snapshot_every"],
    )


def build_manifest(command: str, config: SimulationConfig | None = None, **extras) -> dict:
    manifest = {
        "artifact": "newsca",
        "version": __version__,
        "rng": GENERATOR_NAME,
        "command": command,
    }
    if config is not None:
        manifest["config"] = config_to_dict(config)
    manifest.update(extras)
    return manifest


def save_manifest(path: Path, manifest: dict) -> None:
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def load_manifest(path: Path) -> dict:
    return json.loads(path.read_text())


# ---------------------------------------------------------------------------
# file formats

def write_series_csv(path: Path, counts: np.ndarray, field_size: int) -> None:
    """Per-step counts plus 9-significant-digit fractions."""
    lines = ["step,white,grey,black,white_frac,grey_frac,black_frac"]
    for t, (w, g, b) in enumerate(counts):
        fw, fg, fb = (v / field_size for v in (w, g, b))
        lines.append(f"{t},{w},{g},{b},{fw:.9g},{fg:.9g},{fb:.9g}")
    path.write_text("\n".join(lines) + "\n")


def write_mean_series_csv(path: Path, mean_fractions: np.ndarray) -> None:
    """Ensemble-mean fractions at full precision (they feed the fitter)."""
    lines = ["step,white_frac,grey_frac,black_frac"]
    for t, (w, g, b) in enumerate(mean_fractions):
        lines.append(f"{t},{w:.17g},{g:.17g},{b:.17g}")
    path.write_text("\n".join(lines) + "\n")


def write_convergence_csv(path: Path, result: EnsembleResult) -> None:
    lines = ["run,seed,converged_at,black_extinct_at,steps,final_white_frac,final_grey_frac,final_black_frac"]
    for i, tr in enumerate(result.trajectories):
        conv = "" if tr.converged_at is None else tr.converged_at
        ext = "" if tr.black_extinct_at is None else tr.black_extinct_at
        fw, fg, fb = tr.counts[-1] / result.config.field_size
        lines.append(
            f"{i},{result.run_seeds[i]},{conv},{ext},{tr.steps},{fw:.9g},{fg:.9g},{fb:.9g}"
        )
    path.write_text("\n".join(lines) + "\n")


def write_model_csv(path: Path, steps: np.ndarray, model: AnalyticModel) -> None:
    """(t, grey, white, black) at full precision so rows sum to 1 within 1e-12."""
    grey = eval_grey(steps, model)
    white = eval_white(steps, model)
    black = eval_black(steps, model)
    lines = ["step,grey_frac,white_frac,black_frac"]
    for t, g, w, b in zip(steps, grey, white, black):
        lines.append(f"{int(t)},{g:.17g},{w:.17g},{b:.17g}")
    path.write_text("\n".join(lines) + "\n")


def write_fit_series_csv(
    path: Path, steps: np.ndarray, white, grey, black, model: AnalyticModel
) -> None:
    """Side-by-side simulated and modeled triples."""
    mg = eval_grey(steps, model)
    mw = eval_white(steps, model)
    mb = eval_black(steps, model)
    lines = ["step,white_sim,grey_sim,black_sim,white_model,grey_model,black_model"]
    for i, t in enumerate(steps):
        lines.append(
            f"{int(t)},{white[i]:.17g},{grey[i]:.17g},{black[i]:.17g},"
            f"{mw[i]:.17g},{mg[i]:.17g},{mb[i]:.17g}"
        )
    path.write_text("\n".join(lines) + "\n")


def write_pgm(path: Path, grid: Grid, levels: np.ndarray) -> None:
    """Plain-text portable graymap: white=255, grey=128, black=0."""
    values = levels[grid.cells]
    lines = ["P2", f"{grid.width} {grid.height}", "255"]
    for row in values:
        lines.append(" ".join(str(int(v)) for v in row))
    path.write_text("\n".join(lines) + "\n")


def write_snapshots(outdir: Path, trajectory: Trajectory, fmt: str, news: bool) -> list[Path]:
    paths = []
    for step_index, grid in trajectory.snapshots:
        if fmt == "pgm":
            p = outdir / f"snapshot_{step_index:06d}.pgm"
            write_pgm(p, grid, NEWS_PGM_LEVELS if news else ADOPTION_PGM_LEVELS)
        else:
            p = outdir / f"snapshot_{step_index:06d}.txt"
            p.write_text(grid_to_text(grid, NEWS_CHARS if news else ADOPTION_CHARS))
        paths.append(p)
    return paths


def read_series_csv(path: Path) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Parse any of this package's series CSVs into (steps, white, grey, black).

    Columns are located by header name, so the simulate, ensemble and
    eval-model layouts all work. A missing black column is reconstructed
    from normalization.
    """
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(1, "empty file") from None
        names = [h.strip() for h in header]
        if "step" not in names:
            raise CsvFormatError(1, "missing 'step' column")
        if "white_frac" not in names or "grey_frac" not in names:
            raise CsvFormatError(1, "missing 'white_frac' or 'grey_frac' column")
        idx = {name: names.index(name) for name in names}
        steps, white, grey, black = [], [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                steps.append(float(row[idx["step"]]))
                white.append(float(row[idx["white_frac"]]))
                grey.append(float(row[idx["grey_frac"]]))
                if "black_frac" in idx:
                    black.append(float(row[idx["black_frac"]]))
            except (ValueError, IndexError) as exc:
                raise CsvFormatError(lineno, f"unparseable row: {exc}") from None
    steps_arr = np.array(steps)
    white_arr = np.array(white)
    grey_arr = np.array(grey)
    black_arr = np.array(black) if black else 1.0 - white_arr - grey_arr
    return steps_arr, white_arr, grey_arr, black_arr


# ---------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    # Usage mistakes exit 1, not argparse's default 2 (2 is reserved for I/O).
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _add_config_flags(sp: argparse.ArgumentParser, snapshots: bool) -> None:
    sp.add_argument("--width", type=_positive_int, default=40)
    sp.add_argument("--height", type=_positive_int, default=40)
    sp.add_argument("--seed-row", type=int, default=None, help="seed cell row (default: center)")
    sp.add_argument("--seed-col", type=int, default=None, help="seed cell column (default: center)")
    sp.add_argument("--boundary", choices=["bounded", "toroidal"], default="bounded")
    sp.add_argument("--seed", type=int, default=0, help="RNG seed")
    sp.add_argument("--max-steps", type=_positive_int, default=1000)
    sp.add_argument("--model", choices=["news", "innovation"], default="news")
    sp.add_argument("--adoption-threshold", type=float, default=1.0)
    sp.add_argument("--boost-factor", type=float, default=1.5)
    sp.add_argument("--boost-below", type=int, default=3)
    sp.add_argument("--innovation-threshold", type=float, default=1.0)
    if snapshots:
        sp.add_argument("--snapshot-every", type=_positive_int, default=None)
        sp.add_argument("--snapshot-format", choices=["ascii", "pgm"], default="ascii")
    sp.add_argument("--from-manifest", type=Path, default=None,
                    help="load the full configuration from a manifest file (other config flags are ignored)")


def _config_from_args(args: argparse.Namespace, parser: argparse.ArgumentParser) -> SimulationConfig:
    if (args.seed_row is None) != (args.seed_col is None):
        parser.error("--seed-row and --seed-col must be given together")
    seed_position = None if args.seed_row is None else (args.seed_row, args.seed_col)
    if args.model == "news":
        params: NewsRuleParams | InnovationRuleParams = NewsRuleParams(
            adoption_threshold=args.adoption_threshold,
            boost_factor=args.boost_factor,
            boost_below=args.boost_below,
        )
    else:
        params = InnovationRuleParams(threshold=args.innovation_threshold)
    return SimulationConfig(
        width=args.width,
        height=args.height,
        seed_position=seed_position,
        boundary=Boundary(args.boundary),
        rng_seed=args.seed,
        max_steps=args.max_steps,
        rule_params=params,
        snapshot_every=getattr(args, "snapshot_every", None),
    )


def _resolve_outdir(args: argparse.Namespace) -> Path:
    outdir = args.outdir or os.environ.get(OUTDIR_ENV) or "."
    path = Path(outdir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _fit_result_dict(fit: FitResult) -> dict:
    params = None
    if fit.params is not None:
        params = {"c": fit.params.c, "tau": fit.params.tau, "gamma": fit.params.gamma}
    return {
        "params": params,
        "rmse": fit.rmse if np.isfinite(fit.rmse) else None,
        "iterations": fit.iterations,
        "converged": fit.converged,
        "message": fit.message,
    }


# ---------------------------------------------------------------------------
# commands

def cmd_simulate(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.from_manifest is not None:
        manifest_in = load_manifest(args.from_manifest)
        config = config_from_dict(manifest_in["config"])
        snapshot_format = manifest_in.get("snapshot_format", "ascii")
    else:
        config = _config_from_args(args, parser)
        snapshot_format = args.snapshot_format
    outdir = _resolve_outdir(args)

    trajectory = run(config)
    news = config.is_news

    write_series_csv(outdir / "series.csv", trajectory.counts, config.field_size)
    manifest = build_manifest("simulate", config, snapshot_format=snapshot_format)
    save_manifest(outdir / "manifest.json", manifest)
    snapshot_paths = write_snapshots(outdir, trajectory, snapshot_format, news)

    grey, white, black = stabilization_ratio(normalize(trajectory, config.field_size))
    print(f"model={'news' if news else 'innovation'} field={config.width}x{config.height} "
          f"boundary={config.boundary.value} rng_seed={config.rng_seed}")
    conv = trajectory.converged_at
    print(f"converged_at={conv if conv is not None else 'none'} "
          f"black_extinct_at={trajectory.black_extinct_at if trajectory.black_extinct_at is not None else 'none'} "
          f"steps={trajectory.steps}")
    if news:
        print(f"final grey:white:black = {grey:.9g} : {white:.9g} : {black:.9g}")
    else:
        print(f"final not_adopted:adopted = {white:.9g} : {black:.9g}")
    print(f"wrote {outdir / 'series.csv'}" + (f" and {len(snapshot_paths)} snapshots" if snapshot_paths else ""))
    if not trajectory.converged:
        print("warning: run did not converge within max_steps", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def cmd_ensemble(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.from_manifest is not None:
        manifest_in = load_manifest(args.from_manifest)
        config = config_from_dict(manifest_in["config"])
        runs = manifest_in["runs"]
    else:
        config = _config_from_args(args, parser)
        runs = args.runs
    outdir = _resolve_outdir(args)

    result = run_ensemble(config, runs, jobs=args.jobs)
    mean = result.mean_fractions

    write_mean_series_csv(outdir / "mean_series.csv", mean)
    write_convergence_csv(outdir / "convergence.csv", result)
    manifest = build_manifest("ensemble", config, runs=runs)
    save_manifest(outdir / "manifest.json", manifest)

    stats = result.convergence_stats()
    grey, white, black = stabilization_ratio(mean)
    cp = cross_point(mean)
    converged = [c for c in result.converged_steps if c is not None]
    in_band = sum(1 for c in converged if 80 <= c <= 150)
    summary = {
        "runs": runs,
        "base_seed": result.base_seed,
        "generator": GENERATOR_NAME,
        "convergence": {
            "min": stats[0] if stats else None,
            "median": stats[1] if stats else None,
            "max": stats[2] if stats else None,
            "unconverged_runs": result.unconverged,
            "converged_in_80_150": in_band,
            "converged_in_80_150_fraction": in_band / runs,
        },
        "stabilization_ratio": {"grey": grey, "white": white, "black": black},
        "cross_point": {"step": cp.step, "level": cp.level, "spread": cp.spread},
        "manifest": manifest,
    }
    (outdir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")

    print(f"ensemble: {runs} runs of {config.width}x{config.height} "
          f"{config.boundary.value} base_seed={result.base_seed} jobs={args.jobs}")
    if stats:
        print(f"convergence steps: min={stats[0]:g} median={stats[1]:g} max={stats[2]:g} "
              f"unconverged={len(result.unconverged)} in_80_150={in_band}/{runs}")
    else:
        print(f"convergence steps: no run converged within max_steps={config.max_steps}")
    print(f"stabilization grey:white:black = {grey:.9g} : {white:.9g} : {black:.9g}")
    print(f"cross point: step={cp.step} level={cp.level:.9g} spread={cp.spread:.9g}")
    print(f"wrote {outdir / 'mean_series.csv'}")
    if result.unconverged:
        print(f"warning: {len(result.unconverged)} runs did not converge", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def cmd_eval_model(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.t_max < args.t_min:
        parser.error("--t-max must be >= --t-min")
    model = AnalyticModel(
        grey=LogisticParams(c=args.grey_c, tau=args.grey_tau, gamma=args.grey_gamma),
        white=LogisticParams(c=args.white_c, tau=args.white_tau, gamma=args.white_gamma),
    )
    outdir = _resolve_outdir(args)
    steps = np.arange(args.t_min, args.t_max + 1)
    write_model_csv(outdir / "model_series.csv", steps, model)
    manifest = build_manifest(
        "eval-model",
        model_params={
            "grey": {"c": model.grey.c, "tau": model.grey.tau, "gamma": model.grey.gamma},
            "white": {"c": model.white.c, "tau": model.white.tau, "gamma": model.white.gamma},
        },
        t_min=args.t_min,
        t_max=args.t_max,
    )
    save_manifest(outdir / "manifest.json", manifest)
    print(f"evaluated model over t=[{args.t_min}, {args.t_max}]")
    print(f"wrote {outdir / 'model_series.csv'}")
    return EXIT_OK


def cmd_fit(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    del parser
    steps, white, grey, black = read_series_csv(args.input)
    outdir = _resolve_outdir(args)

    fit = fit_model(steps, grey, white)
    payload = {
        "input": str(args.input),
        "rows": len(steps),
        "grey": _fit_result_dict(fit.grey),
        "white": _fit_result_dict(fit.white),
        "black_rmse": fit.black_rmse,
    }
    (outdir / "fit_params.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    manifest = build_manifest("fit", input=str(args.input))
    save_manifest(outdir / "manifest.json", manifest)

    for name, res in (("grey", fit.grey), ("white", fit.white)):
        if res.params is not None:
            print(f"{name}: c={res.params.c:.9g} tau={res.params.tau:.9g} "
                  f"gamma={res.params.gamma:.9g} rmse={res.rmse:.9g}")
        else:
            print(f"{name}: fit failed ({res.message})")
    if fit.model is not None:
        print(f"implied black rmse={fit.black_rmse:.9g}")
        write_fit_series_csv(outdir / "fit_series.csv", steps, white, grey, black, fit.model)
        print(f"wrote {outdir / 'fit_params.json'} and {outdir / 'fit_series.csv'}")
        return EXIT_OK
    print("fit failed; see fit_params.json", file=sys.stderr)
    return EXIT_FIT_FAILURE


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="newsca", description=__doc__)
    parser.add_argument("--version", action="version", version=f"newsca {__version__}")
    sub = parser.add_subparsers(dest="command")

    sp = sub.add_parser("simulate", help="run one simulation and write its series")
    _add_config_flags(sp, snapshots=True)
    sp.add_argument("--outdir", default=None)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("ensemble", help="run many seeded simulations and aggregate")
    _add_config_flags(sp, snapshots=False)
    sp.add_argument("--runs", type=_positive_int, default=100)
    sp.add_argument("--jobs", type=_positive_int, default=1)
    sp.add_argument("--outdir", default=None)
    sp.set_defaults(func=cmd_ensemble)

    sp = sub.add_parser("eval-model", help="evaluate the closed-form curves over a step range")
    sp.add_argument("--t-min", type=int, default=0)
    sp.add_argument("--t-max", type=int, default=120)
    ref = reference_model()
    sp.add_argument("--grey-c", type=float, default=ref.grey.c)
    sp.add_argument("--grey-tau", type=float, default=ref.grey.tau)
    sp.add_argument("--grey-gamma", type=float, default=ref.grey.gamma)
    sp.add_argument("--white-c", type=float, default=ref.white.c)
    sp.add_argument("--white-tau", type=float, default=ref.white.tau)
    sp.add_argument("--white-gamma", type=float, default=ref.white.gamma)
    sp.add_argument("--outdir", default=None)
    sp.set_defaults(func=cmd_eval_model)

    sp = sub.add_parser("fit", help="fit logistic curves to a series CSV")
    sp.add_argument("--input", type=Path, required=True)
    sp.add_argument("--outdir", default=None)
    sp.set_defaults(func=cmd_fit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "func", None) is None:
        parser.print_help()
        return EXIT_USAGE
    try:
        return args.func(args, parser)
    except SystemExit as exc:  # parser.error inside a command
        return int(exc.code or 0)
    except CsvFormatError as exc:
        print(f"error: {args.input if hasattr(args, 'input') else ''}: {exc}", file=sys.stderr)
        return EXIT_IO
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
