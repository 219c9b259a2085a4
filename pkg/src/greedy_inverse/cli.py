"""Command-line front end.

    greedy-inverse simulate   --fixture single --seed 7 --out run/
    greedy-inverse select     --config exp.yaml --mode error --vis run/visibilities.csv
    greedy-inverse reconstruct --config exp.yaml --selection run/selection_error.json
    greedy-inverse experiment --fixture loop --out run/
    greedy-inverse metrics    --vis run/visibilities.csv --image run/image_all.csv

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import io
from .errors import GreedyInverseError, IoError, NumericalError, ReconstructorFailure, ValidationError
from .fourier import ndft_forward
from .pipeline import ALL_POINTS, Experiment, ExperimentConfig, chi2, chi2_sq, mre, reconstruct, rmse, run_experiment
from .simulation import fixture

log = logging.getLogger("greedy_inverse")

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4


def _config(args) -> ExperimentConfig:
    """Config file (or the default experiment) with command-line overrides applied."""
    cfg = io.load_config(args.config) if args.config else ExperimentConfig()
    if args.fixture:
        cfg = replace(cfg, source=fixture(args.fixture), source_name=args.fixture)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if getattr(args, "n", None) is not None:
        cfg = replace(cfg, n_select=args.n)
    return cfg


def _outdir(args) -> Path:
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create output directory {out}: {exc}") from exc
    return out


def _experiment(args, cfg) -> Experiment:
    vis = io.read_visibilities_csv(args.vis) if getattr(args, "vis", None) else None
    return Experiment(cfg, vis)


def _write_image(image, stem: Path) -> dict:
    return {"pgm": str(io.write_pgm(image, stem.with_suffix(".pgm"))),
            "csv": str(io.write_image_csv(image, stem.with_suffix(".csv")))}


# ---------------------------------------------------------------- subcommands

def cmd_simulate(args) -> int:
    cfg = _config(args)
    out = _outdir(args)
    exp = Experiment(cfg)
    io.save_config(cfg, out / "config.yaml")
    _write_image(exp.truth, out / "truth")
    io.write_visibilities_csv(exp.vis, out / "visibilities.csv")
    io.write_visibilities_json(exp.vis, out / "visibilities.json")
    print(f"wrote {len(exp.vis)} visibilities to {out / 'visibilities.csv'}")
    return EXIT_OK


def cmd_select(args) -> int:
    cfg = _config(args)
    exp = _experiment(args, cfg)
    if cfg.n_select is not None and cfg.n_select > len(exp.vis):
        log.warning("n=%d exceeds the %d available samples; selecting all of them", cfg.n_select, len(exp.vis))
        cfg = replace(cfg, n_select=len(exp.vis))
        exp.cfg = cfg
    sel = exp.select(args.mode)
    out = _outdir(args)
    path = io.write_selection(sel, out / f"selection_{args.mode}.json")
    for k, (i, v) in enumerate(zip(sel.order, sel.indicator_trace)):
        print(f"{k:4d} {i:6d} {v:.6e}")
    print(f"wrote {len(sel)} indices to {path}")
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    cfg = _config(args)
    exp = _experiment(args, cfg)
    selection = io.read_selection(args.selection) if args.selection else ALL_POINTS
    image, report = reconstruct(exp, selection)
    out = _outdir(args)
    _write_image(image, out / f"image_{report.sampling_mode}")
    io.write_metrics_csv([report.row()], out / f"metrics_{report.sampling_mode}.csv")
    print(io.format_table([report.row()]), end="")
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = _config(args)
    out = _outdir(args)
    io.save_config(cfg, out / "config.yaml")
    vis = io.read_visibilities_csv(args.vis) if args.vis else None
    try:
        result = run_experiment(cfg, vis)
    except GreedyInverseError as exc:
        partial = getattr(exc, "result", None)
        if partial is not None:
            _emit_experiment(partial, out, f"PARTIAL: failed at stage {getattr(exc, 'stage', '?')}: {exc}")
        raise
    text = _emit_experiment(result, out)
    print(text, end="")
    return EXIT_OK


def _emit_experiment(result, out: Path, status: str = "") -> str:
    for mode, image in result.images.items():
        _write_image(image, out / f"image_{mode}")
    for mode, sel in result.selections.items():
        io.write_selection(sel, out / f"selection_{mode}.json")
    rows = result.table()
    io.write_metrics_csv(rows, out / "metrics.csv")
    text = io.format_table(rows, result.experiment.cfg.source_name.capitalize())
    if status:
        text = status + "\n" + text
    (out / "table.txt").write_text(text)
    return text


def cmd_metrics(args) -> int:
    vis = io.read_visibilities_csv(args.vis)
    image = io.read_image_csv(args.image)
    pred = ndft_forward(image, vis.xi)
    row = {"mode": args.label, "method": "uv_smooth", "chi2": chi2(vis, pred), "chi2_sq": chi2_sq(vis, pred),
           "rmse": rmse(vis, pred), "mre": mre(vis, pred), "n_used": len(vis)}
    if args.out:
        io.write_metrics_csv([row], _outdir(args) / "metrics.csv")
    print(io.format_table([row]), end="")
    return EXIT_OK


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config (YAML)")
    common.add_argument("--out", default=".", help="output directory (default: current directory)")
    common.add_argument("--seed", type=int, help="override the noise seed")
    common.add_argument("--fixture", choices=("single", "double", "loop"), help="override the source")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="greedy-inverse", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="render the source and write noisy visibilities")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("select", parents=[common], help="greedy selection of a visibility subset")
    p.add_argument("--mode", choices=("error", "residual"), default="error")
    p.add_argument("--n", type=int, help="number of samples to select")
    p.add_argument("--vis", help="visibility CSV (default: simulate from the config)")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("reconstruct", parents=[common], help="interpolate and invert one selection")
    p.add_argument("--selection", help="selection JSON (default: all points)")
    p.add_argument("--vis", help="visibility CSV (default: simulate from the config)")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("experiment", parents=[common], help="all three sampling modes with a metric table")
    p.add_argument("--vis", help="visibility CSV (default: simulate from the config)")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("metrics", parents=[common], help="score an image against visibilities")
    p.add_argument("--vis", required=True)
    p.add_argument("--image", required=True, help="image CSV")
    p.add_argument("--label", default="image", help="value for the mode column")
    p.set_defaults(func=cmd_metrics, out=None)
    return parser


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, ValidationError):
        return EXIT_INVALID
    if isinstance(exc, (NumericalError, ReconstructorFailure)):
        return EXIT_NUMERICAL
    if isinstance(exc, OSError):
        return EXIT_IO
    return EXIT_NUMERICAL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (GreedyInverseError, OSError) as exc:
        stage = getattr(exc, "stage", None)
        print(f"error{f' ({stage})' if stage else ''}: {exc}", file=sys.stderr)
        return exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
