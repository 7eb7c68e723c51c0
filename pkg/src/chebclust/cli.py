"""Command-line front end.

Three subcommands: ``run`` clusters one seeded ordering and writes the
reconstruction, ``sample`` repeats a run over many seeds and estimates
outcome densities, ``sweep`` does that across a list of admission
thresholds.  All outputs are plot-ready CSV/JSON written with fixed
formatting (9 significant digits, LF endings, sorted JSON keys) so
identical inputs produce byte-identical files.

Exit codes: 0 success, 1 usage error, 2 data or format error.  The
environment variable CHEBY_THREADS caps run parallelism (0 = one worker
per CPU; unset = serial).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys

import numpy as np

from ._version import __version__
from .core import LearnerConfig
from .density import converged_estimates, count_histogram_mode, kde, sweep
from .learner import run_sequence
from .ppm import PpmFormatError, load, reconstruct, save, to_features
from .sampler import permutation, sample_runs

_N_DIMS = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage problems; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _positive_real(text: str) -> float:
    value = float(text)
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"{text!r} is not a positive real")
    return value


def _nonnegative_real(text: str) -> float:
    value = float(text)
    if not (math.isfinite(value) and value >= 0):
        raise argparse.ArgumentTypeError(f"{text!r} is not a non-negative real")
    return value


def _seed_value(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"{text!r} does not fit in 64 unsigned bits")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text!r} is not a positive integer")
    return value


def _cp_list(text: str) -> tuple:
    values = tuple(_positive_real(part) for part in text.split(",") if part.strip())
    if not values:
        raise argparse.ArgumentTypeError("empty threshold list")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chebclust", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"chebclust {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    run_p = commands.add_parser("run", help="cluster one seeded ordering and reconstruct")
    sample_p = commands.add_parser("sample", help="resample many orderings, estimate densities")
    sweep_p = commands.add_parser("sweep", help="resample across a list of admission thresholds")

    for sub in (run_p, sample_p, sweep_p):
        sub.add_argument("image", help="input image (binary PPM, maxval 255)")
        sub.add_argument("--ridge", type=_nonnegative_real, default=1e-6,
                         help="covariance regularization (default 1e-6)")
        sub.add_argument("--seed", type=_seed_value, default=0,
                         help="ordering seed (base seed for sample/sweep)")
        sub.add_argument("--out", default=".", help="output directory (default .)")
    for sub in (run_p, sample_p):
        sub.add_argument("--cp", type=_positive_real, default=7.0,
                         help="admission threshold (default 7)")
    for sub in (sample_p, sweep_p):
        sub.add_argument("--runs", type=_positive_int, default=100,
                         help="number of seeded runs (default 100)")
    sweep_p.add_argument("--cp-list", type=_cp_list, required=True,
                         help="comma-separated admission thresholds")

    run_p.set_defaults(func=cmd_run)
    sample_p.set_defaults(func=cmd_sample)
    sweep_p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    workers, workers_error = _workers_from_env()
    if workers_error:
        print(f"chebclust: error: {workers_error}", file=sys.stderr)
        return 1
    try:
        return args.func(args, workers)
    except (PpmFormatError, OSError, ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"chebclust: error: {exc}", file=sys.stderr)
        return 2


def _workers_from_env():
    raw = os.environ.get("CHEBY_THREADS")
    if raw is None or raw.strip() == "":
        return 1, None
    try:
        value = int(raw)
    except ValueError:
        return None, f"CHEBY_THREADS must be an integer, got {raw!r}"
    if value < 0:
        return None, f"CHEBY_THREADS must be >= 0, got {value}"
    return (0 if value == 0 else value), None


# ---------------------------------------------------------------------------
# deterministic writers

def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.9g" % float(value)


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(json.dumps(payload, sort_keys=True, indent=2))
        fh.write("\n")


def _manifest(args, image_path: str, artifacts, warnings, extra=None) -> dict:
    with open(image_path, "rb") as fh:
        digest = hashlib.sha256(fh.read()).hexdigest()
    manifest = {
        "tool": "chebclust",
        "version": __version__,
        "input": image_path,
        "input_sha256": digest,
        "ridge": args.ridge,
        "seed": args.seed,
        "artifacts": sorted(artifacts),
        "warnings": list(warnings),
    }
    if extra:
        manifest.update(extra)
    return manifest


def _vacuity_warnings(cps) -> list:
    notes = []
    for cp in cps:
        if cp <= _N_DIMS:
            notes.append(
                f"admission threshold {cp:g} <= feature dimension {_N_DIMS}: "
                "the probabilistic lower bound is vacuous"
            )
    for note in notes:
        print(f"chebclust: warning: {note}", file=sys.stderr)
    return notes


# ---------------------------------------------------------------------------
# subcommands

def cmd_run(args, workers: int | None = 1) -> int:
    image = load(args.image)
    features = to_features(image)
    config = LearnerConfig(chebyshev_param=args.cp, ridge=args.ridge, seed=args.seed)
    warnings = _vacuity_warnings([args.cp])

    order = permutation(image.example_count, args.seed)
    result = run_sequence(features, order, config)
    recon = reconstruct(image, result)

    os.makedirs(args.out, exist_ok=True)
    artifacts = ["recon.ppm", "err1.csv", "err2.csv", "summary.json"]
    save(os.path.join(args.out, "recon.ppm"), recon.image)
    _write_csv(os.path.join(args.out, "err1.csv"),
               ("examples_processed", "err1"), result.err1_series)
    _write_csv(os.path.join(args.out, "err2.csv"),
               ("cluster_count", "err2"), result.err2_series)
    _write_json(os.path.join(args.out, "summary.json"), {
        "chebyshev_param": args.cp,
        "cluster_count": result.cluster_count,
        "trerr": recon.trerr,
        "tuple": [args.cp, result.cluster_count, recon.trerr],
        "lower_bound_confidence": result.lower_bound_confidence,
        "trerr_sum": recon.trerr_sum,
        "trerr_unit": recon.trerr_unit,
        "cum_err_val": result.cum_err_val,
        "err1_bound_diagnostic": result.err1_bound_diagnostic,
        "vacuous_bound": result.vacuous_bound,
        "manifest": _manifest(args, args.image, artifacts, warnings,
                              {"chebyshev_param": args.cp}),
    })
    return 0


def cmd_sample(args, workers: int | None = 1) -> int:
    image = load(args.image)
    features = to_features(image)
    config = LearnerConfig(chebyshev_param=args.cp, ridge=args.ridge, seed=args.seed)
    warnings = _vacuity_warnings([args.cp])

    summaries = sample_runs(features, config, args.runs, args.seed, workers=workers)
    err1_kde = kde([s.final_err1 for s in summaries])
    err2_kde = kde([s.final_err2 for s in summaries])
    count_kde = kde([float(s.cluster_count) for s in summaries])
    mode_err1, mode_err2, mode_count = converged_estimates(summaries)

    os.makedirs(args.out, exist_ok=True)
    artifacts = ["runs.csv", "kde_err1.csv", "kde_err2.csv", "kde_clusters.csv", "modes.json"]
    _write_csv(os.path.join(args.out, "runs.csv"),
               ("seed", "final_err1", "final_err2", "cluster_count", "trerr"),
               [(s.seed, s.final_err1, s.final_err2, s.cluster_count,
                 s.total_reconstruction_error) for s in summaries])
    for name, estimate in (("kde_err1.csv", err1_kde),
                           ("kde_err2.csv", err2_kde),
                           ("kde_clusters.csv", count_kde)):
        _write_csv(os.path.join(args.out, name), ("grid", "density"),
                   zip(estimate.grid, estimate.density))
    _write_json(os.path.join(args.out, "modes.json"), {
        "err1": mode_err1,
        "err2": mode_err2,
        "clusters": mode_count,
        "clusters_histogram": count_histogram_mode([s.cluster_count for s in summaries]),
        "manifest": _manifest(args, args.image, artifacts, warnings,
                              {"chebyshev_param": args.cp, "runs": args.runs}),
    })
    return 0


def cmd_sweep(args, workers: int | None = 1) -> int:
    image = load(args.image)
    features = to_features(image)
    warnings = _vacuity_warnings(args.cp_list)

    rows = sweep(features, args.cp_list, args.runs, args.seed,
                 ridge=args.ridge, workers=workers)

    os.makedirs(args.out, exist_ok=True)
    _write_csv(os.path.join(args.out, "sweep.csv"),
               ("cp", "mode_clusters", "mode_err1", "mode_err2"),
               [(r.chebyshev_param, r.mode_cluster_count, r.mode_err1, r.mode_err2)
                for r in rows])
    _write_json(os.path.join(args.out, "sweep_manifest.json"), {
        "manifest": _manifest(args, args.image, ["sweep.csv", "sweep_manifest.json"],
                              warnings,
                              {"chebyshev_params": list(args.cp_list), "runs": args.runs}),
    })
    return 0


if __name__ == "__main__":
    sys.exit(main())
