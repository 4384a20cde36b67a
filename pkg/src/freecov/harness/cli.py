"""Command line entry point: ``freecov <subcommand> [flags]``.

Exit status: 0 when every check is within tolerance, 1 on a tolerance
breach, 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from ..ensembles import predicted_cumulants
from ..partitions import SetPartition
from .config import ConfigError, ExperimentConfig, build_config, load_config
from .experiments import (
    HypothesisViolation,
    predict,
    run_convergence,
    run_counterexample,
    run_crossing_decay,
    run_hypotheses,
    run_lemma_suite,
)
from .reports import Report

EXIT_OK, EXIT_BREACH, EXIT_CONFIG = 0, 1, 2

SUBCOMMAND_DEFAULTS = {
    "counterexample": {"ensemble": "CanonicalBasis", "n_grid": "512", "p_max": "4", "trials": "500"},
    "crossing": {"n_grid": "128,256,512", "trials": "4000"},
}


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="flat key = value config file")
    parser.add_argument("--ensemble", help="UnitSphere | CanonicalBasis | GaussianScaled | RadialMixture")
    parser.add_argument("--field", choices=["real", "complex"])
    parser.add_argument("--radii", help="RadialMixture radii, comma separated")
    parser.add_argument("--probs", help="RadialMixture probabilities, comma separated")
    parser.add_argument("--lambda", dest="lam", help="aspect ratio n/N")
    parser.add_argument("--n-grid", help="ascending dimensions, comma separated")
    parser.add_argument("--p-max", help="highest moment order")
    parser.add_argument("--trials", help="Monte Carlo trials per grid point")
    parser.add_argument("--seed", help="master seed")
    parser.add_argument("--workers", help="threads for Monte Carlo trials")
    parser.add_argument("--out", type=Path, help="output directory (default: print to stdout)")
    parser.add_argument("--format", choices=["csv", "json"], default="csv")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freecov",
        description="Noncrossing-partition limits of sample covariance moments and their numerical checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", help="tabulate predicted free and classical moments")
    _common(p)
    p.add_argument("--cumulants", help="explicit a_1,...,a_K (overrides ensemble + lambda)")

    p = sub.add_parser("simulate", help="Monte Carlo convergence against the free prediction")
    _common(p)

    p = sub.add_parser("counterexample", help="canonical-basis ensemble against Bell numbers")
    _common(p)

    p = sub.add_parser("crossing", help="decay of a crossing-partition contribution")
    _common(p)
    p.add_argument("--partition", default="[[1,3],[2,4]]", help="JSON block list, e.g. [[1,3],[2,4]]")

    p = sub.add_parser("lemmas", help="brute-force check of the two-cover graph lemmas")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--random-count", type=int, default=10_000)
    p.add_argument("--no-exhaustive", action="store_true")
    p.add_argument("--out", type=Path)
    p.add_argument("--format", choices=["csv", "json"], default="json")

    p = sub.add_parser("hypotheses", help="estimate the hypothesis constants of an ensemble")
    _common(p)
    p.add_argument("--samples", type=int, default=2000)
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    values: dict = dict(SUBCOMMAND_DEFAULTS.get(args.command, {}))
    if args.config is not None:
        values.update(load_config(args.config))
    cli = {
        "ensemble": args.ensemble,
        "field": args.field,
        "radii": args.radii,
        "probs": args.probs,
        "lambda": args.lam,
        "n_grid": args.n_grid,
        "p_max": args.p_max,
        "trials": args.trials,
        "seed": args.seed,
        "workers": args.workers,
        "output_dir": str(args.out) if args.out is not None else None,
    }
    values.update({k: v for k, v in cli.items() if v is not None})
    return build_config(values)


def _emit(report: Report, out_dir: Path | None, fmt: str) -> None:
    if out_dir is None:
        sys.stdout.write(report.to_csv() if fmt == "csv" else report.to_json())
    else:
        path = report.write(out_dir, fmt)
        print(f"wrote {path}", file=sys.stderr)


def _parse_floats(text: str) -> list[float]:
    return [float(x) for x in text.replace(",", " ").split()]


def _run(args: argparse.Namespace) -> Report:
    if args.command == "lemmas":
        return run_lemma_suite(seed=args.seed, random_count=args.random_count, exhaustive=not args.no_exhaustive)

    if args.command == "predict" and args.cumulants:
        a = _parse_floats(args.cumulants)
        p_max = int(args.p_max) if args.p_max else len(a)
        return predict(p_max, a)

    config = resolve_config(args)
    if args.command == "predict":
        a = predicted_cumulants(config.ensemble, config.lam, config.p_max)
        return predict(config.p_max, list(a))
    if args.command == "simulate":
        return run_convergence(config)
    if args.command == "counterexample":
        return run_counterexample(config)
    if args.command == "crossing":
        try:
            pi = SetPartition.from_blocks(json.loads(args.partition))
        except (json.JSONDecodeError, TypeError) as exc:
            raise ConfigError(f"bad --partition {args.partition!r}: {exc}") from exc
        return run_crossing_decay(config, pi)
    if args.command == "hypotheses":
        return run_hypotheses(config, samples=args.samples)
    raise ConfigError(f"unknown command {args.command}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        report = _run(args)
    except HypothesisViolation as exc:
        print(f"refused: {exc}", file=sys.stderr)
        print(json.dumps(exc.diagnostic, sort_keys=True), file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = getattr(args, "out", None)
    _emit(report, out_dir, args.format)
    return EXIT_OK if report.ok else EXIT_BREACH


if __name__ == "__main__":
    sys.exit(main())
