#!/usr/bin/env python3
"""Command-line entry point for the NSGA-III runtime experiments.

Usage:
    # Print the Pareto front of 2-OJZJ_2 with n=8 (closed form, or by enumeration)
    python -m scripts.nsga3_cli front --n 8 --m 2 --k 2 [--brute-force]

    # Run 20 seeded trials and write trials.csv / summary.csv into results/k3_pc0
    python -m scripts.nsga3_cli run --n 16 --m 2 --k 3 --mu 64 --pc 0 --trials 20 --out results/k3_pc0

    # Same, with parameters taken from a key = value file (flags override the file)
    python -m scripts.nsga3_cli run --config experiments/k3.env --pc 0.9

    # Crossover speedup: mutation-only summary first
    python -m scripts.nsga3_cli compare --a results/k3_pc0/summary.csv --b results/k3_pc09/summary.csv

    # Built-in invariant suite
    python -m scripts.nsga3_cli check [--full]

    # HTTP API
    python -m scripts.nsga3_cli serve --port 8000

Exit codes: 0 success, 1 usage error, 2 invariant failure, 3 I/O error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

# Add backend to path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from pydantic import ValidationError

from app.core.errors import Nsga3Error, UsageError
from app.core.evolution.ojzj import OjzjInstance, brute_force_front, pareto_front, sorted_front
from app.core.experiments.checks import run_invariant_suite
from app.core.experiments.config import build_config, load_config_file
from app.core.experiments.harness import compare_crossover, read_summary_csv, run_suite
from app.core.settings import configure_logging
from app.models.experiment import ConfigSummary

logger = logging.getLogger("nsga3_cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVARIANT = 2


class _Parser(argparse.ArgumentParser):
    """Argument errors are usage errors (exit 1) rather than argparse's exit 2."""

    def error(self, message):
        raise UsageError(message)


def _add_instance_args(parser: argparse.ArgumentParser, required: bool):
    parser.add_argument("--n", type=int, required=required, help="Bit-string length")
    parser.add_argument("--m", type=int, required=required, help="Number of objectives (even)")
    parser.add_argument("--k", type=int, required=required, help="Gap size")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nsga3_cli", description="NSGA-III on m-OJZJ_k: fronts, seeded runs, comparisons")
    parser.add_argument("--log-level", type=str, default=None, help="DEBUG, INFO, WARNING or ERROR")
    commands = parser.add_subparsers(dest="command", required=True)

    front = commands.add_parser("front", help="Print the Pareto front")
    _add_instance_args(front, required=True)
    front.add_argument("--brute-force", action="store_true", help="Enumerate all 2^n genomes instead")

    run = commands.add_parser("run", help="Execute a seeded experiment suite")
    run.add_argument("--config", type=str, help="key = value config file; flags override it")
    _add_instance_args(run, required=False)
    run.add_argument("--mu", type=int, help="Population size (even)")
    run.add_argument("--pc", type=float, help="Crossover probability in [0, 1)")
    run.add_argument("--lattice-p", type=int, help="Reference lattice parameter (default: regime value)")
    run.add_argument("--eps-nad", type=float, help="Nadir threshold (default: f_max)")
    run.add_argument("--trials", type=int, help="Number of trials")
    run.add_argument("--seed", type=int, help="Master seed")
    run.add_argument("--budget", type=int, help="Evaluation budget (default: 10^7)")
    run.add_argument("--out", type=str, help="Output directory")
    run.add_argument("--config-id", type=str, help="Label written to every CSV row")
    run.add_argument("--trajectories", action="store_true", default=None, help="Also write trajectories.csv")
    run.add_argument("--workers", type=int, help="Concurrent trial processes")

    compare = commands.add_parser("compare", help="Crossover speedup from two summary CSVs")
    compare.add_argument("--a", type=str, required=True, help="Mutation-only summary.csv")
    compare.add_argument("--b", type=str, required=True, help="Crossover summary.csv")
    compare.add_argument("--id-a", type=str, help="Row of --a to use when it holds several configs")
    compare.add_argument("--id-b", type=str, help="Row of --b to use when it holds several configs")

    check = commands.add_parser("check", help="Run the built-in invariant suite")
    check.add_argument("--full", action="store_true", help="Long monotonicity runs and 1000 sort populations")

    serve = commands.add_parser("serve", help="Start the HTTP API")
    serve.add_argument("--host", type=str, default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def cmd_front(args) -> int:
    instance = OjzjInstance(args.n, args.m, args.k)
    front = brute_force_front(instance) if args.brute_force else pareto_front(instance)
    method = "brute force" if args.brute_force else "closed form"
    print(f"# {instance.label()}: {len(front)} Pareto-optimal vectors ({method})")
    for vector in sorted_front(front):
        print(" ".join(str(v) for v in vector))
    return EXIT_OK


def cmd_run(args) -> int:
    file_values = load_config_file(args.config) if args.config else None
    config = build_config(
        file_values,
        n=args.n,
        m=args.m,
        k=args.k,
        mu=args.mu,
        pc=args.pc,
        lattice_p=args.lattice_p,
        eps_nad=args.eps_nad,
        trials=args.trials,
        seed=args.seed,
        budget=args.budget,
        out=args.out,
        config_id=args.config_id,
        trajectories=args.trajectories,
    )
    suite = run_suite([config], workers=args.workers)
    for summary in suite.configs:
        median = "n/a" if summary.median_generations is None else f"{summary.median_generations:g}"
        print(
            f"{summary.config_id}: {summary.successes}/{summary.trials} trials covered the front, "
            f"median generations {median} (regime={summary.regime}, population_bound={summary.population_bound})"
        )
    for path in suite.files:
        print(f"wrote {path}")
    return EXIT_OK


def _pick_row(path: str, config_id: Optional[str]) -> ConfigSummary:
    rows = read_summary_csv(path).configs
    if config_id is not None:
        matches = [row for row in rows if row.config_id == config_id]
        if not matches:
            raise UsageError(f"{path} has no config_id {config_id!r}")
        return matches[0]
    if len(rows) != 1:
        raise UsageError(f"{path} holds {len(rows)} configs; choose one with --id-a/--id-b")
    return rows[0]


def cmd_compare(args) -> int:
    report = compare_crossover(_pick_row(args.a, args.id_a), _pick_row(args.b, args.id_b))
    print(f"mutation-only ({report.config_a}) median generations: {report.median_mutation_only:g}")
    print(f"crossover     ({report.config_b}) median generations: {report.median_crossover:g}")
    print(f"speedup ratio: {report.ratio:.3f}")
    return EXIT_OK


def cmd_check(args) -> int:
    outcomes = run_invariant_suite(full=args.full)
    for outcome in outcomes:
        print(f"[{'PASS' if outcome.passed else 'FAIL'}] {outcome.name}: {outcome.detail}")
    return EXIT_OK if all(o.passed for o in outcomes) else EXIT_INVARIANT


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("app.main:app", host=args.host, port=args.port)
    return EXIT_OK


COMMANDS = {
    "front": cmd_front,
    "run": cmd_run,
    "compare": cmd_compare,
    "check": cmd_check,
    "serve": cmd_serve,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        configure_logging(args.log_level)
        return COMMANDS[args.command](args)
    except ValidationError as exc:
        logger.error(f"Invalid configuration: {exc}")
        return EXIT_USAGE
    except Nsga3Error as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
