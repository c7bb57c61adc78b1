"""Seeded multi-trial harness: single trials, suites, aggregation and the CSV files.

A trial is a pure function of (config, trial index). Suites may run trials in a process
pool; results are ordered by (config, trial) before anything is aggregated or written.
"""

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from app.core.analytics.bounds import cover_cap, initialization_success, population_bound_holds, predicted_bound
from app.core.analytics.metrics import Trajectory, first_class_discovery, record_generation
from app.core.errors import ExperimentIOError, UsageError
from app.core.evolution.bitcore import RandomStream, uniform_random_genome
from app.core.evolution.nsga3 import Individual, ReferenceSet, generate_reference_points, run_until_covered
from app.core.evolution.ojzj import OjzjInstance, evaluate, pareto_front
from app.core.settings import get_settings
from app.models.experiment import (
    ClassDiscovery,
    ConfigSummary,
    ExperimentConfig,
    SpeedupReport,
    SuiteSummary,
    TrajectoryRow,
    TrialResult,
)

logger = logging.getLogger(__name__)

TRIAL_COLUMNS = [
    "config_id", "trial", "seed", "n", "m", "k", "mu", "pc", "lattice_p", "eps_nad",
    "generations", "evaluations", "covered", "front_size", "budget",
]
SUMMARY_COLUMNS = [
    "config_id", "n", "m", "k", "mu", "pc", "lattice_p", "eps_nad", "trials", "successes",
    "median_generations", "mean_generations", "min_generations", "max_generations",
    "median_evaluations", "regime", "population_bound", "predicted_bound",
]
TRAJECTORY_COLUMNS = [
    "config_id", "trial", "t", "covered_front_count", "min_cover", "capped_min_cover",
    "num_r_classes", "jump_events",
]

TRIALS_FILE = "trials.csv"
SUMMARY_FILE = "summary.csv"
TRAJECTORY_FILE = "trajectories.csv"


@lru_cache(maxsize=16)
def reference_set(m: int, p: int) -> ReferenceSet:
    return generate_reference_points(m, p)


def _trajectory_rows(trajectory: Trajectory) -> list[TrajectoryRow]:
    return [
        TrajectoryRow(
            t=r.t,
            covered_front_count=r.covered_front_count,
            min_cover=r.min_cover,
            capped_min_cover=r.capped_min_cover,
            num_r_classes=r.num_r_classes,
            jump_events=r.jump_events,
            k_jump_events=r.k_jump_events,
        )
        for r in trajectory.records
    ]


def _class_discovery(trajectory: Trajectory) -> list[ClassDiscovery]:
    return [
        ClassDiscovery(r_class=list(r_class), generation=t)
        for r_class, t in sorted(first_class_discovery(trajectory).items(), key=lambda item: (item[1], item[0]))
    ]


def run_trial(config: ExperimentConfig, trial_index: int, record_trajectory: Optional[bool] = None) -> TrialResult:
    """Run one seeded trial until the front is covered or the generation budget runs out."""
    if trial_index < 0:
        raise UsageError(f"trial_index must be non-negative, got {trial_index}")
    if record_trajectory is None:
        record_trajectory = config.trajectories

    instance = config.instance()
    params = config.params()
    front = pareto_front(instance)
    seed = RandomStream.trial_seed(config.master_seed, trial_index)

    trajectory = None
    observer = None
    if record_trajectory:
        trajectory = Trajectory(instance, front, cover_cap(instance, params.mu))
        observer = lambda observation: record_generation(trajectory, observation)  # noqa: E731

    outcome = run_until_covered(
        instance, params, reference_set(instance.m, params.lattice_p), RandomStream(seed), front, observer
    )
    present = {ind.fitness for ind in outcome.state.population}
    covered = len(front & present)

    if outcome.budget_exhausted:
        logger.warning(
            f"[{config.config_id}] trial {trial_index}: budget of {config.budget} evaluations exhausted "
            f"with {covered}/{len(front)} front vectors covered"
        )
        generations, evaluations = params.max_generations, config.budget
    else:
        generations, evaluations = outcome.generations, outcome.generations * params.mu
        logger.info(f"[{config.config_id}] trial {trial_index}: front covered after {generations} generations")

    return TrialResult(
        config_id=config.config_id,
        trial=trial_index,
        seed=seed,
        n=config.n,
        m=config.m,
        k=config.k,
        mu=config.mu,
        pc=config.pc,
        lattice_p=config.lattice_p,
        eps_nad=config.eps_nad,
        generations=generations,
        evaluations=evaluations,
        covered=covered,
        front_size=len(front),
        budget=config.budget,
        success=not outcome.budget_exhausted,
        trajectory=_trajectory_rows(trajectory) if trajectory is not None else None,
        class_discovery=_class_discovery(trajectory) if trajectory is not None else None,
    )


def _run_task(task: tuple[ExperimentConfig, int]) -> TrialResult:
    config, trial_index = task
    return run_trial(config, trial_index)


def summarize(config: ExperimentConfig, results: Sequence[TrialResult]) -> ConfigSummary:
    """Statistics over successful trials only; the success count is reported alongside."""
    instance = config.instance()
    wins = np.array([r.generations for r in results if r.success and r.config_id == config.config_id], dtype=np.int64)
    has_wins = wins.size > 0
    return ConfigSummary(
        config_id=config.config_id,
        n=config.n,
        m=config.m,
        k=config.k,
        mu=config.mu,
        pc=config.pc,
        lattice_p=config.lattice_p,
        eps_nad=config.eps_nad,
        trials=sum(1 for r in results if r.config_id == config.config_id),
        successes=int(wins.size),
        median_generations=float(np.median(wins)) if has_wins else None,
        mean_generations=float(np.mean(wins)) if has_wins else None,
        min_generations=int(wins.min()) if has_wins else None,
        max_generations=int(wins.max()) if has_wins else None,
        median_evaluations=float(np.median(wins * config.mu)) if has_wins else None,
        regime=config.params().regime_holds(instance),
        population_bound=population_bound_holds(instance, config.mu),
        predicted_bound=predicted_bound(instance, config.mu, config.pc),
    )


# === CSV ===

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _write_csv(path: Path, columns: list[str], rows: Iterable[dict]):
    try:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_cell(row[c]) for c in columns])
    except OSError as exc:
        raise ExperimentIOError(path, exc.strerror or str(exc)) from exc
    logger.info(f"Wrote {path}")


def write_trials_csv(path: Path, results: Sequence[TrialResult]):
    _write_csv(path, TRIAL_COLUMNS, (r.model_dump() for r in results))


def write_summary_csv(path: Path, summaries: Sequence[ConfigSummary]):
    _write_csv(path, SUMMARY_COLUMNS, (s.model_dump() for s in summaries))


def write_trajectories_csv(path: Path, results: Sequence[TrialResult]):
    rows = (
        {"config_id": r.config_id, "trial": r.trial, **row.model_dump()}
        for r in results
        for row in (r.trajectory or [])
    )
    _write_csv(path, TRAJECTORY_COLUMNS, rows)


def read_summary_csv(path) -> SuiteSummary:
    path = Path(path)
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            if reader.fieldnames != SUMMARY_COLUMNS:
                raise ExperimentIOError(path, f"unexpected summary header {reader.fieldnames}")
            rows = [{key: (value if value != "" else None) for key, value in row.items()} for row in reader]
    except OSError as exc:
        if isinstance(exc, ExperimentIOError):
            raise
        raise ExperimentIOError(path, exc.strerror or str(exc)) from exc
    try:
        return SuiteSummary(configs=[ConfigSummary(**row) for row in rows], files=[str(path)])
    except ValidationError as exc:
        raise ExperimentIOError(path, f"malformed summary row: {exc.errors()[0]['msg']}") from exc


# === Suites ===

def _warn_off_regime(config: ExperimentConfig):
    instance = config.instance()
    if not population_bound_holds(instance, config.mu):
        logger.warning(
            f"[{config.config_id}] mu={config.mu} is below 2*(1+2n/m)^(m/2)="
            f"{2 * (instance.block_len + 1) ** instance.num_blocks}; the runtime guarantees do not apply"
        )


def run_suite(
    configs: Sequence[ExperimentConfig],
    out_dir=None,
    workers: Optional[int] = None,
) -> SuiteSummary:
    """Run every trial of every config and write trials.csv, summary.csv and optionally trajectories.csv."""
    if not configs:
        raise UsageError("run_suite needs at least one config")
    ids = [c.config_id for c in configs]
    if len(set(ids)) != len(ids):
        raise UsageError(f"config_id values must be unique, got {ids}")

    settings = get_settings()
    target = Path(out_dir or configs[0].out or settings.output_dir)
    workers = workers or settings.workers
    try:
        target.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ExperimentIOError(target, exc.strerror or str(exc)) from exc

    tasks = []
    for config in configs:
        _warn_off_regime(config)
        logger.info(
            f"[{config.config_id}] {config.trials} trials of {config.instance().label()} "
            f"(mu={config.mu}, pc={config.pc:g}, lattice_p={config.lattice_p}, eps_nad={config.eps_nad:g}, "
            f"max_generations={config.max_generations})"
        )
        tasks.extend((config, i) for i in range(config.trials))

    if workers > 1 and len(tasks) > 1:
        logger.info(f"Running {len(tasks)} trials on {workers} worker processes")
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_task, tasks))
    else:
        results = [_run_task(task) for task in tasks]

    summaries = [summarize(config, [r for r in results if r.config_id == config.config_id]) for config in configs]

    files = [target / TRIALS_FILE, target / SUMMARY_FILE]
    write_trials_csv(files[0], results)
    write_summary_csv(files[1], summaries)
    if any(c.trajectories for c in configs):
        files.append(target / TRAJECTORY_FILE)
        write_trajectories_csv(files[2], results)

    return SuiteSummary(configs=summaries, files=[str(f) for f in files])


def compare_crossover(mutation_only: ConfigSummary, crossover: ConfigSummary) -> SpeedupReport:
    """Ratio of median generations, mutation-only over crossover."""
    key_a = (mutation_only.n, mutation_only.m, mutation_only.k, mutation_only.mu)
    key_b = (crossover.n, crossover.m, crossover.k, crossover.mu)
    if key_a != key_b:
        raise UsageError(f"Summaries come from different (n, m, k, mu): {key_a} vs {key_b}")
    for summary in (mutation_only, crossover):
        if summary.median_generations is None:
            raise UsageError(f"Config {summary.config_id} has no successful trials to compare")

    a, b = mutation_only.median_generations, crossover.median_generations
    if a == b:
        ratio = 1.0
    elif b == 0:
        raise UsageError(f"Config {crossover.config_id} has median 0; the speedup ratio is undefined")
    else:
        ratio = a / b
    return SpeedupReport(
        config_a=mutation_only.config_id,
        config_b=crossover.config_id,
        median_mutation_only=a,
        median_crossover=b,
        ratio=ratio,
    )


def initialization_rate(instance: OjzjInstance, mu: int, samples: int, master_seed: int = 0) -> float:
    """Fraction of seeded uniform initial populations that already contain an inner-block individual."""
    if mu < 1 or samples < 1:
        raise UsageError(f"mu and samples must be positive, got mu={mu}, samples={samples}")
    hits = 0
    for sample in range(samples):
        rng = RandomStream.for_trial(master_seed, sample)
        genomes = [uniform_random_genome(rng, instance.n) for _ in range(mu)]
        population = [Individual(g, evaluate(instance, g)) for g in genomes]
        hits += initialization_success(instance, population)
    return hits / samples
