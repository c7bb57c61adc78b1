"""Built-in invariant suite behind the ``check`` subcommand."""

import logging
from fractions import Fraction
from typing import Callable, NamedTuple

import numpy as np

from app.core.analytics.bounds import cover_cap, default_lattice_p
from app.core.analytics.metrics import Trajectory, monotonicity_violations, record_generation
from app.core.errors import Nsga3Error
from app.core.evolution.bitcore import (
    Genome,
    RandomStream,
    standard_bit_mutation,
    uniform_crossover,
    uniform_random_genome,
)
from app.core.evolution.dominance import naive_peeling_sort, non_dominated_sort
from app.core.evolution.nsga3 import AlgorithmParams, generate_reference_points, run_generations
from app.core.evolution.ojzj import OjzjInstance, brute_force_front, evaluate, pareto_front
from app.core.experiments.harness import reference_set

logger = logging.getLogger(__name__)

FRONT_GRID = [(n, m, k) for n in (8, 12, 16) for m in (2, 4) for k in (2, 3) if k * m <= n]
LATTICE_CASES = [(2, 4), (3, 5), (4, 7)]


class CheckOutcome(NamedTuple):
    name: str
    passed: bool
    detail: str


def check_front_oracle() -> CheckOutcome:
    mismatches = []
    for n, m, k in FRONT_GRID:
        instance = OjzjInstance(n, m, k)
        front = pareto_front(instance)
        if front != brute_force_front(instance) or len(front) != instance.front_size():
            mismatches.append(instance.label())
    detail = f"{len(FRONT_GRID)} instances" if not mismatches else f"mismatch on {mismatches}"
    return CheckOutcome("front_oracle", not mismatches, detail)


def check_block_symmetry(samples: int = 200, seed: int = 0) -> CheckOutcome:
    """Complementing a genome swaps the two objectives of every block."""
    rng = RandomStream(seed)
    for n, m, k in FRONT_GRID:
        instance = OjzjInstance(n, m, k)
        for _ in range(samples):
            x = uniform_random_genome(rng, n)
            v, w = evaluate(instance, x), evaluate(instance, x.complement())
            if any(w[2 * j] != v[2 * j + 1] or w[2 * j + 1] != v[2 * j] for j in range(instance.num_blocks)):
                detail = f"{instance.label()}: x={x} gives {v}, complement gives {w}"
                return CheckOutcome("block_symmetry", False, detail)
    return CheckOutcome("block_symmetry", True, f"{samples} genomes on each of {len(FRONT_GRID)} instances")


def check_sort_oracle(populations: int, seed: int = 0) -> CheckOutcome:
    generator = np.random.Generator(np.random.PCG64(seed))
    for index in range(populations):
        size = int(generator.integers(1, 201))
        m = int(generator.choice([2, 4, 6]))
        vectors = [tuple(int(v) for v in row) for row in generator.integers(0, 21, size=(size, m))]
        if non_dominated_sort(vectors).layers != naive_peeling_sort(vectors).layers:
            return CheckOutcome("sort_oracle", False, f"population {index} (size={size}, m={m}) differs")
    return CheckOutcome("sort_oracle", True, f"{populations} random populations")


def check_lattice() -> CheckOutcome:
    for m, p in LATTICE_CASES:
        refs = generate_reference_points(m, p)
        points = list(refs)
        if len(points) != refs.expected_size() or len(set(points)) != len(points):
            return CheckOutcome("lattice", False, f"(m={m}, p={p}): {len(points)} points, {len(set(points))} distinct")
        if any(sum(point.coords, Fraction(0)) != 1 for point in points):
            return CheckOutcome("lattice", False, f"(m={m}, p={p}): coordinates do not sum to 1")
    return CheckOutcome("lattice", True, f"cases {LATTICE_CASES}")


def check_monotonicity(runs: int, generations: int, master_seed: int = 0) -> CheckOutcome:
    """Capped cover numbers and front coverage never drop in the regime config n=12, m=2, k=2, mu=128."""
    instance = OjzjInstance(12, 2, 2)
    front = pareto_front(instance)
    lattice_p = default_lattice_p(instance)
    for pc in (0.0, 0.9):
        params = AlgorithmParams(
            mu=128, p_c=pc, lattice_p=lattice_p, eps_nad=float(instance.f_max), max_generations=generations
        )
        for run in range(runs):
            trajectory = Trajectory(instance, front, cover_cap(instance, params.mu))
            run_generations(
                instance,
                params,
                reference_set(instance.m, lattice_p),
                RandomStream.for_trial(master_seed, run),
                generations,
                lambda observation: record_generation(trajectory, observation),
            )
            violations = monotonicity_violations(trajectory)
            if violations:
                return CheckOutcome("monotonicity", False, f"pc={pc:g} run {run}: drops at t={violations[:5]}")
    return CheckOutcome("monotonicity", True, f"2x{runs} runs of {generations} generations")


def check_variation_statistics(samples: int = 100_000, seed: int = 0) -> CheckOutcome:
    rng = RandomStream(seed)
    parent = Genome(np.zeros(100, dtype=np.uint8))
    flips = np.array([int(standard_bit_mutation(parent, rng).bits.sum()) for _ in range(samples)])
    mean_flips = float(flips.mean())
    zero_fraction = float(np.mean(flips == 0))

    a, b = Genome(np.zeros(6, dtype=np.uint8)), Genome(np.ones(6, dtype=np.uint8))
    all_ones = float(np.mean([uniform_crossover(a, b, rng).bits.all() for _ in range(samples)]))

    passed = 0.97 <= mean_flips <= 1.03 and 0.356 <= zero_fraction <= 0.376 and 0.012 <= all_ones <= 0.019
    detail = f"mean flips {mean_flips:.4f}, zero-flip {zero_fraction:.4f}, crossover all-ones {all_ones:.4f}"
    return CheckOutcome("variation_statistics", passed, detail)


def run_invariant_suite(full: bool = False) -> list[CheckOutcome]:
    """Run every check; ``full`` uses the long monotonicity and sort-oracle settings."""
    checks: list[tuple[str, Callable[[], CheckOutcome]]] = [
        ("front_oracle", check_front_oracle),
        ("block_symmetry", check_block_symmetry),
        ("sort_oracle", lambda: check_sort_oracle(1000 if full else 100)),
        ("lattice", check_lattice),
        ("monotonicity", lambda: check_monotonicity(30, 500) if full else check_monotonicity(2, 60)),
        ("variation_statistics", check_variation_statistics),
    ]
    outcomes = []
    for name, check in checks:
        try:
            outcome = check()
        except Nsga3Error as exc:
            outcome = CheckOutcome(name, False, f"{type(exc).__name__}: {exc}")
        level = logging.INFO if outcome.passed else logging.ERROR
        logger.log(level, f"check {outcome.name}: {'ok' if outcome.passed else 'FAILED'} ({outcome.detail})")
        outcomes.append(outcome)
    return outcomes
