"""Run instrumentation: cover numbers, r-class coverage, jump-event counters and trajectories.

All metrics are read off P_{t+1} after survival selection and never feed back into the engine.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from app.core.errors import UsageError
from app.core.evolution.bitcore import Genome, block_ones
from app.core.evolution.nsga3 import EngineObservation, Individual
from app.core.evolution.ojzj import ObjectiveVector, OjzjInstance, RVector, genome_class


def cover_numbers(population: Sequence[Individual], target_front) -> dict[ObjectiveVector, int]:
    counts = {v: 0 for v in target_front}
    for ind in population:
        if ind.fitness in counts:
            counts[ind.fitness] += 1
    return counts


def r_class_coverage(population: Sequence[Individual], instance: OjzjInstance) -> frozenset[RVector]:
    classes = (genome_class(instance, ind.genome) for ind in population)
    return frozenset(c for c in classes if c is not None)


def count_jump_events(instance: OjzjInstance, variation: Sequence[tuple[Genome, Genome]]) -> tuple[int, int]:
    """(events, k_events) for one generation's (intermediate, offspring) pairs.

    An event is an offspring with some block all-ones or all-zeros whose intermediate block held
    between 1 and block_len - 1 ones. A k-event additionally had the intermediate block exactly k bits away.
    """
    length, k = instance.block_len, instance.k
    events = k_events = 0
    for intermediate, offspring in variation:
        before = block_ones(intermediate, length)
        after = block_ones(offspring, length)
        inside = (before > 0) & (before < length)
        to_ones = (after == length) & inside
        to_zeros = (after == 0) & inside
        if not np.any(to_ones | to_zeros):
            continue
        events += 1
        gap = np.where(to_ones, length - before, np.where(to_zeros, before, -1))
        if np.any(gap == k):
            k_events += 1
    return events, k_events


@dataclass(frozen=True)
class GenerationRecord:
    t: int
    covered_front_count: int
    min_cover: int
    capped_min_cover: int
    r_class_set: frozenset[RVector]
    jump_events: int
    k_jump_events: int

    @property
    def num_r_classes(self) -> int:
        return len(self.r_class_set)


@dataclass
class Trajectory:
    """Per-generation records of one trial; ``cap`` is the largest alpha whose capped cover numbers never drop."""

    instance: OjzjInstance
    target_front: frozenset[ObjectiveVector]
    cap: int
    records: list[GenerationRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def last(self) -> Optional[GenerationRecord]:
        return self.records[-1] if self.records else None


def record_generation(trajectory: Trajectory, observation: EngineObservation) -> Trajectory:
    previous = trajectory.last
    if previous is not None and observation.generation <= previous.t:
        raise UsageError(f"Generation {observation.generation} does not follow recorded generation {previous.t}")

    covers = cover_numbers(observation.population, trajectory.target_front)
    covered = [c for c in covers.values() if c > 0]
    capped = min((min(c, trajectory.cap) for c in covers.values()), default=0)
    events, k_events = count_jump_events(trajectory.instance, observation.variation)
    base_events = previous.jump_events if previous else 0
    base_k_events = previous.k_jump_events if previous else 0

    trajectory.records.append(
        GenerationRecord(
            t=observation.generation,
            covered_front_count=len(covered),
            min_cover=min(covered, default=0),
            capped_min_cover=capped,
            r_class_set=r_class_coverage(observation.population, trajectory.instance),
            jump_events=base_events + events,
            k_jump_events=base_k_events + k_events,
        )
    )
    return trajectory


def first_class_discovery(trajectory: Trajectory) -> dict[RVector, int]:
    discovered: dict[RVector, int] = {}
    for record in trajectory.records:
        for r_class in sorted(record.r_class_set):
            discovered.setdefault(r_class, record.t)
    return discovered


def monotonicity_violations(trajectory: Trajectory) -> list[int]:
    """Generations at which capped_min_cover, covered_front_count or the r-class set shrank."""
    violations = []
    for before, after in zip(trajectory.records, trajectory.records[1:]):
        if (
            after.capped_min_cover < before.capped_min_cover
            or after.covered_front_count < before.covered_front_count
            or not before.r_class_set <= after.r_class_set
        ):
            violations.append(after.t)
    return violations
