"""NSGA-III engine: reference lattice, normalisation, association, niching survival selection
(capped at mu/2 with a uniform random fill) and the generation loop.

Maximisation throughout. One ``EngineState`` belongs to exactly one trial.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, NamedTuple, Optional, Sequence

import numpy as np

from app.core.errors import InvariantViolation, UsageError
from app.core.evolution.bitcore import (
    Genome,
    RandomStream,
    standard_bit_mutation,
    uniform_crossover,
    uniform_random_genome,
)
from app.core.evolution.dominance import non_dominated_sort
from app.core.evolution.ojzj import ObjectiveVector, OjzjInstance, evaluate

logger = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-9
DENOMINATOR_FLOOR = 1e-9
# upper bound on floats materialised at once while computing point-to-ray distances
_DISTANCE_CHUNK = 1 << 22


# ---------------------------------------------------------------------------
# Reference points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReferencePoint:
    """A lattice point a/p on the unit simplex with exact rational coordinates."""

    coords: tuple[Fraction, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.coords):
            raise InvariantViolation(f"Reference point has a negative coordinate: {self.coords}")
        if sum(self.coords, Fraction(0)) != 1:
            raise InvariantViolation(f"Reference point coordinates do not sum to 1: {self.coords}")

    def as_floats(self) -> np.ndarray:
        return np.array([float(c) for c in self.coords], dtype=np.float64)


class ReferenceSet:
    """All compositions of p into m non-negative parts, scaled by 1/p, in lexicographic order.

    Integer numerators are kept; exact ``ReferencePoint`` objects are built on demand.
    """

    def __init__(self, m: int, p: int, numerators: np.ndarray):
        self.m = m
        self.p = p
        self.numerators = numerators
        self.numerators.flags.writeable = False
        if np.any(self.numerators.sum(axis=1) != p):
            raise InvariantViolation(f"Lattice rows do not sum to p={p}")
        self.directions = self.numerators.astype(np.float64) / p
        self.directions.flags.writeable = False
        self.squared_norms = np.einsum("ij,ij->i", self.directions, self.directions)

    def __len__(self) -> int:
        return int(self.numerators.shape[0])

    def __iter__(self) -> Iterator[ReferencePoint]:
        return (self.point(i) for i in range(len(self)))

    def point(self, index: int) -> ReferencePoint:
        return ReferencePoint(tuple(Fraction(int(a), self.p) for a in self.numerators[index]))

    def expected_size(self) -> int:
        return math.comb(self.p + self.m - 1, self.m - 1)


def generate_reference_points(m: int, p: int) -> ReferenceSet:
    if m < 2:
        raise UsageError(f"Reference lattice needs m >= 2, got m={m}")
    if p < 1:
        raise UsageError(f"Reference lattice needs p >= 1, got p={p}")
    # stars and bars: m-1 bar positions among p+m-1 slots
    bars = np.array(list(itertools.combinations(range(p + m - 1), m - 1)), dtype=np.int64)
    bars = bars.reshape(-1, m - 1)
    left = np.concatenate([np.full((len(bars), 1), -1, dtype=np.int64), bars], axis=1)
    right = np.concatenate([bars, np.full((len(bars), 1), p + m - 1, dtype=np.int64)], axis=1)
    numerators = right - left - 1
    reference_set = ReferenceSet(m, p, numerators)
    if len(reference_set) != reference_set.expected_size():
        raise InvariantViolation(f"Lattice has {len(reference_set)} points, expected {reference_set.expected_size()}")
    return reference_set


# ---------------------------------------------------------------------------
# Normalisation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NormalizationState:
    """Per-objective extremes over every point seen so far, plus the nadir threshold.

    The nadir is ``max(y_max_j, eps_nad)``; the upper clamp ``y_nad <= y_max`` is not applied.
    """

    eps_nad: float
    y_min: Optional[tuple[int, ...]] = None
    y_max: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if not self.eps_nad > 0:
            raise UsageError(f"eps_nad must be positive, got {self.eps_nad}")

    @property
    def y_nad(self) -> Optional[tuple[float, ...]]:
        if self.y_max is None:
            return None
        return tuple(max(float(v), float(self.eps_nad)) for v in self.y_max)


def update_extremes(state: NormalizationState, vectors: Sequence[ObjectiveVector]) -> NormalizationState:
    if len(vectors) == 0:
        return state
    matrix = np.asarray(vectors, dtype=np.int64)
    lows = matrix.min(axis=0)
    highs = matrix.max(axis=0)
    if state.y_min is not None:
        lows = np.minimum(lows, state.y_min)
        highs = np.maximum(highs, state.y_max)
    return NormalizationState(
        eps_nad=state.eps_nad,
        y_min=tuple(int(v) for v in lows),
        y_max=tuple(int(v) for v in highs),
    )


def _denominators(state: NormalizationState) -> tuple[np.ndarray, np.ndarray]:
    if state.y_min is None:
        raise InvariantViolation("Normalisation requested before any objective vector was seen")
    y_min = np.asarray(state.y_min, dtype=np.float64)
    spread = np.asarray(state.y_nad, dtype=np.float64) - y_min
    if np.any(~np.isfinite(spread)) or np.any(spread < 0):
        raise InvariantViolation(f"Degenerate normalisation: y_min={state.y_min}, y_nad={state.y_nad}")
    return y_min, np.maximum(spread, DENOMINATOR_FLOOR)


def normalize(state: NormalizationState, v: ObjectiveVector) -> np.ndarray:
    return normalize_many(state, [v])[0]


def normalize_many(state: NormalizationState, vectors: Sequence[ObjectiveVector]) -> np.ndarray:
    y_min, spread = _denominators(state)
    matrix = np.asarray(vectors, dtype=np.float64).reshape(len(vectors), len(y_min))
    return (matrix - y_min) / spread


# ---------------------------------------------------------------------------
# Association
# ---------------------------------------------------------------------------


def perpendicular_distance(fn: Sequence[float], r: ReferencePoint | Sequence[float]) -> float:
    """Euclidean distance from ``fn`` to the line through the origin and ``r``."""
    point = np.asarray(fn, dtype=np.float64)
    direction = r.as_floats() if isinstance(r, ReferencePoint) else np.asarray(r, dtype=np.float64)
    squared = float(direction @ direction)
    if squared == 0.0:
        raise UsageError("Reference direction must not be the zero vector")
    residual = point - (float(point @ direction) / squared) * direction
    return float(np.linalg.norm(residual))


def _distance_matrix(points: np.ndarray, refs: ReferenceSet) -> np.ndarray:
    """Distances of every point (rows) to every reference ray (columns), via explicit residuals."""
    directions = refs.directions
    count, m = points.shape
    out = np.empty((count, len(refs)), dtype=np.float64)
    step = max(1, _DISTANCE_CHUNK // max(1, len(refs) * m))
    for start in range(0, count, step):
        chunk = points[start : start + step]
        scale = (chunk @ directions.T) / refs.squared_norms
        residual = chunk[:, None, :] - scale[:, :, None] * directions[None, :, :]
        out[start : start + step] = np.sqrt(np.einsum("prm,prm->pr", residual, residual))
    return out


class Association(NamedTuple):
    ref_index: int
    distance: float


def associate(points: np.ndarray, refs: ReferenceSet, rng: RandomStream) -> list[Association]:
    """Map each normalised point to a closest reference ray; near-exact ties go to a uniform draw."""
    if len(refs) == 0:
        raise UsageError("Association needs at least one reference point")
    points = np.asarray(points, dtype=np.float64).reshape(-1, refs.m)
    distances = _distance_matrix(points, refs)
    result = []
    for row in distances:
        best = float(row.min())
        tied = np.flatnonzero(row <= best + TIE_TOLERANCE)
        choice = int(tied[0]) if tied.size == 1 else int(tied[rng.index(tied.size)])
        result.append(Association(choice, float(row[choice])))
    return result


# ---------------------------------------------------------------------------
# Survival selection
# ---------------------------------------------------------------------------


def survival_select(
    Y: Sequence[ObjectiveVector],
    F_crit: Sequence[ObjectiveVector],
    refs: ReferenceSet,
    norm_state: NormalizationState,
    rng: RandomStream,
    mu: int,
) -> list[int]:
    """Choose ``mu - len(Y)`` members of the critical layer; returns indices into ``F_crit``.

    Niching runs while fewer than mu/2 critical-layer members are chosen. A reference point
    whose associated members are all taken is dropped lazily: it is never picked again, which
    has the same distribution as picking and then deactivating it.
    """
    if not len(Y) < mu <= len(Y) + len(F_crit):
        raise UsageError(f"survival_select needs |Y| < mu <= |Y| + |F|; got |Y|={len(Y)}, |F|={len(F_crit)}, mu={mu}")
    half = mu // 2

    points = normalize_many(norm_state, list(Y) + list(F_crit))
    associations = associate(points, refs, rng)
    y_assoc, f_assoc = associations[: len(Y)], associations[len(Y) :]

    rho: dict[int, int] = {}
    for a in y_assoc:
        rho[a.ref_index] = rho.get(a.ref_index, 0) + 1
    members: dict[int, list[int]] = {}
    for index, a in enumerate(f_assoc):
        members.setdefault(a.ref_index, []).append(index)

    selected: list[int] = []
    while len(selected) < half:
        live = sorted(r for r, candidates in members.items() if candidates)
        if not live:
            raise InvariantViolation("Niching ran out of critical-layer candidates")
        lowest = min(rho.get(r, 0) for r in live)
        tied_refs = [r for r in live if rho.get(r, 0) == lowest]
        r_min = tied_refs[rng.index(len(tied_refs))] if len(tied_refs) > 1 else tied_refs[0]

        candidates = members[r_min]
        closest = min(f_assoc[i].distance for i in candidates)
        nearest = [i for i in candidates if f_assoc[i].distance <= closest + TIE_TOLERANCE]
        chosen = nearest[rng.index(len(nearest))] if len(nearest) > 1 else nearest[0]

        candidates.remove(chosen)
        selected.append(chosen)
        rho[r_min] = rho.get(r_min, 0) + 1
        if len(Y) + len(selected) == mu:
            return selected

    fill = mu - len(Y) - half
    if fill < 0:
        raise InvariantViolation(f"Uniform fill count is negative: mu={mu}, |Y|={len(Y)}")
    taken = set(selected)
    remaining = [i for i in range(len(F_crit)) if i not in taken]
    picks = rng.sample_without_replacement(len(remaining), fill)
    return selected + [remaining[i] for i in picks]


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------


class Individual(NamedTuple):
    genome: Genome
    fitness: ObjectiveVector


@dataclass(frozen=True)
class AlgorithmParams:
    mu: int
    p_c: float
    lattice_p: int
    eps_nad: float
    max_generations: int

    def __post_init__(self):
        if self.mu < 2 or self.mu % 2 != 0:
            raise UsageError(f"mu must be a positive even number, got mu={self.mu}")
        if not 0.0 <= self.p_c < 1.0:
            raise UsageError(f"p_c must lie in [0, 1), got p_c={self.p_c}")
        if self.lattice_p < 1:
            raise UsageError(f"lattice_p must be positive, got {self.lattice_p}")
        if not self.eps_nad > 0:
            raise UsageError(f"eps_nad must be positive, got {self.eps_nad}")
        if self.max_generations < 0:
            raise UsageError(f"max_generations must be non-negative, got {self.max_generations}")

    def regime_holds(self, instance: OjzjInstance) -> bool:
        """Cover-preservation preconditions: p >= 2 m^{3/2} f_max and eps_nad >= f_max."""
        m, f_max = instance.m, instance.f_max
        # p >= 2 m^{3/2} f_max  <=>  p^2 >= 4 m^3 f_max^2 (exact integers)
        return self.lattice_p**2 >= 4 * m**3 * f_max**2 and self.eps_nad >= f_max


@dataclass
class EngineState:
    """Population P_t of exactly mu individuals, plus the last generation's variation record."""

    population: list[Individual]
    generation: int
    normalization: NormalizationState
    rng: RandomStream
    regime_holds: bool = True
    # (intermediate y, offspring z) pairs of the generation that produced this state
    last_variation: list[tuple[Genome, Genome]] = field(default_factory=list)
    last_critical_rank: int = 0


@dataclass(frozen=True)
class EngineObservation:
    generation: int
    population: Sequence[Individual]
    variation: Sequence[tuple[Genome, Genome]]


Observer = Callable[[EngineObservation], None]


def _evaluate_all(instance: OjzjInstance, genomes: Sequence[Genome]) -> list[Individual]:
    return [Individual(g, evaluate(instance, g)) for g in genomes]


def initialize_state(instance: OjzjInstance, params: AlgorithmParams, rng: RandomStream) -> EngineState:
    population = _evaluate_all(instance, [uniform_random_genome(rng, instance.n) for _ in range(params.mu)])
    normalization = update_extremes(NormalizationState(eps_nad=params.eps_nad), [ind.fitness for ind in population])
    regime = params.regime_holds(instance)
    if not regime:
        logger.warning(
            f"{instance.label()}: off-regime run (lattice_p={params.lattice_p}, eps_nad={params.eps_nad:g}, "
            f"f_max={instance.f_max}); cover-number preservation is not guaranteed"
        )
    return EngineState(population=population, generation=0, normalization=normalization, rng=rng, regime_holds=regime)


def _make_offspring(state: EngineState, params: AlgorithmParams) -> list[tuple[Genome, Genome]]:
    rng, parents = state.rng, state.population
    variation: list[tuple[Genome, Genome]] = []
    for _ in range(params.mu // 2):
        a1 = parents[rng.index(params.mu)].genome
        a2 = parents[rng.index(params.mu)].genome
        if rng.random() < params.p_c:
            y1 = uniform_crossover(a1, a2, rng)
            y2 = uniform_crossover(a1, a2, rng)
        else:
            y1, y2 = a1, a2
        variation.append((y1, standard_bit_mutation(y1, rng)))
        variation.append((y2, standard_bit_mutation(y2, rng)))
    return variation


def generation_step(
    state: EngineState, params: AlgorithmParams, refs: ReferenceSet, instance: OjzjInstance
) -> EngineState:
    """One generation: mu offspring, merge, non-dominated sort, whole layers, then niching on F^{i*}."""
    mu = params.mu
    variation = _make_offspring(state, params)
    offspring = _evaluate_all(instance, [z for _, z in variation])
    normalization = update_extremes(state.normalization, [ind.fitness for ind in offspring])

    merged = state.population + offspring
    if len(merged) != 2 * mu:
        raise InvariantViolation(f"Merged pool has {len(merged)} members, expected {2 * mu}")
    ranked = non_dominated_sort([ind.fitness for ind in merged])

    accepted: list[int] = []
    critical: tuple[int, ...] = ()
    critical_rank = 0
    for rank, layer in enumerate(ranked.layers, start=1):
        if len(accepted) + len(layer) >= mu:
            critical, critical_rank = layer, rank
            break
        accepted.extend(layer)

    if len(accepted) + len(critical) == mu:
        chosen = list(critical)
    else:
        picks = survival_select(
            [merged[i].fitness for i in accepted],
            [merged[i].fitness for i in critical],
            refs,
            normalization,
            state.rng,
            mu,
        )
        chosen = [critical[i] for i in picks]

    population = [merged[i] for i in accepted] + [merged[i] for i in chosen]
    if len(population) != mu:
        raise InvariantViolation(f"Population has {len(population)} members after selection, expected {mu}")

    state.population = population
    state.normalization = normalization
    state.generation += 1
    state.last_variation = variation
    state.last_critical_rank = critical_rank
    return state


def is_covered(population: Sequence[Individual], target_front: frozenset[ObjectiveVector]) -> bool:
    present = {ind.fitness for ind in population}
    return target_front <= present


def _observe(observer: Optional[Observer], state: EngineState):
    if observer is not None:
        observer(EngineObservation(state.generation, tuple(state.population), tuple(state.last_variation)))


@dataclass(frozen=True)
class RunOutcome:
    """``generations`` is None when the budget ran out before the front was covered."""

    generations: Optional[int]
    state: EngineState

    @property
    def budget_exhausted(self) -> bool:
        return self.generations is None


def run_until_covered(
    instance: OjzjInstance,
    params: AlgorithmParams,
    refs: ReferenceSet,
    rng: RandomStream,
    target_front: frozenset[ObjectiveVector],
    observer: Optional[Observer] = None,
) -> RunOutcome:
    """Iterate generations until every target vector has cover number >= 1 in P_{t+1}."""
    state = initialize_state(instance, params, rng)
    _observe(observer, state)
    if is_covered(state.population, target_front):
        return RunOutcome(0, state)
    for _ in range(params.max_generations):
        generation_step(state, params, refs, instance)
        _observe(observer, state)
        if is_covered(state.population, target_front):
            logger.debug(f"{instance.label()}: front covered after {state.generation} generations")
            return RunOutcome(state.generation, state)
    return RunOutcome(None, state)


def run_generations(
    instance: OjzjInstance,
    params: AlgorithmParams,
    refs: ReferenceSet,
    rng: RandomStream,
    generations: int,
    observer: Optional[Observer] = None,
) -> EngineState:
    """Run a fixed number of generations regardless of coverage."""
    state = initialize_state(instance, params, rng)
    _observe(observer, state)
    for _ in range(generations):
        generation_step(state, params, refs, instance)
        _observe(observer, state)
    return state
