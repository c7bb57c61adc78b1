"""Pareto dominance (maximisation) and non-dominated sorting into layers F^1, F^2, ..."""

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from app.core.errors import UsageError


def _check_dimension(u: Sequence[int], v: Sequence[int]):
    if len(u) != len(v):
        raise UsageError(f"Objective vectors differ in dimension: {len(u)} != {len(v)}")


def weakly_dominates(u: Sequence[int], v: Sequence[int]) -> bool:
    _check_dimension(u, v)
    return all(a >= b for a, b in zip(u, v))


def dominates(u: Sequence[int], v: Sequence[int]) -> bool:
    _check_dimension(u, v)
    return all(a >= b for a, b in zip(u, v)) and any(a > b for a, b in zip(u, v))


@dataclass(frozen=True)
class RankedPopulation:
    """Layers of individual indices (input order inside a layer) and the 1-based rank of each index."""

    layers: tuple[tuple[int, ...], ...] = ()
    rank_of: dict[int, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.layers)


def _from_ranks(ranks: Sequence[int]) -> RankedPopulation:
    if not len(ranks):
        return RankedPopulation()
    buckets: list[list[int]] = [[] for _ in range(max(ranks))]
    for index, rank in enumerate(ranks):
        buckets[rank - 1].append(index)
    return RankedPopulation(
        layers=tuple(tuple(b) for b in buckets),
        rank_of={index: int(rank) for index, rank in enumerate(ranks)},
    )


def non_dominated_sort(vectors: Sequence[Sequence[int]]) -> RankedPopulation:
    """Deb's counting sort on the distinct vectors; duplicates inherit the same rank."""
    if len(vectors) == 0:
        return RankedPopulation()
    dimension = len(vectors[0])
    for v in vectors:
        if len(v) != dimension:
            raise UsageError(f"Objective vectors differ in dimension: {len(v)} != {dimension}")

    matrix = np.asarray(vectors, dtype=np.int64).reshape(len(vectors), dimension)
    unique, inverse = np.unique(matrix, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)

    # beats[i, j]: unique vector i dominates unique vector j
    geq = np.all(unique[:, None, :] >= unique[None, :, :], axis=2)
    gt = np.any(unique[:, None, :] > unique[None, :, :], axis=2)
    beats = geq & gt

    dominated_by = beats.sum(axis=0)
    unique_rank = np.zeros(len(unique), dtype=np.int64)
    current = np.flatnonzero(dominated_by == 0)
    rank = 1
    while current.size:
        unique_rank[current] = rank
        dominated_by = dominated_by - beats[current].sum(axis=0)
        dominated_by[unique_rank > 0] = -1
        current = np.flatnonzero(dominated_by == 0)
        rank += 1
    return _from_ranks([int(r) for r in unique_rank[inverse]])


def naive_peeling_sort(vectors: Sequence[Sequence[int]]) -> RankedPopulation:
    """Reference oracle: repeatedly peel off every remaining vector no remaining vector dominates."""
    remaining = list(range(len(vectors)))
    ranks = [0] * len(vectors)
    rank = 0
    while remaining:
        rank += 1
        layer = [i for i in remaining if not any(dominates(vectors[j], vectors[i]) for j in remaining)]
        for i in layer:
            ranks[i] = rank
        remaining = [i for i in remaining if ranks[i] == 0]
    return _from_ranks(ranks)
