"""The m-objective OneJumpZeroJump benchmark, its Pareto front and the per-block r-classification.

Objective pair (2j-1, 2j) reads only block j (1-based). All values are exact integers.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.core.errors import RegimeError, UsageError
from app.core.evolution.bitcore import Genome, block_ones
from app.core.evolution.dominance import weakly_dominates

logger = logging.getLogger(__name__)

ObjectiveVector = tuple[int, ...]
RVector = tuple[int, ...]

BRUTE_FORCE_MAX_N = 24
_ENUMERATION_CHUNK = 1 << 16


@dataclass(frozen=True)
class OjzjInstance:
    """Benchmark parameters. Invalid combinations are rejected at construction."""

    n: int
    m: int
    k: int

    def __post_init__(self):
        if self.m < 2 or self.m % 2 != 0:
            raise UsageError(f"m must be even and at least 2, got m={self.m}")
        if self.n < 1 or self.n % (self.m // 2) != 0:
            raise UsageError(f"n must be a positive multiple of m/2={self.m // 2}, got n={self.n}")
        if not 2 <= self.k <= self.block_len:
            raise UsageError(f"k must satisfy 2 <= k <= 2n/m={self.block_len}, got k={self.k}")

    @property
    def num_blocks(self) -> int:
        return self.m // 2

    @property
    def block_len(self) -> int:
        return 2 * self.n // self.m

    @property
    def f_max(self) -> int:
        return self.k + self.block_len

    @property
    def front_regime(self) -> bool:
        """Whether the closed-form front (cardinality formula) applies: k <= n/m."""
        return self.k * self.m <= self.n

    def front_size(self) -> int:
        return (self.block_len - 2 * self.k + 3) ** self.num_blocks

    def label(self) -> str:
        return f"{self.m}-OJZJ_{self.k}(n={self.n})"


def block_objectives(instance: OjzjInstance, ones_in_block: int) -> tuple[int, int]:
    """(f_odd, f_even) of one block with ``ones_in_block`` ones."""
    length, k = instance.block_len, instance.k
    if not 0 <= ones_in_block <= length:
        raise UsageError(f"Ones count {ones_in_block} outside [0, {length}]")
    o = ones_in_block
    z = length - o
    f_odd = k + o if (o <= length - k or o == length) else length - o
    f_even = k + z if (z <= length - k or z == length) else length - z
    return f_odd, f_even


def _objectives_from_counts(instance: OjzjInstance, counts: np.ndarray) -> np.ndarray:
    """Vectorised ``block_objectives`` over a (rows, m/2) matrix of block ones-counts."""
    length, k = instance.block_len, instance.k
    o = counts.astype(np.int64)
    z = length - o
    f_odd = np.where((o <= length - k) | (o == length), k + o, length - o)
    f_even = np.where((z <= length - k) | (z == length), k + z, length - z)
    out = np.empty((counts.shape[0], instance.m), dtype=np.int64)
    out[:, 0::2] = f_odd
    out[:, 1::2] = f_even
    return out


def _check_genome(instance: OjzjInstance, x: Genome):
    if x.n != instance.n:
        raise UsageError(f"Genome length {x.n} does not match instance n={instance.n}")


def evaluate(instance: OjzjInstance, x: Genome) -> ObjectiveVector:
    _check_genome(instance, x)
    values: list[int] = []
    for count in block_ones(x, instance.block_len):
        values.extend(block_objectives(instance, int(count)))
    return tuple(values)


def r_vector(instance: OjzjInstance, v: ObjectiveVector) -> RVector:
    """Classify a front vector per block: -1 all-zeros end, +1 all-ones end, 0 middle."""
    if len(v) != instance.m:
        raise UsageError(f"Objective vector has {len(v)} entries, expected {instance.m}")
    length, k = instance.block_len, instance.k
    entries = []
    for j in range(instance.num_blocks):
        first, second = v[2 * j], v[2 * j + 1]
        if first + second != 2 * k + length:
            raise UsageError(f"{v} is not a Pareto-front vector (block {j + 1} does not sum to 2k+2n/m)")
        if first == k:
            entries.append(-1)
        elif first == length + k:
            entries.append(1)
        elif 2 * k <= first <= length:
            entries.append(0)
        else:
            raise UsageError(f"{v} is not a Pareto-front vector (block {j + 1} value {first} in the gap)")
    return tuple(entries)


def _block_levels(instance: OjzjInstance) -> list[int]:
    length, k = instance.block_len, instance.k
    return sorted({k, *range(2 * k, length + 1), length + k})


def pareto_front(instance: OjzjInstance) -> frozenset[ObjectiveVector]:
    """Closed-form front; refuses outside k <= n/m where the formula is not guaranteed."""
    if not instance.front_regime:
        raise RegimeError(
            f"Closed-form Pareto front requires k <= n/m; got k={instance.k}, n/m={instance.n / instance.m:g}"
        )
    total = 2 * instance.k + instance.block_len
    pairs = [(level, total - level) for level in _block_levels(instance)]
    front = frozenset(
        tuple(value for pair in combo for value in pair)
        for combo in itertools.product(pairs, repeat=instance.num_blocks)
    )
    if len(front) != instance.front_size():
        raise RegimeError(f"Front of {instance.label()} has {len(front)} vectors, formula gives {instance.front_size()}")
    return front


def sorted_front(front: frozenset[ObjectiveVector]) -> list[ObjectiveVector]:
    return sorted(front)


def _all_objective_vectors(instance: OjzjInstance) -> set[ObjectiveVector]:
    """Objective vectors of every genome in {0,1}^n, evaluated in chunks."""
    n, length = instance.n, instance.block_len
    shifts = np.arange(n, dtype=np.int64)
    seen: set[ObjectiveVector] = set()
    for start in range(0, 1 << n, _ENUMERATION_CHUNK):
        codes = np.arange(start, min(start + _ENUMERATION_CHUNK, 1 << n), dtype=np.int64)
        bits = (codes[:, None] >> shifts[None, :]) & 1
        counts = bits.reshape(len(codes), instance.num_blocks, length).sum(axis=2)
        for row in np.unique(_objectives_from_counts(instance, counts), axis=0):
            seen.add(tuple(int(v) for v in row))
    return seen


def brute_force_front(instance: OjzjInstance) -> frozenset[ObjectiveVector]:
    """Independent oracle: enumerate all 2^n genomes and keep the non-dominated vectors."""
    if instance.n > BRUTE_FORCE_MAX_N:
        raise UsageError(f"Brute force needs n <= {BRUTE_FORCE_MAX_N}, got n={instance.n}")
    vectors = _all_objective_vectors(instance)
    logger.debug(f"{instance.label()}: {len(vectors)} distinct objective vectors over 2^{instance.n} genomes")
    return frozenset(
        v for v in vectors if not any(u != v and weakly_dominates(u, v) for u in vectors)
    )


def genome_class(instance: OjzjInstance, x: Genome) -> Optional[RVector]:
    """The r-vector of a Pareto-optimal genome, or None when x is not Pareto-optimal."""
    _check_genome(instance, x)
    length, k = instance.block_len, instance.k
    entries = []
    for count in block_ones(x, length):
        if count == 0:
            entries.append(-1)
        elif count == length:
            entries.append(1)
        elif k <= count <= length - k:
            entries.append(0)
        else:
            return None
    return tuple(entries)
