"""Bitstring genomes, the two variation operators and the seeded randomness contract.

Genomes are immutable numpy ``uint8`` vectors. All randomness flows through
``RandomStream`` so a run replayed with the same seed is bit-identical.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from app.core.errors import UsageError

_MASK64 = (1 << 64) - 1


class Genome:
    """Fixed-length bit vector. Length and bit values are the only observable state."""

    __slots__ = ("_bits",)

    def __init__(self, bits: Iterable[int] | np.ndarray):
        arr = np.array(bits, dtype=np.int64).ravel()
        if arr.size == 0:
            raise UsageError("Genome length must be positive")
        if np.any((arr != 0) & (arr != 1)):
            raise UsageError("Genome bits must be 0 or 1")
        packed = arr.astype(np.uint8)
        packed.flags.writeable = False
        self._bits = packed

    @classmethod
    def from_string(cls, text: str) -> "Genome":
        """Build from a string such as ``"1111 0011"``; whitespace is ignored."""
        digits = "".join(text.split())
        if not digits or set(digits) - {"0", "1"}:
            raise UsageError(f"Not a bit string: {text!r}")
        return cls([int(c) for c in digits])

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "Genome":
        # trusted internal constructor: arr is a fresh 0/1 uint8 vector
        genome = cls.__new__(cls)
        arr.flags.writeable = False
        genome._bits = arr
        return genome

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def n(self) -> int:
        return int(self._bits.size)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, Genome):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self._bits, other._bits))

    def __hash__(self) -> int:
        return hash((self.n, self._bits.tobytes()))

    def __str__(self) -> str:
        return "".join("1" if b else "0" for b in self._bits)

    def __repr__(self) -> str:
        return f"Genome('{self}')"

    def complement(self) -> "Genome":
        return Genome._wrap((1 - self._bits).astype(np.uint8))


def ones(x: Genome) -> int:
    return int(x.bits.sum())


def zeros(x: Genome) -> int:
    return x.n - ones(x)


def _check_same_length(x: Genome, y: Genome):
    if x.n != y.n:
        raise UsageError(f"Genome lengths differ: {x.n} != {y.n}")


def hamming(x: Genome, y: Genome) -> int:
    _check_same_length(x, y)
    return int(np.count_nonzero(x.bits != y.bits))


def block(x: Genome, j: int, block_len: int) -> Genome:
    """Block ``j`` (1-based) occupies bits ``[(j-1)*block_len, j*block_len)``."""
    if block_len < 1 or x.n % block_len != 0:
        raise UsageError(f"Block length {block_len} does not divide genome length {x.n}")
    num_blocks = x.n // block_len
    if not 1 <= j <= num_blocks:
        raise UsageError(f"Block index {j} outside [1, {num_blocks}]")
    return Genome._wrap(x.bits[(j - 1) * block_len : j * block_len].copy())


def block_ones(x: Genome, block_len: int) -> np.ndarray:
    """Ones-count of every block, in block order."""
    return x.bits.reshape(-1, block_len).sum(axis=1)


class RandomStream:
    """Seeded PCG64 stream. The generator is pinned so draws are stable across platforms."""

    def __init__(self, seed: int):
        if not 0 <= int(seed) <= _MASK64:
            raise UsageError(f"Seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = int(seed)
        self._generator = np.random.Generator(np.random.PCG64(self.seed))

    @staticmethod
    def trial_seed(master_seed: int, trial_index: int) -> int:
        """64-bit seed of trial ``trial_index``; a pure function of both arguments."""
        sequence = np.random.SeedSequence(entropy=int(master_seed) & _MASK64, spawn_key=(int(trial_index),))
        return int(sequence.generate_state(1, dtype=np.uint64)[0])

    @classmethod
    def for_trial(cls, master_seed: int, trial_index: int) -> "RandomStream":
        return cls(cls.trial_seed(master_seed, trial_index))

    def random(self, size: int | None = None):
        return self._generator.random(size)

    def index(self, upper: int) -> int:
        """Uniform integer in ``[0, upper)``."""
        return int(self._generator.integers(upper))

    def sample_without_replacement(self, population_size: int, count: int) -> list[int]:
        if count == 0:
            return []
        return [int(i) for i in self._generator.choice(population_size, size=count, replace=False)]

    def bits(self, n: int) -> np.ndarray:
        return self._generator.integers(0, 2, size=n, dtype=np.uint8)


def uniform_random_genome(rng: RandomStream, n: int) -> Genome:
    if n < 1:
        raise UsageError(f"Genome length must be positive, got {n}")
    return Genome._wrap(rng.bits(n))


def standard_bit_mutation(y: Genome, rng: RandomStream) -> Genome:
    """Flip every bit independently with probability 1/n; the input is left untouched."""
    flips = rng.random(y.n) < 1.0 / y.n
    return Genome._wrap(np.bitwise_xor(y.bits, flips.astype(np.uint8)))


def uniform_crossover(a: Genome, b: Genome, rng: RandomStream) -> Genome:
    """Take each position from ``a`` or ``b`` with probability 1/2."""
    _check_same_length(a, b)
    from_a = rng.random(a.n) < 0.5
    return Genome._wrap(np.where(from_a, a.bits, b.bits).astype(np.uint8))

