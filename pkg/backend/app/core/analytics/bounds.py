"""Leading terms of the runtime statements for m-OJZJ_k, used for predicted-vs-observed reports.

Hidden O-constants are not fitted; only ratios between configurations are meaningful.
"""

import math
from typing import Sequence

from app.core.errors import UsageError
from app.core.evolution.bitcore import block_ones
from app.core.evolution.nsga3 import Individual
from app.core.evolution.ojzj import OjzjInstance


def max_incomparable_bound(instance: OjzjInstance) -> int:
    """Upper bound (2n/m + 1)^{m/2} on a set of mutually incomparable solutions."""
    return (instance.block_len + 1) ** instance.num_blocks


def cover_cap(instance: OjzjInstance, mu: int) -> int:
    """Largest alpha for which cover numbers min(c_t(v), alpha) are preserved."""
    return mu // (2 * max_incomparable_bound(instance))


def default_lattice_p(instance: OjzjInstance) -> int:
    """Smallest integer p with p >= 2 m^{3/2} f_max, i.e. p^2 >= 4 m^3 f_max^2."""
    target = 4 * instance.m**3 * instance.f_max**2
    p = math.isqrt(target)
    return p if p * p == target else p + 1


def population_bound_holds(instance: OjzjInstance, mu: int) -> bool:
    """(1 + 2n/m)^{m/2} <= mu/2."""
    return 2 * max_incomparable_bound(instance) <= mu


def mutation_only_bound(instance: OjzjInstance, mu: int, pc: float) -> float:
    n, m, k = instance.n, instance.m, instance.k
    if not 0.0 <= pc < 1.0:
        raise UsageError(f"p_c must lie in [0, 1), got {pc}")
    spread = m * m * n * math.log(n / m) / (1.0 - pc)
    jump = m * n**k * max_incomparable_bound(instance) / (mu * (1.0 - pc))
    return spread + jump


def crossover_bound(instance: OjzjInstance, mu: int, pc: float) -> float:
    n, m, k = instance.n, instance.m, instance.k
    if not 0.0 < pc < 1.0:
        raise UsageError(f"Crossover bound needs p_c in (0, 1), got {pc}")
    return k * m ** (k + 1) * n**k * (80 * math.e) ** k * mu / (pc * math.factorial(k) * (1.0 - pc) ** k)


def lower_bound_m4(instance: OjzjInstance, mu: int) -> float:
    if instance.m != 4:
        raise UsageError(f"The mutation-only lower bound is stated for m=4, got m={instance.m}")
    return instance.n**instance.k / mu


def predicted_bound(instance: OjzjInstance, mu: int, pc: float) -> float:
    return crossover_bound(instance, mu, pc) if pc > 0 else mutation_only_bound(instance, mu, pc)


def initialization_success(instance: OjzjInstance, population: Sequence[Individual]) -> bool:
    """Some individual has k <= ones(block j) <= 2n/m - k in every block."""
    low, high = instance.k, instance.block_len - instance.k
    for ind in population:
        counts = block_ones(ind.genome, instance.block_len)
        if bool(((counts >= low) & (counts <= high)).all()):
            return True
    return False
