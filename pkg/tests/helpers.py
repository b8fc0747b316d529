"""Shared generators for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

from splitauth.algebra import AbelianGroup
from splitauth.designs import SourceDistribution, SplittingSystem
from splitauth.ordering import OrderingError, order_development


def skew_linear(m: int) -> SourceDistribution:
    """Pr(s_j) proportional to m - j."""
    total = m * (m + 1) // 2
    return SourceDistribution(tuple(Fraction(m - j, total) for j in range(m)))


def skew_heavy(m: int) -> SourceDistribution:
    """Half the mass on the last source, the rest spread evenly."""
    rest = Fraction(1, 2 * (m - 1))
    return SourceDistribution(tuple([rest] * (m - 1) + [Fraction(1, 2)]))


def distributions(m: int) -> list[SourceDistribution]:
    return [SourceDistribution.uniform(m), skew_linear(m), skew_heavy(m)]


def random_base_block(rng: random.Random, v: int, m: int, size: int | None = None) -> list[list[int]]:
    """m disjoint nonempty parts drawn from Z_v; ``size`` fixes the total."""
    if size is None:
        size = rng.randint(m, min(v, 3 * m))
    points = rng.sample(range(v), size)
    cuts = sorted(rng.sample(range(1, size), m - 1))
    bounds = [0] + cuts + [size]
    return [points[bounds[i]:bounds[i + 1]] for i in range(m)]


def random_group_generated(rng: random.Random, v_max: int = 40) -> tuple[SplittingSystem, list[list[list[int]]]]:
    """Development of 1-3 random base blocks over Z_v with full orbits.

    Half the draws use one block size for every base block, so both sides
    of the equal-size question get exercised.
    """
    while True:
        v = rng.randint(4, v_max)
        m = rng.randint(2, min(4, v // 2))
        count = rng.randint(1, 3)
        equal = rng.random() < 0.5
        size = rng.randint(m, min(v, 3 * m)) if equal else None
        bases = [random_base_block(rng, v, m, size) for _ in range(count)]
        try:
            return order_development(bases, AbelianGroup.cyclic(v)), bases
        except OrderingError:
            continue


def random_small_system(rng: random.Random, v_max: int = 6) -> SplittingSystem:
    """Arbitrary (not necessarily symmetric) system on at most ``v_max`` points."""
    v = rng.randint(2, v_max)
    m = rng.randint(2, min(3, v))
    b = rng.randint(1, 5)
    return SplittingSystem(v, tuple(tuple(random_base_block(rng, v, m)) for _ in range(b)))
