"""Finite abelian groups presented as direct products of cyclic groups.

Elements are plain tuples of residues, one per cyclic factor.  The group
object carries the arithmetic; elements carry no reference to their group.

>>> G = AbelianGroup((2, 4))
>>> G.add((1, 3), (1, 2))
(0, 1)
>>> G.negate((1, 3))
(1, 1)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

GroupElement = tuple[int, ...]

DEFAULT_ENUMERATION_CAP = 10**6


class GroupError(ValueError):
    """Raised on malformed groups, foreign elements or enumeration overflow."""


@dataclass(frozen=True)
class AbelianGroup:
    """Z_{n_1} x ... x Z_{n_d}."""

    orders: tuple[int, ...]
    cap: int = field(default=DEFAULT_ENUMERATION_CAP, compare=False)

    def __post_init__(self) -> None:
        orders = tuple(int(n) for n in self.orders)
        if not orders:
            raise GroupError("a group needs at least one cyclic factor")
        if any(n < 1 for n in orders):
            raise GroupError(f"cyclic orders must be positive, got {list(orders)}")
        object.__setattr__(self, "orders", orders)

    @classmethod
    def cyclic(cls, n: int) -> AbelianGroup:
        return cls((n,))

    @property
    def order(self) -> int:
        return math.prod(self.orders)

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def identity(self) -> GroupElement:
        return (0,) * self.rank

    def element(self, value: int | Sequence[int]) -> GroupElement:
        """Coerce ``value`` to a reduced element.

        A bare integer is accepted for cyclic groups only.
        """
        if isinstance(value, int):
            if self.rank != 1:
                raise GroupError(f"integer {value} given for a group of rank {self.rank}")
            value = (value,)
        coords = tuple(int(x) for x in value)
        self._check_dim(coords)
        return tuple(x % n for x, n in zip(coords, self.orders))

    def _check_dim(self, a: Sequence[int]) -> None:
        if len(a) != self.rank:
            raise GroupError(
                f"element {tuple(a)} has {len(a)} coordinates, group {list(self.orders)} "
                f"has {self.rank} factors"
            )

    def contains(self, a: Sequence[int]) -> bool:
        return len(a) == self.rank and all(0 <= x < n for x, n in zip(a, self.orders))

    def add(self, a: GroupElement, b: GroupElement) -> GroupElement:
        self._check_dim(a)
        self._check_dim(b)
        return tuple((x + y) % n for x, y, n in zip(a, b, self.orders))

    def negate(self, a: GroupElement) -> GroupElement:
        self._check_dim(a)
        return tuple((-x) % n for x, n in zip(a, self.orders))

    def sub(self, a: GroupElement, b: GroupElement) -> GroupElement:
        return self.add(a, self.negate(b))

    def enumerate(self) -> list[GroupElement]:
        """All elements in lexicographic coordinate order."""
        if self.order > self.cap:
            raise GroupError(f"group order {self.order} exceeds enumeration cap {self.cap}")
        return list(product(*(range(n) for n in self.orders)))

    def index(self, a: GroupElement) -> int:
        """Position of ``a`` in :meth:`enumerate` (mixed-radix value)."""
        self._check_dim(a)
        idx = 0
        for x, n in zip(a, self.orders):
            if not 0 <= x < n:
                raise GroupError(f"element {tuple(a)} is not reduced")
            idx = idx * n + x
        return idx

    def from_index(self, idx: int) -> GroupElement:
        if not 0 <= idx < self.order:
            raise GroupError(f"index {idx} out of range for group of order {self.order}")
        coords = []
        for n in reversed(self.orders):
            idx, x = divmod(idx, n)
            coords.append(x)
        return tuple(reversed(coords))

    def addition_table(self) -> list[list[int]]:
        """``table[i][j]`` = index of element_i + element_j."""
        elems = self.enumerate()
        return [[self.index(self.add(a, b)) for b in elems] for a in elems]

    def translate_indices(self, g: GroupElement, points: Iterable[int]) -> frozenset[int]:
        """Translate a set of element indices by ``g``."""
        return frozenset(self.index(self.add(g, self.from_index(p))) for p in points)

    def __str__(self) -> str:
        return " x ".join(f"Z_{n}" for n in self.orders)
