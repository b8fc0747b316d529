"""Core data model and the JSON interchange format.

Points are always integers ``0..v-1``.  Blocks of a splitting system are
ordered tuples of disjoint frozensets; the position of a part inside its
block is the source it encodes.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

from .algebra import AbelianGroup, GroupElement, GroupError

Part = frozenset[int]
Block = tuple[Part, ...]


class DesignError(ValueError):
    """An object violates a structural invariant of its type."""


class SchemaError(DesignError):
    """A document does not match the interchange schema."""

    def __init__(self, path: str, message: str) -> None:
        self.path = path
        super().__init__(f"{path}: {message}")


def _as_block(parts: Iterable[Iterable[int]]) -> Block:
    return tuple(frozenset(int(p) for p in part) for part in parts)


def _check_block(block: Block, v: int | None, where: str) -> None:
    seen: set[int] = set()
    for j, part in enumerate(block):
        if not part:
            raise DesignError(f"{where}: part {j} is empty")
        for p in part:
            if v is not None and not 0 <= p < v:
                raise DesignError(f"{where}: point {p} out of range 0..{v - 1}")
        if seen & part:
            raise DesignError(f"{where}: parts overlap on {sorted(seen & part)}")
        seen |= part


@dataclass(frozen=True)
class SplittingSystem:
    """v points and an ordered list of blocks, each block m disjoint parts."""

    v: int
    blocks: tuple[Block, ...]

    def __post_init__(self) -> None:
        blocks = tuple(_as_block(b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if self.v < 1:
            raise DesignError(f"v must be positive, got {self.v}")
        if not blocks:
            raise DesignError("a splitting system needs at least one block")
        m = len(blocks[0])
        if m < 2:
            raise DesignError(f"a splitting system needs m >= 2 parts, got {m}")
        for i, block in enumerate(blocks):
            if len(block) != m:
                raise DesignError(f"block {i} has {len(block)} parts, expected {m}")
            _check_block(block, self.v, f"block {i}")

    @property
    def b(self) -> int:
        return len(self.blocks)

    @property
    def m(self) -> int:
        return len(self.blocks[0])

    def replication(self) -> list[int]:
        """Number of blocks containing each point."""
        r = [0] * self.v
        for block in self.blocks:
            for part in block:
                for p in part:
                    r[p] += 1
        return r

    def repeated_blocks(self) -> list[list[int]]:
        """Groups of block indices that carry identical blocks."""
        where: dict[Block, list[int]] = {}
        for i, block in enumerate(self.blocks):
            where.setdefault(block, []).append(i)
        return [idx for idx in where.values() if len(idx) > 1]

    def block_multiset(self) -> Counter[Block]:
        return Counter(self.blocks)

    def with_blocks(self, blocks: Iterable[Iterable[Iterable[int]]]) -> SplittingSystem:
        return SplittingSystem(self.v, tuple(_as_block(b) for b in blocks))


def c_splitting_profile(sys: SplittingSystem) -> int | None:
    """Common part size c, or None when part sizes vary."""
    sizes = {len(part) for block in sys.blocks for part in block}
    return sizes.pop() if len(sizes) == 1 else None


@dataclass(frozen=True)
class BibdParams:
    """Parameter arithmetic of a (v, m x c, lambda)-splitting BIBD."""

    v: int
    m: int
    c: int
    lam: int = 1

    @property
    def r(self) -> Fraction:
        return Fraction(self.lam * (self.v - 1), (self.m - 1) * self.c)

    @property
    def b(self) -> Fraction:
        return Fraction(self.lam * self.v * (self.v - 1), self.m * (self.m - 1) * self.c**2)

    @staticmethod
    def lambda_from(v: int, b: int, m: int, c: int) -> Fraction:
        return Fraction(b * m * c * (m * c - c), v * (v - 1))

    @property
    def admissible(self) -> bool:
        return self.r.denominator == 1 and self.b.denominator == 1


@dataclass(frozen=True)
class AmdCode:
    """Disjoint encoding sets A(s_1), ..., A(s_m) in an abelian group."""

    group: AbelianGroup
    encodings: tuple[frozenset[GroupElement], ...]

    def __post_init__(self) -> None:
        encs = []
        for s, enc in enumerate(self.encodings):
            try:
                elems = frozenset(self.group.element(g) for g in enc)
            except GroupError as exc:
                raise DesignError(f"encoding {s}: {exc}") from exc
            if not elems:
                raise DesignError(f"encoding {s} is empty")
            encs.append(elems)
        if not encs:
            raise DesignError("an AMD code needs at least one source")
        seen: set[GroupElement] = set()
        for s, enc in enumerate(encs):
            if seen & enc:
                raise DesignError(f"encoding {s} overlaps an earlier encoding")
            seen |= enc
        object.__setattr__(self, "encodings", tuple(encs))

    @property
    def m(self) -> int:
        return len(self.encodings)

    @property
    def n(self) -> int:
        return self.group.order

    def regularity(self) -> int | None:
        sizes = {len(a) for a in self.encodings}
        return sizes.pop() if len(sizes) == 1 else None


@dataclass(frozen=True)
class SourceDistribution:
    probs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        probs = tuple(Fraction(p) for p in self.probs)
        if not probs:
            raise DesignError("empty distribution")
        if any(p < 0 for p in probs):
            raise DesignError("probabilities must be non-negative")
        if sum(probs) != 1:
            raise DesignError(f"probabilities sum to {sum(probs)}, not 1")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, m: int) -> SourceDistribution:
        return cls(tuple(Fraction(1, m) for _ in range(m)))

    @classmethod
    def point_mass(cls, m: int, j: int) -> SourceDistribution:
        return cls(tuple(Fraction(int(i == j)) for i in range(m)))

    @property
    def m(self) -> int:
        return len(self.probs)

    def __getitem__(self, j: int) -> Fraction:
        return self.probs[j]


def _as_partition(n: int, groups: Iterable[Iterable[int]]) -> tuple[frozenset[int], ...]:
    groups = tuple(frozenset(int(x) for x in g) for g in groups)
    covered: set[int] = set()
    for i, g in enumerate(groups):
        if not g:
            raise DesignError(f"design group {i} is empty")
        if covered & g:
            raise DesignError(f"design group {i} overlaps an earlier group")
        covered |= g
    if covered != set(range(n)):
        missing = sorted(set(range(n)) - covered)
        extra = sorted(covered - set(range(n)))
        raise DesignError(f"design groups do not partition 0..{n - 1} (missing {missing[:5]}, extra {extra[:5]})")
    return groups


@dataclass(frozen=True)
class Gdd:
    """Group divisible design.  Blocks are stored as tuples; their order is
    only meaningful for :class:`OrderedGdd`."""

    n: int
    design_groups: tuple[frozenset[int], ...]
    blocks: tuple[tuple[int, ...], ...]
    k: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "design_groups", _as_partition(self.n, self.design_groups))
        blocks = tuple(tuple(int(x) for x in blk) for blk in self.blocks)
        for i, blk in enumerate(blocks):
            if len(blk) != self.k:
                raise DesignError(f"block {i} has size {len(blk)}, expected k={self.k}")
            if len(set(blk)) != len(blk):
                raise DesignError(f"block {i} repeats a point")
            if any(not 0 <= x < self.n for x in blk):
                raise DesignError(f"block {i} has a point out of range 0..{self.n - 1}")
        object.__setattr__(self, "blocks", blocks)

    def group_of(self) -> list[int]:
        owner = [0] * self.n
        for gi, g in enumerate(self.design_groups):
            for x in g:
                owner[x] = gi
        return owner

    def replication(self) -> list[int]:
        r = [0] * self.n
        for blk in self.blocks:
            for x in blk:
                r[x] += 1
        return r

    def type_counter(self) -> Counter[int]:
        return Counter(len(g) for g in self.design_groups)

    def type_string(self) -> str:
        return " ".join(f"{size}^{cnt}" for size, cnt in sorted(self.type_counter().items()))


class OrderedGdd(Gdd):
    """A GDD whose block tuples are position-significant."""


@dataclass(frozen=True)
class SplittingGdd:
    """A splitting GDD: splitting blocks plus a design-group partition.

    Unlike :class:`SplittingSystem` it may have no blocks at all.
    """

    v: int
    m: int
    blocks: tuple[Block, ...]
    design_groups: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        blocks = tuple(_as_block(b) for b in self.blocks)
        for i, block in enumerate(blocks):
            if len(block) != self.m:
                raise DesignError(f"block {i} has {len(block)} parts, expected {self.m}")
            _check_block(block, self.v, f"block {i}")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "design_groups", _as_partition(self.v, self.design_groups))


@dataclass(frozen=True)
class BaseBlocks:
    """Ordered base blocks over a group; points are element indices."""

    group: AbelianGroup
    blocks: tuple[Block, ...]

    def __post_init__(self) -> None:
        blocks = tuple(_as_block(b) for b in self.blocks)
        for i, block in enumerate(blocks):
            _check_block(block, self.group.order, f"base block {i}")
        object.__setattr__(self, "blocks", blocks)


# -- interchange format -------------------------------------------------------

def _frac_str(x: Fraction) -> str:
    return str(Fraction(x))


def _parse_frac(value: Any, path: str) -> Fraction:
    if isinstance(value, bool):
        raise SchemaError(path, "expected a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(path, f"bad rational {value!r}") from exc
    raise SchemaError(path, f"expected a 'p/q' string, got {type(value).__name__}")


def _require(doc: dict, key: str, path: str) -> Any:
    if key not in doc:
        raise SchemaError(f"{path}.{key}", "missing")
    return doc[key]


def _int(value: Any, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise SchemaError(path, f"must be >= {minimum}")
    return value


def _list(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(path, f"expected a list, got {type(value).__name__}")
    return value


def _int_list(value: Any, path: str) -> list[int]:
    return [_int(x, f"{path}[{i}]") for i, x in enumerate(_list(value, path))]


def _blocks(value: Any, path: str) -> list[list[list[int]]]:
    out = []
    for i, blk in enumerate(_list(value, path)):
        out.append([_int_list(part, f"{path}[{i}][{j}]") for j, part in enumerate(_list(blk, f"{path}[{i}]"))])
    return out


def _group(value: Any, path: str) -> AbelianGroup:
    orders = _int_list(value, path)
    try:
        return AbelianGroup(tuple(orders))
    except GroupError as exc:
        raise SchemaError(path, str(exc)) from exc


def _elements(group: AbelianGroup, value: Any, path: str) -> list[GroupElement]:
    out = []
    for i, x in enumerate(_list(value, path)):
        if isinstance(x, int) and not isinstance(x, bool):
            if group.rank == 1:
                out.append(group.element(x))
            else:
                if not 0 <= x < group.order:
                    raise SchemaError(f"{path}[{i}]", f"index {x} out of range")
                out.append(group.from_index(x))
        else:
            coords = _int_list(x, f"{path}[{i}]")
            if len(coords) != group.rank:
                raise SchemaError(f"{path}[{i}]", f"expected {group.rank} coordinates")
            out.append(group.element(coords))
    return out


def _sorted_parts(block: Block) -> list[list[int]]:
    return [sorted(part) for part in block]


def _element_json(group: AbelianGroup, g: GroupElement) -> int | list[int]:
    return g[0] if group.rank == 1 else list(g)


def to_document(obj: Any) -> dict:
    """Serialize a model object to a JSON-compatible dict."""
    if isinstance(obj, SplittingSystem):
        return {"kind": "splitting_system", "v": obj.v, "m": obj.m,
                "blocks": [_sorted_parts(b) for b in obj.blocks]}
    if isinstance(obj, AmdCode):
        return {"kind": "amd_code", "group": list(obj.group.orders), "sources": obj.m,
                "encodings": [[_element_json(obj.group, g) for g in sorted(enc)] for enc in obj.encodings]}
    if isinstance(obj, OrderedGdd):
        return {"kind": "gdd", "points": obj.n, "design_groups": [sorted(g) for g in obj.design_groups],
                "k": obj.k, "ordered_blocks": [list(b) for b in obj.blocks]}
    if isinstance(obj, Gdd):
        return {"kind": "gdd", "points": obj.n, "design_groups": [sorted(g) for g in obj.design_groups],
                "k": obj.k, "blocks": [list(b) for b in obj.blocks]}
    if isinstance(obj, SplittingGdd):
        return {"kind": "splitting_gdd", "v": obj.v, "m": obj.m,
                "design_groups": [sorted(g) for g in obj.design_groups],
                "blocks": [_sorted_parts(b) for b in obj.blocks]}
    if isinstance(obj, SourceDistribution):
        return {"kind": "source_distribution", "probs": [_frac_str(p) for p in obj.probs]}
    if isinstance(obj, BaseBlocks):
        return {"kind": "base_blocks", "group": list(obj.group.orders),
                "blocks": [_sorted_parts(b) for b in obj.blocks]}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_document(doc: Any, path: str = "$") -> Any:
    """Parse a JSON-compatible dict produced by :func:`to_document`.

    ``report`` documents (CLI output) are validated and returned as dicts.
    """
    if not isinstance(doc, dict):
        raise SchemaError(path, "expected an object")
    kind = _require(doc, "kind", path)
    try:
        if kind == "splitting_system":
            v = _int(_require(doc, "v", path), f"{path}.v", 1)
            blocks = _blocks(_require(doc, "blocks", path), f"{path}.blocks")
            if not blocks:
                raise SchemaError(f"{path}.blocks", "at least one block is required")
            sys = SplittingSystem(v, blocks)
            if "m" in doc and _int(doc["m"], f"{path}.m") != sys.m:
                raise SchemaError(f"{path}.m", f"declared m={doc['m']} but blocks have {sys.m} parts")
            return sys
        if kind == "amd_code":
            group = _group(_require(doc, "group", path), f"{path}.group")
            encs = [_elements(group, e, f"{path}.encodings[{i}]")
                    for i, e in enumerate(_list(_require(doc, "encodings", path), f"{path}.encodings"))]
            code = AmdCode(group, encs)
            if "sources" in doc and _int(doc["sources"], f"{path}.sources") != code.m:
                raise SchemaError(f"{path}.sources", f"declared {doc['sources']} sources, found {code.m}")
            return code
        if kind == "gdd":
            n = _int(_require(doc, "points", path), f"{path}.points", 0)
            groups = [_int_list(g, f"{path}.design_groups[{i}]")
                      for i, g in enumerate(_list(_require(doc, "design_groups", path), f"{path}.design_groups"))]
            k = _int(_require(doc, "k", path), f"{path}.k", 1)
            if "ordered_blocks" in doc:
                blocks = [_int_list(b, f"{path}.ordered_blocks[{i}]")
                          for i, b in enumerate(_list(doc["ordered_blocks"], f"{path}.ordered_blocks"))]
                return OrderedGdd(n, groups, blocks, k)
            blocks = [_int_list(b, f"{path}.blocks[{i}]")
                      for i, b in enumerate(_list(_require(doc, "blocks", path), f"{path}.blocks"))]
            return Gdd(n, groups, blocks, k)
        if kind == "splitting_gdd":
            v = _int(_require(doc, "v", path), f"{path}.v", 1)
            m = _int(_require(doc, "m", path), f"{path}.m", 2)
            groups = [_int_list(g, f"{path}.design_groups[{i}]")
                      for i, g in enumerate(_list(_require(doc, "design_groups", path), f"{path}.design_groups"))]
            return SplittingGdd(v, m, _blocks(_require(doc, "blocks", path), f"{path}.blocks"), groups)
        if kind == "source_distribution":
            probs = [_parse_frac(p, f"{path}.probs[{i}]")
                     for i, p in enumerate(_list(_require(doc, "probs", path), f"{path}.probs"))]
            return SourceDistribution(probs)
        if kind == "base_blocks":
            group = _group(_require(doc, "group", path), f"{path}.group")
            return BaseBlocks(group, _blocks(_require(doc, "blocks", path), f"{path}.blocks"))
        if kind == "report":
            return dict(doc)
    except SchemaError:
        raise
    except (DesignError, GroupError) as exc:
        raise SchemaError(path, str(exc)) from exc
    raise SchemaError(f"{path}.kind", f"unknown kind {kind!r}")


def dumps(obj: Any, indent: int | None = None) -> str:
    return json.dumps(to_document(obj), indent=indent)


def loads(text: str) -> Any:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from exc
    return from_document(doc)


def load(path: str | Path) -> Any:
    return loads(Path(path).read_text())


def dump(obj: Any, path: str | Path) -> None:
    Path(path).write_text(dumps(obj, indent=1) + "\n")


def block_str(block: Sequence[Iterable[int]]) -> str:
    return "(" + ", ".join("{" + ",".join(map(str, sorted(p))) + "}" for p in block) + ")"
