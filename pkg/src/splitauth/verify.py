"""Ground-truth checkers for splitting designs, GDDs and group actions.

Every checker returns a small report object instead of raising; the
report carries a witness whenever the property fails.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

from .algebra import AbelianGroup
from .designs import Block, Gdd, SplittingGdd, SplittingSystem, c_splitting_profile

Permutation = Sequence[int]

FULL_HOMOMORPHISM_CHECK = 512
SAMPLED_TRIPLES = 2000


def cross_pair_counts(v: int, blocks: Sequence[Block]) -> list[list[int]]:
    """``counts[p][q]`` = number of blocks with p and q in different parts."""
    counts = [[0] * v for _ in range(v)]
    for block in blocks:
        for j1, j2 in combinations(range(len(block)), 2):
            for p in block[j1]:
                row = counts[p]
                for q in block[j2]:
                    row[q] += 1
                    counts[q][p] += 1
    return counts


@dataclass
class BibdReport:
    is_bibd: bool
    lam: int | None
    c: int | None
    repeated_blocks: list[list[int]] = field(default_factory=list)
    witness: tuple[int, int] | None = None
    witness_count: int | None = None
    reason: str = ""


def check_splitting_bibd(sys: SplittingSystem) -> BibdReport:
    c = c_splitting_profile(sys)
    counts = cross_pair_counts(sys.v, sys.blocks)
    pairs = list(combinations(range(sys.v), 2))
    repeated = sys.repeated_blocks()
    if not pairs:
        return BibdReport(False, None, c, repeated, reason="fewer than two points")
    tally = Counter(counts[p][q] for p, q in pairs)
    lam = tally.most_common(1)[0][0]
    if len(tally) > 1:
        p, q = next((p, q) for p, q in pairs if counts[p][q] != lam)
        return BibdReport(False, None, c, repeated, (p, q), counts[p][q],
                          f"pair {{{p},{q}}} covered {counts[p][q]} times, most pairs {lam}")
    if c is None:
        return BibdReport(False, lam, None, repeated, reason="part sizes are not uniform")
    if lam == 0:
        return BibdReport(False, 0, c, repeated, pairs[0], 0, "no pair is covered")
    return BibdReport(True, lam, c, repeated)


@dataclass
class GddReport:
    is_gdd: bool
    type: str
    type_counts: dict[int, int]
    witness: tuple[int, ...] | None = None
    reason: str = ""


def check_gdd(g: Gdd) -> GddReport:
    owner = g.group_of()
    tc = dict(sorted(g.type_counter().items()))
    typ = g.type_string()
    cover = Counter()
    for i, blk in enumerate(g.blocks):
        seen: dict[int, int] = {}
        for x in blk:
            if owner[x] in seen:
                return GddReport(False, typ, tc, (i, seen[owner[x]], x),
                                 f"block {i} meets design group {owner[x]} twice")
            seen[owner[x]] = x
        for x, y in combinations(blk, 2):
            cover[(min(x, y), max(x, y))] += 1
    for (x, y), cnt in sorted(cover.items()):
        if cnt > 1:
            return GddReport(False, typ, tc, (x, y), f"pair {{{x},{y}}} covered {cnt} times")
    for x, y in combinations(range(g.n), 2):
        if owner[x] != owner[y] and (x, y) not in cover:
            return GddReport(False, typ, tc, (x, y), f"cross-group pair {{{x},{y}}} not covered")
    return GddReport(True, typ, tc)


def check_splitting_gdd(sg: SplittingGdd) -> GddReport:
    """Cross-group pairs split by exactly one block, within-group pairs never."""
    owner = [0] * sg.v
    for gi, grp in enumerate(sg.design_groups):
        for x in grp:
            owner[x] = gi
    tc = dict(sorted(Counter(len(grp) for grp in sg.design_groups).items()))
    typ = " ".join(f"{s}^{n}" for s, n in tc.items())
    counts = cross_pair_counts(sg.v, sg.blocks)
    for x, y in combinations(range(sg.v), 2):
        want = 0 if owner[x] == owner[y] else 1
        if counts[x][y] != want:
            return GddReport(False, typ, tc, (x, y),
                             f"pair {{{x},{y}}} split {counts[x][y]} times, expected {want}")
    return GddReport(True, typ, tc)


def _image(block: Block, perm: Permutation) -> Block:
    return tuple(frozenset(perm[p] for p in part) for part in block)


def _is_permutation(perm: Permutation, v: int) -> bool:
    return len(perm) == v and sorted(perm) == list(range(v))


def missing_image(sys: SplittingSystem, perm: Permutation) -> Block | None:
    """First block whose image under ``perm`` is not a block, else None."""
    have = sys.block_multiset()
    image = Counter(_image(b, perm) for b in sys.blocks)
    if image == have:
        return None
    for block in sys.blocks:
        img = _image(block, perm)
        if image[img] != have.get(img, 0):
            return block
    return sys.blocks[0]


def is_automorphism(sys: SplittingSystem, perm: Permutation) -> bool:
    if not _is_permutation(perm, sys.v):
        raise ValueError("perm is not a bijection on the points")
    return missing_image(sys, perm) is None


def translation_action(G: AbelianGroup) -> dict[int, list[int]]:
    """Element index -> permutation P -> P + g on element indices."""
    table = G.addition_table()
    return {g: [table[g][p] for p in range(G.order)] for g in range(G.order)}


def block_orbits(blocks: Sequence[Block], perms: Sequence[Permutation]) -> list[list[int]]:
    """Orbits of block indices under a set of point permutations forming a group."""
    index: dict[Block, list[int]] = {}
    for i, blk in enumerate(blocks):
        index.setdefault(blk, []).append(i)
    done = [False] * len(blocks)
    orbits = []
    for i, blk in enumerate(blocks):
        if done[i]:
            continue
        images = {_image(blk, perm) for perm in perms}
        orbit = sorted(j for img in images for j in index.get(img, []))
        for j in orbit:
            done[j] = True
        if i not in orbit:
            orbit = sorted(orbit + [i])
            done[i] = True
        orbits.append(orbit)
    return orbits


@dataclass
class GroupGeneratedReport:
    ok: bool
    orbits: list[list[int]]
    semiregular: bool
    lemma_holds: bool | None = None
    witness: dict | None = None
    reason: str = ""


def orbit_lemma_holds(sys: SplittingSystem, orbit: Sequence[int]) -> bool:
    """Per-orbit constant part sizes c_j, each point in c_j parts B_j and in
    sum_j c_j blocks of the orbit."""
    blocks = [sys.blocks[i] for i in orbit]
    sizes = {tuple(len(p) for p in blk) for blk in blocks}
    if len(sizes) != 1:
        return False
    cj = sizes.pop()
    ell = sum(cj)
    for j in range(sys.m):
        cnt = Counter(p for blk in blocks for p in blk[j])
        if any(cnt.get(x, 0) != cj[j] for x in range(sys.v)):
            return False
    inblock = Counter(p for blk in blocks for part in blk for p in part)
    return all(inblock.get(x, 0) == ell for x in range(sys.v))


def check_group_generated(
    sys: SplittingSystem,
    G: AbelianGroup,
    action: Mapping[int, Permutation] | str = "translation",
    seed: int = 0x5EED,
) -> GroupGeneratedReport:
    """Does ``action`` (element index -> point permutation) make G a regular
    abelian automorphism group of ``sys``?"""
    n = G.order
    if n != sys.v:
        raise ValueError(f"|G| = {n} but the system has v = {sys.v} points")
    if action == "translation":
        action = translation_action(G)
    perms = [list(action[g]) for g in range(n)]
    for g, perm in enumerate(perms):
        if not _is_permutation(perm, n):
            return GroupGeneratedReport(False, [], False, witness={"g": g}, reason="not a permutation")

    table = G.addition_table()
    if n <= FULL_HOMOMORPHISM_CHECK:
        triples = ((g, h) for g in range(n) for h in range(n))
    else:
        rng = random.Random(seed)
        triples = ((rng.randrange(n), rng.randrange(n)) for _ in range(SAMPLED_TRIPLES))
    for g, h in triples:
        pg, ph, pgh = perms[g], perms[h], perms[table[g][h]]
        if any(pgh[x] != ph[pg[x]] for x in range(n)):
            return GroupGeneratedReport(False, [], False, witness={"g": g, "h": h},
                                        reason="action is not a homomorphism")

    for p in range(n):
        images = {perm[p] for perm in perms}
        if len(images) != n:
            return GroupGeneratedReport(False, [], False, witness={"point": p},
                                        reason="point action is not regular")

    orbits = block_orbits(sys.blocks, perms)
    semiregular = all(len(o) == n for o in orbits) and not sys.repeated_blocks()
    for g, perm in enumerate(perms):
        bad = missing_image(sys, perm)
        if bad is not None:
            return GroupGeneratedReport(
                False, orbits, semiregular,
                witness={"g": g, "block": [sorted(p) for p in bad]},
                reason=f"element {g} maps a block outside the design")
    lemma = all(orbit_lemma_holds(sys, o) for o in orbits) if semiregular else None
    return GroupGeneratedReport(True, orbits, semiregular, lemma)


@dataclass
class EquitableReport:
    ok: bool
    table: list[list[int]]
    witness: int | None = None


def position_counts(sys: SplittingSystem) -> list[list[int]]:
    table = [[0] * sys.m for _ in range(sys.v)]
    for block in sys.blocks:
        for j, part in enumerate(block):
            for p in part:
                table[p][j] += 1
    return table


def check_equitably_ordered(sys: SplittingSystem) -> EquitableReport:
    table = position_counts(sys)
    for x, row in enumerate(table):
        if len(set(row)) != 1:
            return EquitableReport(False, table, x)
    return EquitableReport(True, table)


def equitable_necessary_condition(v: int, m: int, c: int) -> bool:
    if m < 2 or c < 1:
        raise ValueError("need m >= 2 and c >= 1")
    return (v - 1) % (m * (m - 1) * c * c) == 0
