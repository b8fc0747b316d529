"""Design constructions and the fixture catalog."""

from __future__ import annotations

from itertools import combinations, product
from typing import Callable, Mapping, Sequence

from .algebra import AbelianGroup
from .designs import (
    AmdCode,
    BaseBlocks,
    Block,
    Gdd,
    OrderedGdd,
    SourceDistribution,
    SplittingGdd,
    SplittingSystem,
)
from .ordering import BudgetExceeded, develop_base_blocks, order_development
from .verify import check_equitably_ordered, check_gdd, check_splitting_bibd


class ConstructionError(ValueError):
    pass


def develop_amd(code: AmdCode) -> SplittingSystem:
    """Blocks (g + A(s_1), ..., g + A(s_m)) for every g, in enumeration order.

    Points are element indices.  Colliding translates are kept; look them
    up with ``SplittingSystem.repeated_blocks``.
    """
    G = code.group
    base = [[G.index(a) for a in enc] for enc in code.encodings]
    return SplittingSystem(G.order, tuple(develop_base_blocks([base], G)))


# -- transversal designs and triple systems -----------------------------------

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n**0.5) + 1))


def prime_power(q: int) -> tuple[int, int] | None:
    """(p, e) with q = p**e, or None."""
    for p in range(2, q + 1):
        if q % p == 0:
            e, rest = 0, q
            while rest % p == 0:
                rest //= p
                e += 1
            return (p, e) if rest == 1 else None
    return None


def latin_square_td(n: int) -> Gdd:
    """TD(3, n) from the cyclic Latin square: blocks {(0,i), (1,j), (2,i+j)}."""
    if n < 1:
        raise ConstructionError("n must be positive")
    groups = [range(g * n, (g + 1) * n) for g in range(3)]
    blocks = [(i, n + j, 2 * n + (i + j) % n) for i in range(n) for j in range(n)]
    return Gdd(3 * n, groups, blocks, 3)


class GaloisField:
    """GF(p^e) with elements 0..q-1 as base-p digit vectors of polynomials."""

    def __init__(self, q: int) -> None:
        pe = prime_power(q)
        if pe is None:
            raise ConstructionError(f"{q} is not a prime power")
        self.q, (self.p, self.e) = q, pe
        self.modulus = self._irreducible() if self.e > 1 else None
        self.mul_table = [[self._mul(a, b) for b in range(q)] for a in range(q)]
        self.add_table = [[self._add(a, b) for b in range(q)] for a in range(q)]

    def _digits(self, a: int) -> list[int]:
        return [(a // self.p**i) % self.p for i in range(self.e)]

    def _num(self, digits: Sequence[int]) -> int:
        return sum(d * self.p**i for i, d in enumerate(digits))

    def _add(self, a: int, b: int) -> int:
        return self._num([(x + y) % self.p for x, y in zip(self._digits(a), self._digits(b))])

    def _polymod(self, coeffs: list[int]) -> list[int]:
        mod = self.modulus  # monic, length e+1
        coeffs = coeffs[:]
        for deg in range(len(coeffs) - 1, self.e - 1, -1):
            lead = coeffs[deg] % self.p
            if lead:
                for i, mc in enumerate(mod):
                    coeffs[deg - self.e + i] = (coeffs[deg - self.e + i] - lead * mc) % self.p
        return [c % self.p for c in coeffs[: self.e]]

    def _mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return a * b % self.p
        da, db = self._digits(a), self._digits(b)
        prod = [0] * (2 * self.e - 1)
        for i, x in enumerate(da):
            for j, y in enumerate(db):
                prod[i + j] += x * y
        return self._num(self._polymod(prod))

    def _irreducible(self) -> list[int]:
        p, e = self.p, self.e
        for tail in product(range(p), repeat=e):
            poly = list(tail) + [1]
            if poly[0] == 0:
                continue
            if not any(self._has_factor(poly, d) for d in range(1, e // 2 + 1)):
                return poly
        raise ConstructionError("no irreducible polynomial found")

    def _has_factor(self, poly: list[int], d: int) -> bool:
        p = self.p
        for tail in product(range(p), repeat=d):
            div = list(tail) + [1]
            rem = poly[:]
            for deg in range(len(rem) - 1, d - 1, -1):
                lead = rem[deg] % p
                if lead:
                    for i, c in enumerate(div):
                        rem[deg - d + i] = (rem[deg - d + i] - lead * c) % p
            if not any(x % p for x in rem[:d]):
                return True
        return False


def prime_power_td(k: int, q: int) -> Gdd:
    """TD(k, q) over GF(q): blocks {(i, s*x_i + t)} with x_i the field elements,
    plus the column (q, s) when k = q + 1."""
    F = GaloisField(q)
    if not 2 <= k <= q + 1:
        raise ConstructionError(f"TD(k, {q}) from GF({q}) needs 2 <= k <= {q + 1}, got k = {k}")
    groups = [range(g * q, (g + 1) * q) for g in range(k)]
    blocks = []
    for s in range(q):
        for t in range(q):
            blk = []
            for i in range(k):
                y = s if i == q else F.add_table[F.mul_table[s][i]][t]
                blk.append(i * q + y)
            blocks.append(tuple(blk))
    return Gdd(k * q, groups, blocks, k)


def prime_td(k: int, p: int) -> Gdd:
    """TD(k, p) for a prime p and 2 <= k <= p + 1."""
    if not is_prime(p):
        raise ConstructionError(f"{p} is not prime")
    return prime_power_td(k, p)


def sts(u: int) -> Gdd:
    """Steiner triple system on u points as a 3-GDD of type 1^u.

    Bose construction for u = 3 mod 6, Skolem for u = 1 mod 6.
    """
    if u % 6 not in (1, 3):
        raise ConstructionError(f"no Steiner triple system of order {u} (need u = 1, 3 mod 6)")
    if u == 1:
        return Gdd(1, [[0]], [], 3)
    triples: list[tuple[int, int, int]] = []
    if u % 6 == 3:
        n = u // 3
        half = (n + 1) // 2
        op = lambda x, y: (x + y) * half % n  # idempotent commutative quasigroup
        pt = lambda x, i: x + n * (i % 3)
        for x in range(n):
            triples.append((pt(x, 0), pt(x, 1), pt(x, 2)))
        for x, y in combinations(range(n), 2):
            for i in range(3):
                triples.append((pt(x, i), pt(y, i), pt(op(x, y), i + 1)))
    else:
        n = (u - 1) // 3  # even order of the half-idempotent quasigroup
        h = n // 2

        def op(x: int, y: int) -> int:
            s = (x + y) % n
            return s // 2 if s % 2 == 0 else (s + n - 1) // 2

        inf = u - 1
        pt = lambda x, i: x + n * (i % 3)
        for x in range(h):
            triples.append((pt(x, 0), pt(x, 1), pt(x, 2)))
        for x in range(h):
            for i in range(3):
                triples.append((inf, pt(x + h, i), pt(x, i + 1)))
        for x, y in combinations(range(n), 2):
            for i in range(3):
                triples.append((pt(x, i), pt(y, i), pt(op(x, y), i + 1)))
    return Gdd(u, [[x] for x in range(u)], triples, 3)


TdSupplier = Callable[[int, int], Gdd]


def builtin_td(k: int, w: int) -> Gdd | None:
    """A TD(k, w) from the built-in constructions, if one applies."""
    if w == 1:
        return Gdd(k, [[i] for i in range(k)], [tuple(range(k))], k)
    if k == 3:
        return latin_square_td(w)
    if prime_power(w) and 2 <= k <= w + 1:
        return prime_power_td(k, w)
    return None


def inflate_gdd(master: Gdd, w: int, ingredient: TdSupplier | None = None) -> Gdd:
    """Give every point weight w and put a TD(k, w) on each inflated block.

    Point x becomes x*w + i for i < w.  TD design group g is laid onto the
    copies of the block's g-th point.
    """
    if w < 1:
        raise ConstructionError("weight must be positive")
    k = master.k
    td = ingredient(k, w) if ingredient else builtin_td(k, w)
    if td is None:
        raise ConstructionError(f"no TD({k}, {w}) available; supply an ingredient")
    if td.k != k or td.n != k * w:
        raise ConstructionError(f"ingredient is not a TD({k}, {w})")
    # TD point -> (design group position, copy index)
    td_pos = {}
    for g, grp in enumerate(td.design_groups):
        if len(grp) != w:
            raise ConstructionError(f"ingredient design group {g} has size {len(grp)}, expected {w}")
        for i, x in enumerate(sorted(grp)):
            td_pos[x] = (g, i)
    groups = [[x * w + i for x in grp for i in range(w)] for grp in master.design_groups]
    blocks = []
    for blk in master.blocks:
        for tblk in td.blocks:
            blocks.append(tuple(blk[td_pos[y][0]] * w + td_pos[y][1] for y in tblk))
    return Gdd(master.n * w, groups, blocks, k)


# -- splitting compositions ---------------------------------------------------

def splitting_inflate(og: OrderedGdd, c: int) -> SplittingGdd:
    """Replace each ordered block (x_1..x_m) by ({x_1} x [c], ..., {x_m} x [c]).

    Point x becomes x*c + i for i < c.
    """
    if c < 1:
        raise ConstructionError("c must be positive")
    blocks = [tuple(frozenset(x * c + i for i in range(c)) for x in blk) for blk in og.blocks]
    groups = [[x * c + i for x in grp for i in range(c)] for grp in og.design_groups]
    return SplittingGdd(og.n * c, og.k, tuple(blocks), groups)


Fillers = SplittingSystem | Sequence[SplittingSystem] | Mapping[int, SplittingSystem]


def fill_groups(sg: SplittingGdd, fillers: Fillers, check: bool = True) -> SplittingSystem:
    """Add a new point and fill each design group G with a (|G|+1)-point
    equitably ordered splitting BIBD through it.

    The new point gets index ``sg.v``.  Filler point ``filler.v - 1`` plays
    the new point; filler points 0..|G|-1 map to G in increasing order.
    """
    n_groups = len(sg.design_groups)
    if isinstance(fillers, SplittingSystem):
        fillers = [fillers] * n_groups
    elif isinstance(fillers, Mapping):
        fillers = [fillers[i] for i in range(n_groups)]
    if len(fillers) != n_groups:
        raise ConstructionError(f"{len(fillers)} fillers for {n_groups} design groups")
    inf = sg.v
    blocks: list[Block] = list(sg.blocks)
    checked: dict[int, tuple] = {}
    for gi, (grp, filler) in enumerate(zip(sg.design_groups, fillers)):
        if filler.v != len(grp) + 1:
            raise ConstructionError(f"design group {gi} has {len(grp)} points; filler has v = {filler.v}, "
                                    f"expected {len(grp) + 1}")
        if filler.m != sg.m:
            raise ConstructionError(f"filler for group {gi} has m = {filler.m}, expected {sg.m}")
        if check:
            key = id(filler)
            if key not in checked:
                rep = check_splitting_bibd(filler)
                checked[key] = (rep.is_bibd and rep.lam == 1, check_equitably_ordered(filler).ok, rep.c)
            bibd_ok, eq_ok, c = checked[key]
            if not bibd_ok:
                raise ConstructionError(f"filler for group {gi} is not a lambda = 1 splitting BIBD")
            if not eq_ok:
                raise ConstructionError(f"filler for group {gi} is not equitably ordered")
            sg_c = {len(p) for blk in sg.blocks for p in blk}
            if sg_c and sg_c != {c}:
                raise ConstructionError(f"filler for group {gi} has part size {c}, GDD has {sorted(sg_c)}")
        relabel = sorted(grp) + [inf]
        for blk in filler.blocks:
            blocks.append(tuple(frozenset(relabel[p] for p in part) for part in blk))
    return SplittingSystem(sg.v + 1, tuple(blocks))


# -- base block search --------------------------------------------------------

class _Budget:
    def __init__(self, limit: int) -> None:
        self.limit, self.used = limit, 0

    def tick(self) -> None:
        self.used += 1
        if self.used > self.limit:
            raise BudgetExceeded(f"search budget of {self.limit} nodes exhausted")


DEFAULT_SEARCH_BUDGET = 5_000_000


def search_base_blocks(v: int, m: int, c: int, G: AbelianGroup | None = None,
                       budget: int = DEFAULT_SEARCH_BUDGET) -> list[Block] | None:
    """Base blocks whose cross-part differences cover G minus 0 exactly once.

    Canonical form: every base block has 0 in its first part, parts are
    ordered by least element and elements increase within a part.  Returns
    the first solution in that order, None if the space is exhausted.
    """
    G = AbelianGroup.cyclic(v) if G is None else G
    if G.order != v:
        raise ValueError(f"|G| = {G.order} but v = {v}")
    if m < 2 or c < 1:
        raise ValueError("need m >= 2 and c >= 1")
    per_block = m * (m - 1) * c * c
    if (v - 1) % per_block:
        raise ValueError(f"v - 1 = {v - 1} is not divisible by m(m-1)c^2 = {per_block}")
    n_blocks = (v - 1) // per_block
    table = G.addition_table()
    neg = [G.index(G.negate(g)) for g in G.enumerate()]
    sub = [[table[a][neg[b]] for b in range(v)] for a in range(v)]
    used = [False] * v
    used[0] = True  # zero is never a difference of distinct points
    ticker = _Budget(budget)
    solution: list[list[list[int]]] = []

    def place(parts: list[list[int]], blocks_left: int) -> bool:
        # next slot: first part not full; a new part starts when the previous is full
        ticker.tick()
        j = next((i for i, p in enumerate(parts) if len(p) < c), None)
        if j is None:
            solution.append([p[:] for p in parts])
            if blocks_left == 1:
                return True
            if place([[0]] + [[] for _ in range(m - 1)], blocks_left - 1):
                return True
            solution.pop()
            return False
        part = parts[j]
        in_block = {x for p in parts for x in p}
        if part:
            start = part[-1] + 1
        else:
            start = parts[j - 1][0] + 1  # least elements increase across parts
        for x in range(start, v):
            if x in in_block:
                continue
            diffs = []
            ok = True
            for i, other in enumerate(parts):
                if i == j:
                    continue
                for y in other:
                    d1, d2 = sub[x][y], sub[y][x]
                    if used[d1] or used[d2] or d1 == d2:
                        ok = False
                        break
                    used[d1] = used[d2] = True
                    diffs += (d1, d2)
                if not ok:
                    break
            if ok:
                part.append(x)
                if place(parts, blocks_left):
                    return True
                part.pop()
            for d in diffs:
                used[d] = False
        return False

    found = place([[0]] + [[] for _ in range(m - 1)], n_blocks)
    if not found:
        return None
    return [tuple(frozenset(p) for p in blk) for blk in solution]


# -- catalog ------------------------------------------------------------------

_FIVE_POINT = [
    ([1, 4], [2, 3]),
    ([2, 0], [3, 4]),
    ([3, 1], [4, 0]),
    ([4, 2], [0, 1]),
    ([0, 3], [1, 2]),
]

# Z_9 development of ({0,1},{3,5}); not a lambda = 1 design, {0,1} is never split
_ARRAY9 = [
    ([0, 1], [3, 5]), ([1, 2], [4, 6]), ([2, 3], [5, 7]),
    ([3, 4], [6, 8]), ([4, 5], [7, 0]), ([5, 6], [8, 1]),
    ([6, 7], [0, 2]), ([7, 8], [1, 3]), ([8, 0], [2, 4]),
]

EXTERNAL_SLOTS = {
    "base_blocks_48s+1_4x2": "base blocks for (48s+1, 4x2, 1) designs; ingest from a file",
    "base_blocks_54s+1_3x3": "base blocks for (54s+1, 3x3, 1) designs; ingest from a file",
    "gdd4_type_48": "4-GDDs of type 48^(s/2); ingest from a file",
    "gdd4_type_12_18": "4-GDDs of type 12^((s-3)/2) 18^1; ingest from a file",
    "gdd3_type_36": "3-GDDs of type 36^(s/2) and 36^((s-3)/2) 54^1; ingest from a file",
}


def _z25_base() -> BaseBlocks:
    return BaseBlocks(AbelianGroup.cyclic(25), [([0, 1], [2, 4], [12, 20])])


def catalog(name: str):
    """Named fixtures.

    ``array9`` is the Z_9 development of ({0,1},{3,5}), kept as a
    non-design; ``sbibd9`` is the (9, 2x2, 1) design obtained by
    developing the Z_9 AMD code {{0,1},{2,4}}.
    """
    z9 = AmdCode(AbelianGroup.cyclic(9), [[0, 1], [2, 4]])
    entries = {
        "five_point": lambda: SplittingSystem(5, _FIVE_POINT),
        "array9": lambda: SplittingSystem(9, _ARRAY9),
        "sbibd9": lambda: develop_amd(z9),
        "amd_z9": lambda: z9,
        "amd_z10": lambda: AmdCode(AbelianGroup.cyclic(10), [[0], [5], [1, 9], [2, 3]]),
        "z25_base": _z25_base,
        "sbibd25": lambda: order_development(_z25_base().blocks, AbelianGroup.cyclic(25)),
        "uniform2": lambda: SourceDistribution.uniform(2),
        "skew2": lambda: SourceDistribution(("3/4", "1/4")),
    }
    if name in EXTERNAL_SLOTS:
        raise KeyError(f"{name!r} is an ingestion slot: {EXTERNAL_SLOTS[name]}")
    if name not in entries:
        raise KeyError(f"unknown catalog entry {name!r}; known: {sorted(entries)}")
    return entries[name]()


CATALOG_NAMES = ("five_point", "array9", "sbibd9", "amd_z9", "amd_z10", "z25_base", "sbibd25",
                 "uniform2", "skew2")


def ingest_gdd(source, expected_type: str | None = None) -> Gdd:
    """Load an externally catalogued GDD and verify it before use."""
    from .designs import from_document, load

    g = load(source) if not isinstance(source, dict) else from_document(source)
    if not isinstance(g, Gdd):
        raise ConstructionError("document is not a GDD")
    rep = check_gdd(g)
    if not rep.is_gdd:
        raise ConstructionError(f"ingested GDD fails verification: {rep.reason}")
    if expected_type is not None and rep.type != expected_type:
        raise ConstructionError(f"ingested GDD has type {rep.type}, expected {expected_type}")
    return g
