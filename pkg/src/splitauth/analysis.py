"""Exact security analysis of splitting authentication codes and AMD codes.

Keys are uniform over the blocks of a splitting system, encodings are
equiprobable within a part, and all probabilities are ``Fraction``.

The substitution success of a strategy sigma separates over messages::

    eps(sigma) = sum_t f(t, sigma(t))
    f(t, u)    = sum over (block B, part j) with t in B_j and u in B \\ B_j
                 of Pr(s_j) / (b |B_j|)

so the optimal strategy is found one message at a time.  The brute-force
oracles below never use ``f``; they evaluate the defining sum over
(block, source, message) directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Any, Sequence

import numpy as np

from .algebra import GroupElement
from .designs import AmdCode, SourceDistribution, SplittingSystem, c_splitting_profile

DEFAULT_SEED = 0x5EED
EXHAUSTIVE_LIMIT = 10**7
DEFAULT_SAMPLES = 20_000


@dataclass
class AttackReport:
    value: Fraction
    witness: Any
    per_source: list[Fraction] | None = None


def _dist(sys: SplittingSystem, dist: SourceDistribution | None) -> SourceDistribution:
    if dist is None:
        return SourceDistribution.uniform(sys.m)
    if dist.m != sys.m:
        raise ValueError(f"distribution has {dist.m} sources, system has m = {sys.m}")
    return dist


def substitution_weights(sys: SplittingSystem, dist: SourceDistribution | None = None) -> list[list[Fraction]]:
    """The separable payoff table ``f[t][u]``."""
    dist = _dist(sys, dist)
    b = sys.b
    f = [[Fraction(0)] * sys.v for _ in range(sys.v)]
    for block in sys.blocks:
        union = frozenset().union(*block)
        for j, part in enumerate(block):
            w = dist[j] / (b * len(part))
            if not w:
                continue
            others = union - part
            for t in part:
                row = f[t]
                for u in others:
                    row[u] += w
    return f


def substitution_probability(sys: SplittingSystem, dist: SourceDistribution | None = None) -> AttackReport:
    """Best substitution strategy (sigma(t) != t) and its exact success."""
    f = substitution_weights(sys, dist)
    sigma = []
    for t, row in enumerate(f):
        best = max((u for u in range(sys.v) if u != t), key=lambda u: (row[u], -u))
        sigma.append(best)
    value = sum((f[t][sigma[t]] for t in range(sys.v)), Fraction(0))
    return AttackReport(value, sigma)


def evaluate_strategy(sys: SplittingSystem, dist: SourceDistribution | None, sigma: Sequence[int]) -> Fraction:
    """Success of ``sigma`` from the defining sum over keys and sources."""
    dist = _dist(sys, dist)
    total = Fraction(0)
    for block in sys.blocks:
        for j, part in enumerate(block):
            others = frozenset().union(*(p for i, p in enumerate(block) if i != j))
            hits = sum(1 for t in part if sigma[t] in others)
            total += Fraction(hits) * dist[j] / (sys.b * len(part))
    return total


def substitution_probability_any_distribution(sys: SplittingSystem) -> AttackReport:
    """Worst case over all source distributions (attained at a point mass)."""
    per_source = []
    best = None
    for j in range(sys.m):
        rep = substitution_probability(sys, SourceDistribution.point_mass(sys.m, j))
        per_source.append(rep.value)
        if best is None or rep.value > best[1].value:
            best = (j, rep)
    j, rep = best
    return AttackReport(rep.value, {"source": j, "sigma": rep.witness}, per_source)


def impersonation_probability(sys: SplittingSystem) -> AttackReport:
    r = sys.replication()
    t = max(range(sys.v), key=lambda p: (r[p], -p))
    return AttackReport(Fraction(r[t], sys.b), t)


def blundo_bound(sys: SplittingSystem) -> Fraction:
    return min(
        Fraction(sum(map(len, block)) - max(map(len, block)), sys.v - 1)
        for block in sys.blocks
    )


def simmons_bound(sys: SplittingSystem) -> Fraction:
    return min(Fraction(sum(map(len, block)), sys.v) for block in sys.blocks)


def new_substitution_bound(sys: SplittingSystem, dist: SourceDistribution | None = None) -> Fraction:
    """Average success of the cyclic shifts P -> P + r (mod v), r = 1..v-1."""
    dist = _dist(sys, dist)
    total = Fraction(0)
    for block in sys.blocks:
        size = sum(map(len, block))
        total += size - sum((dist[j] * len(part) for j, part in enumerate(block)), Fraction(0))
    return total / (sys.b * (sys.v - 1))


@dataclass
class MessageDistribution:
    overall: list[Fraction]
    per_source: list[list[Fraction]]  # [j][t] = Pr(t | s_j)


def message_distribution(sys: SplittingSystem, dist: SourceDistribution | None = None) -> MessageDistribution:
    dist = _dist(sys, dist)
    cond = [[Fraction(0)] * sys.v for _ in range(sys.m)]
    for block in sys.blocks:
        for j, part in enumerate(block):
            w = Fraction(1, sys.b * len(part))
            for t in part:
                cond[j][t] += w
    overall = [sum((dist[j] * cond[j][t] for j in range(sys.m)), Fraction(0)) for t in range(sys.v)]
    return MessageDistribution(overall, cond)


@dataclass
class SecrecyReport:
    holds: bool
    universal: bool
    witness: tuple[int, int] | None = None  # (source, message)


def perfect_secrecy(sys: SplittingSystem, dist: SourceDistribution | None = None) -> SecrecyReport:
    md = message_distribution(sys, dist)
    universal_witness = None
    for t in range(sys.v):
        first = md.per_source[0][t]
        for j in range(1, sys.m):
            if md.per_source[j][t] != first:
                universal_witness = (0, t)
                break
        if universal_witness:
            break
    universal = universal_witness is None
    if dist is None:
        return SecrecyReport(universal, universal, universal_witness)
    dist = _dist(sys, dist)
    for t in range(sys.v):
        pt = md.overall[t]
        if pt == 0:
            continue
        for j in range(sys.m):
            if dist[j] * md.per_source[j][t] / pt != dist[j]:
                return SecrecyReport(False, universal, (j, t))
    return SecrecyReport(True, universal, universal_witness)


# -- strategy oracles ---------------------------------------------------------

def _incidences(sys: SplittingSystem, dist: SourceDistribution):
    """Integer-scaled weights for the direct (block, part, message) sum."""
    fracs, points, masks = [], [], []
    for block in sys.blocks:
        for j, part in enumerate(block):
            w = dist[j] / (sys.b * len(part))
            if not w:
                continue
            mask = np.zeros(sys.v, dtype=bool)
            for i, other in enumerate(block):
                if i != j:
                    mask[list(other)] = True
            for t in part:
                fracs.append(w)
                points.append(t)
                masks.append(mask)
    scale = reduce(math.lcm, (w.denominator for w in fracs), 1)
    weights = np.array([int(w * scale) for w in fracs], dtype=np.int64)
    if weights.size and int(weights.sum()) >= 2**62:
        raise OverflowError("weights too large for vectorized evaluation")
    if not masks:
        return scale, np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros((0, sys.v), bool)
    return scale, weights, np.array(points, dtype=np.int64), np.array(masks)


def strategy_values(sys: SplittingSystem, dist: SourceDistribution | None, strategies: np.ndarray) -> list[Fraction]:
    """Direct-formula success of each row of ``strategies`` (shape N x v)."""
    dist = _dist(sys, dist)
    scale, weights, points, masks = _incidences(sys, dist)
    if not weights.size:
        return [Fraction(0)] * len(strategies)
    rows = np.arange(len(points))
    hits = masks[rows[None, :], strategies[:, points]]
    return [Fraction(int(x), scale) for x in hits.astype(np.int64) @ weights]


def _decode(indices: np.ndarray, v: int) -> np.ndarray:
    """Mixed-radix strategy index -> sigma with sigma(t) != t."""
    digits = np.empty((len(indices), v), dtype=np.int64)
    rest = indices.copy()
    for t in range(v):
        digits[:, t] = rest % (v - 1)
        rest //= v - 1
    return digits + (digits >= np.arange(v)[None, :])


def _sampled(v: int, n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = rng.integers(0, v - 1, size=(n, v))
    return a + (a >= np.arange(v)[None, :])


@dataclass
class OracleResult:
    mode: str  # "exhaustive" or "sampled"
    count: int
    min_value: Fraction
    max_value: Fraction
    argmax: list[int]


def strategy_oracle(
    sys: SplittingSystem,
    dist: SourceDistribution | None = None,
    limit: int = EXHAUSTIVE_LIMIT,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    chunk: int = 50_000,
) -> OracleResult:
    """Range of eps(sigma) over all (or sampled) strategies with sigma(t) != t."""
    v = sys.v
    total = (v - 1) ** v
    exhaustive = total <= limit
    count = total if exhaustive else samples
    lo = hi = None
    argmax: list[int] = []
    for start in range(0, count, chunk):
        stop = min(count, start + chunk)
        strategies = (_decode(np.arange(start, stop, dtype=np.int64), v) if exhaustive
                      else _sampled(v, stop - start, seed + start))
        values = strategy_values(sys, dist, strategies)
        for row, val in zip(strategies, values):
            if hi is None or val > hi:
                hi, argmax = val, [int(x) for x in row]
            if lo is None or val < lo:
                lo = val
    return OracleResult("exhaustive" if exhaustive else "sampled", count, lo, hi, argmax)


def brute_force_substitution(sys: SplittingSystem, dist: SourceDistribution | None = None,
                             limit: int = EXHAUSTIVE_LIMIT) -> AttackReport:
    """Exhaustive maximisation over all (v-1)^v strategies."""
    if (sys.v - 1) ** sys.v > limit:
        raise ValueError(f"(v-1)^v = {(sys.v - 1) ** sys.v} exceeds the exhaustive limit {limit}")
    res = strategy_oracle(sys, dist, limit=limit)
    return AttackReport(res.max_value, res.argmax)


@dataclass
class TightnessReport:
    tight: bool
    all_derangements_equal: bool
    substitution: Fraction
    bound: Fraction
    oracle: OracleResult | None = None


def bound_tightness_check(sys: SplittingSystem, dist: SourceDistribution | None = None,
                          seed: int = DEFAULT_SEED, samples: int = DEFAULT_SAMPLES,
                          limit: int = EXHAUSTIVE_LIMIT) -> TightnessReport:
    """Is the averaged-shift bound attained, and are all strategies then equal?

    Equality of every strategy is decided exactly (each row of the payoff
    table constant off the diagonal) and cross-checked on exhaustive or
    sampled strategies through the direct formula.
    """
    sub = substitution_probability(sys, dist).value
    bound = new_substitution_bound(sys, dist)
    f = substitution_weights(sys, dist)
    flat = all(len({row[u] for u in range(sys.v) if u != t}) <= 1 for t, row in enumerate(f))
    oracle = strategy_oracle(sys, dist, limit=limit, samples=samples, seed=seed)
    if flat and oracle.min_value != oracle.max_value:
        raise AssertionError("oracle disagrees with the exact strategy analysis")
    return TightnessReport(sub == bound, flat, sub, bound, oracle)


# -- AMD codes ----------------------------------------------------------------

def _owner(code: AmdCode) -> dict[GroupElement, int]:
    return {g: s for s, enc in enumerate(code.encodings) for g in enc}


def amd_hits(code: AmdCode, delta: GroupElement) -> list[int]:
    """|X_s^delta| for each source s."""
    owner = _owner(code)
    out = []
    for s, enc in enumerate(code.encodings):
        out.append(sum(1 for g in enc if owner.get(code.group.add(g, delta), s) != s))
    return out


def _nonzero(code: AmdCode) -> list[GroupElement]:
    elems = code.group.enumerate()
    if len(elems) < 2:
        raise ValueError("the trivial group has no nonzero offsets")
    return elems[1:]


def amd_epsilon(code: AmdCode, dist: SourceDistribution, delta: GroupElement) -> Fraction:
    hits = amd_hits(code, delta)
    return sum((Fraction(h, len(enc)) * dist[s] for s, (h, enc) in enumerate(zip(hits, code.encodings))),
               Fraction(0))


def amd_weak_epsilon(code: AmdCode) -> AttackReport:
    dist = SourceDistribution.uniform(code.m)
    best = None
    for delta in _nonzero(code):
        eps = amd_epsilon(code, dist, delta)
        if best is None or eps > best[0]:
            best = (eps, delta)
    eps, delta = best
    per_source = [Fraction(h, len(enc)) for h, enc in zip(amd_hits(code, delta), code.encodings)]
    return AttackReport(eps, delta, per_source)


def amd_strong_epsilon(code: AmdCode) -> AttackReport:
    best = None
    per_source = [Fraction(0)] * code.m
    for delta in _nonzero(code):
        for s, (h, enc) in enumerate(zip(amd_hits(code, delta), code.encodings)):
            eps = Fraction(h, len(enc))
            per_source[s] = max(per_source[s], eps)
            if best is None or eps > best[0]:
                best = (eps, (s, delta))
    return AttackReport(best[0], best[1], per_source)


@dataclass
class ROptimality:
    c_regular: bool
    r_optimal: bool | None
    epsilon: Fraction
    target: Fraction | None = None


def amd_r_optimality(code: AmdCode, strength: str = "weak") -> ROptimality:
    """Compare eps to c(m-1)/(n-1) for a c-regular code."""
    if strength not in ("weak", "strong"):
        raise ValueError("strength must be 'weak' or 'strong'")
    eps = (amd_weak_epsilon if strength == "weak" else amd_strong_epsilon)(code).value
    c = code.regularity()
    if c is None:
        return ROptimality(False, None, eps)
    target = Fraction(c * (code.m - 1), code.n - 1)
    return ROptimality(True, eps == target, eps, target)


@dataclass
class SystemSummary:
    c: int | None
    substitution: Fraction
    impersonation: Fraction
    blundo: Fraction
    simmons: Fraction
    new_bound: Fraction


def summarize(sys: SplittingSystem, dist: SourceDistribution | None = None) -> SystemSummary:
    return SystemSummary(
        c_splitting_profile(sys),
        substitution_probability(sys, dist).value,
        impersonation_probability(sys).value,
        blundo_bound(sys),
        simmons_bound(sys),
        new_substitution_bound(sys, dist),
    )
