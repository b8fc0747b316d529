"""Equitable orderings of splitting designs.

Three routes: keep a fixed base-block order while developing over a group,
edge-colour the split incidence graph of a GDD, or search block by block.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from itertools import permutations
from typing import Sequence

from .algebra import AbelianGroup
from .designs import (
    Block,
    DesignError,
    Gdd,
    OrderedGdd,
    SplittingSystem,
    _as_block,
    _check_block,
    c_splitting_profile,
)


class OrderingError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """Search stopped at its budget without proving existence or absence."""


@dataclass
class BipartiteMultigraph:
    """Left vertices are blocks, right vertices are point slots.

    ``edges[e] = (left, right, point)``; parallel edges are allowed.
    """

    n_left: int
    n_right: int
    edges: list[tuple[int, int, int]]

    def degrees(self) -> tuple[list[int], list[int]]:
        dl, dr = [0] * self.n_left, [0] * self.n_right
        for a, b, _ in self.edges:
            dl[a] += 1
            dr[b] += 1
        return dl, dr

    def is_regular(self, m: int) -> bool:
        dl, dr = self.degrees()
        return all(d == m for d in dl) and all(d == m for d in dr)


def gdd_incidence_split(g: Gdd, m: int | None = None) -> BipartiteMultigraph:
    """Split each point vertex x into r_x/m slots of m consecutive incidences."""
    m = g.k if m is None else m
    if g.k != m:
        raise OrderingError(f"block size {g.k} differs from m = {m}")
    r = g.replication()
    for x, rx in enumerate(r):
        if rx % m:
            raise OrderingError(f"point {x} has replication {rx}, not divisible by m = {m}")
    seen = [0] * g.n
    slot_base = []
    acc = 0
    for rx in r:
        slot_base.append(acc)
        acc += rx // m
    edges = []
    for bi, blk in enumerate(g.blocks):
        for x in blk:
            edges.append((bi, slot_base[x] + seen[x] // m, x))
            seen[x] += 1
    return BipartiteMultigraph(len(g.blocks), acc, edges)


def _perfect_matching(graph: BipartiteMultigraph, alive: list[bool]) -> list[int] | None:
    """Edge ids of a perfect matching among alive edges, or None.

    Augmenting paths found by breadth-first search, left vertices in index
    order and edges in id order.
    """
    adj: list[list[int]] = [[] for _ in range(graph.n_left)]
    for e, (a, _, _) in enumerate(graph.edges):
        if alive[e]:
            adj[a].append(e)
    match_left = [-1] * graph.n_left
    match_right = [-1] * graph.n_right
    for root in range(graph.n_left):
        parent_edge: dict[int, int] = {}
        queue = deque([root])
        visited_left = {root}
        end = -1
        while queue and end < 0:
            a = queue.popleft()
            for e in adj[a]:
                bnode = graph.edges[e][1]
                if bnode in parent_edge:
                    continue
                parent_edge[bnode] = e
                if match_right[bnode] < 0:
                    end = bnode
                    break
                nxt = graph.edges[match_right[bnode]][0]
                if nxt not in visited_left:
                    visited_left.add(nxt)
                    queue.append(nxt)
        if end < 0:
            return None
        bnode = end
        while True:
            e = parent_edge[bnode]
            a = graph.edges[e][0]
            prev = match_left[a]
            match_left[a] = e
            match_right[bnode] = e
            if a == root:
                break
            bnode = graph.edges[prev][1]
    if graph.n_left != graph.n_right:
        return None
    return match_left


def edge_color(graph: BipartiteMultigraph, m: int) -> list[int]:
    """Proper m-edge-colouring of an m-regular bipartite multigraph.

    Colours are 0..m-1; colour i is the i-th perfect matching extracted.
    """
    if not graph.is_regular(m):
        raise OrderingError(f"graph is not {m}-regular")
    colour = [-1] * len(graph.edges)
    alive = [True] * len(graph.edges)
    for c in range(m):
        matching = _perfect_matching(graph, alive)
        if matching is None:
            raise OrderingError(f"no perfect matching in round {c}; graph is malformed")
        for e in matching:
            colour[e] = c
            alive[e] = False
    return colour


def order_gdd(g: Gdd) -> OrderedGdd:
    """Reorder every block so each point sits r_x/m times in each position."""
    m = g.k
    graph = gdd_incidence_split(g, m)
    colour = edge_color(graph, m)
    ordered = [[-1] * m for _ in g.blocks]
    for (bi, _, x), c in zip(graph.edges, colour):
        ordered[bi][c] = x
    return OrderedGdd(g.n, g.design_groups, [tuple(b) for b in ordered], g.k)


def develop_base_blocks(base_blocks: Sequence[Sequence[Sequence[int]]], G: AbelianGroup) -> list[Block]:
    """All translates, base block by base block, g in enumeration order."""
    elems = G.enumerate()
    out = []
    for i, base in enumerate(base_blocks):
        base = _as_block(base)
        try:
            _check_block(base, G.order, f"base block {i}")
        except DesignError as exc:
            raise OrderingError(str(exc)) from exc
        for g in elems:
            out.append(tuple(G.translate_indices(g, part) for part in base))
    return out


def order_development(base_blocks: Sequence[Sequence[Sequence[int]]], G: AbelianGroup) -> SplittingSystem:
    """Develop ordered base blocks over G, keeping each base block's part order."""
    blocks = develop_base_blocks(base_blocks, G)
    seen: dict[Block, int] = {}
    for i, blk in enumerate(blocks):
        if blk in seen:
            raise OrderingError(
                f"orbit collision: translate {i} repeats block {seen[blk]}; orbits must have size |G|")
        seen[blk] = i
    return SplittingSystem(G.order, tuple(blocks))


DEFAULT_LOG_BUDGET = 200.0
DEFAULT_NODE_BUDGET = 2_000_000


def reorder_exact(sys: SplittingSystem, log_budget: float = DEFAULT_LOG_BUDGET,
                  node_budget: int = DEFAULT_NODE_BUDGET) -> SplittingSystem | None:
    """Backtracking search for an equitable reordering of the parts of each block.

    Returns None when no ordering exists.  Raises :class:`BudgetExceeded`
    when the search space b*log(m!) is above ``log_budget`` or more than
    ``node_budget`` nodes were expanded.
    """
    if c_splitting_profile(sys) is None:
        raise OrderingError("exact reordering needs a c-splitting system")
    m = sys.m
    r = sys.replication()
    if any(rx % m for rx in r):
        return None
    if sys.b * math.log(math.factorial(m)) > log_budget:
        raise BudgetExceeded(f"search space b*log(m!) = {sys.b * math.log(math.factorial(m)):.1f} "
                             f"exceeds budget {log_budget}")
    cap = [rx // m for rx in r]
    counts = [[0] * m for _ in range(sys.v)]
    perms = list(permutations(range(m)))
    choice = [0] * sys.b
    nodes = 0

    def fits(block: Block, perm: tuple[int, ...]) -> bool:
        # perm[pos] = index of the original part placed at position pos
        return all(counts[p][pos] < cap[p] for pos, src in enumerate(perm) for p in block[src])

    def apply(block: Block, perm: tuple[int, ...], d: int) -> None:
        for pos, src in enumerate(perm):
            for p in block[src]:
                counts[p][pos] += d

    # iterative DFS: choice[i] is the next permutation index to try for block i
    i = 0
    while True:
        if i == sys.b:
            blocks = [tuple(sys.blocks[k][src] for src in perms[choice[k] - 1]) for k in range(sys.b)]
            return sys.with_blocks(blocks)
        if i < 0:
            return None
        block = sys.blocks[i]
        placed = False
        while choice[i] < len(perms):
            perm = perms[choice[i]]
            choice[i] += 1
            nodes += 1
            if nodes > node_budget:
                raise BudgetExceeded(f"node budget {node_budget} exhausted")
            if fits(block, perm):
                apply(block, perm, +1)
                placed = True
                break
        if placed:
            i += 1
            continue
        choice[i] = 0
        i -= 1
        if i >= 0:
            apply(sys.blocks[i], perms[choice[i] - 1], -1)
