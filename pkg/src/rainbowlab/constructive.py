"""Constructive procedures: spanning bipartite extraction and the
anchor-edge digraph reduction used to pack vertex-disjoint rainbow cycles."""

from __future__ import annotations

import itertools
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Sequence

from .core import ABSENT, ColoredGraph, GraphError, min_cn_union
from .detect import (
    CycleWitness,
    Packing,
    _BudgetExceeded,
    find_shortest_rainbow_cycle,
    is_rainbow_cycle,
    make_witness,
)

#: Directed packing is searched exhaustively up to this many digraph vertices.
EXACT_DIGRAPH_MAX = 14
ALON_CONSTANT = 64
BUCIC_CONSTANT = 18


# -- spanning bipartite subgraph --------------------------------------------


@dataclass(frozen=True)
class Move:
    vertex: int
    from_side: int
    f_before: int
    f_after: int


@dataclass
class BipartitionState:
    """Partition ``side[v] in {0, 1}`` with ``H`` the full cross subgraph.

    ``f = e(H) + sum_v d_H^c(v)`` is maintained incrementally.
    """

    graph: ColoredGraph
    side: list[int]
    f: int = 0
    moves: list[Move] = field(default_factory=list)
    _cross: list[Counter] = field(default_factory=list, repr=False)

    def __post_init__(self):
        if len(self.side) != self.graph.n or any(s not in (0, 1) for s in self.side):
            raise GraphError("side assignment must give 0 or 1 for every vertex")
        self._cross = [self._cross_counter(v) for v in range(self.graph.n)]
        self.f = self.recompute_f()

    def _cross_counter(self, v: int) -> Counter:
        m = self.graph.matrix
        return Counter(m[v][w] for w in self.graph.neighbors[v] if self.side[w] != self.side[v])

    @property
    def X(self) -> list[int]:
        return [v for v, s in enumerate(self.side) if s == 0]

    @property
    def Y(self) -> list[int]:
        return [v for v, s in enumerate(self.side) if s == 1]

    def d_H(self, v: int) -> int:
        return sum(self._cross[v].values())

    def dc_H(self, v: int) -> int:
        return len(self._cross[v])

    def recompute_f(self) -> int:
        """``f`` from scratch, without the incremental counters."""
        G = self.graph
        m = G.matrix
        e_h = sum(1 for u, v, _ in G.edges if self.side[u] != self.side[v])
        colors = sum(
            len({m[v][w] for w in G.neighbors[v] if self.side[w] != self.side[v]}) for v in range(G.n)
        )
        return e_h + colors

    def slack(self, v: int) -> int:
        """``2 d_H^c(v) + 3 d_H(v) - d_G^c(v) - d_G(v)``; negative means violated."""
        G = self.graph
        return 2 * self.dc_H(v) + 3 * self.d_H(v) - G.cn_bits[v].bit_count() - len(G.neighbors[v])

    def move(self, u: int) -> Move:
        G = self.graph
        m = G.matrix
        before = self.f
        delta = 0
        old = self.side[u]
        self.side[u] = 1 - old
        for w in G.neighbors[u]:
            c = m[u][w]
            cw = self._cross[w]
            if self.side[w] == old:  # becomes a cross edge
                delta += 1
                if cw[c] == 0:
                    delta += 1
                cw[c] += 1
            else:  # stops being a cross edge
                delta -= 1
                cw[c] -= 1
                if cw[c] == 0:
                    del cw[c]
                    delta -= 1
        delta -= len(self._cross[u])
        self._cross[u] = self._cross_counter(u)
        delta += len(self._cross[u])
        self.f = before + delta
        mv = Move(u, old, before, self.f)
        self.moves.append(mv)
        return mv


def spanning_bipartite(G: ColoredGraph, seed: Sequence[int] | None = None) -> BipartitionState:
    """Local search for a bipartition whose cross subgraph ``H`` satisfies
    ``2 d_H^c(v) + 3 d_H(v) >= d_G^c(v) + d_G(v)`` at every vertex.

    Starts from ``seed`` (default: even vertices on side 0, odd on side 1)
    and repeatedly moves the least violating vertex to the other side.  Each
    move raises ``f`` by at least one, so at most ``e(G) + sum d_G^c`` moves
    happen.
    """
    side = list(seed) if seed is not None else [v % 2 for v in range(G.n)]
    state = BipartitionState(G, side)
    bound = G.e + sum(b.bit_count() for b in G.cn_bits)
    while True:
        bad = next((v for v in range(G.n) if state.slack(v) < 0), None)
        if bad is None:
            return state
        if len(state.moves) >= bound:
            raise RuntimeError("spanning_bipartite exceeded its move bound")
        state.move(bad)


# -- anchor-edge reduction ------------------------------------------------


@dataclass(frozen=True)
class ReductionContext:
    """Anchor edge ``uv`` with neighbor sets ``s1`` (of ``u``) and ``s2`` (of ``v``).

    Anchor colors ``C(u x)`` for ``x`` in ``s1`` and ``C(v y)`` for ``y`` in
    ``s2`` are pairwise distinct and all differ from ``C(uv)``.
    """

    graph: ColoredGraph
    u: int
    v: int
    s1: tuple[int, ...]
    s2: tuple[int, ...]
    uv_color: int
    cn_union: int

    def anchor(self, x: int) -> int:
        m = self.graph.matrix
        return m[self.u][x] if x in self.s1 else m[self.v][x]

    @property
    def bound_met(self) -> bool:
        """Whether ``s1 + s2 + 1 >= |CN(u) | CN(v)|`` (holds when no rainbow
        triangle passes through ``uv``)."""
        return len(self.s1) + len(self.s2) + 1 >= self.cn_union

    def validate(self) -> bool:
        G, u, v = self.graph, self.u, self.v
        if set(self.s1) & set(self.s2) or u in self.s1 + self.s2 or v in self.s1 + self.s2:
            return False
        if any(not G.has_edge(u, x) for x in self.s1) or any(not G.has_edge(v, y) for y in self.s2):
            return False
        anchors = [self.anchor(x) for x in self.s1 + self.s2]
        return len(set(anchors)) == len(anchors) and self.uv_color not in anchors


def build_reduction(G: ColoredGraph, u: int, v: int) -> ReductionContext:
    """Greedy maximal anchor sets, scanning vertices in ascending order.

    Each vertex goes to ``s1`` if its edge to ``u`` has an unused color,
    otherwise to ``s2`` if its edge to ``v`` does.
    """
    if not (0 <= u < G.n and 0 <= v < G.n) or u == v or not G.has_edge(u, v):
        raise GraphError(f"({u}, {v}) is not an edge")
    m = G.matrix
    uv = m[u][v]
    used = {uv}
    s1: list[int] = []
    s2: list[int] = []
    for w in range(G.n):
        if w == u or w == v:
            continue
        cu, cv = m[u][w], m[v][w]
        if cu != ABSENT and cu not in used:
            s1.append(w)
            used.add(cu)
        elif cv != ABSENT and cv not in used:
            s2.append(w)
            used.add(cv)
    union = (G.cn_bits[u] | G.cn_bits[v]).bit_count()
    return ReductionContext(G, u, v, tuple(s1), tuple(s2), uv, union)


@dataclass(frozen=True)
class CycleDigraph:
    vertices: tuple[int, ...]
    side: dict  # vertex -> 1 or 2
    arcs: frozenset

    @property
    def out(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {x: [] for x in self.vertices}
        for a, b in sorted(self.arcs):
            adj[a].append(b)
        return adj

    def out_degree(self, x: int) -> int:
        return sum(1 for a, _ in self.arcs if a == x)

    def has_two_cycle(self) -> bool:
        return any((b, a) in self.arcs for a, b in self.arcs)


@dataclass(frozen=True)
class ShortRainbowCycleFound:
    witness: CycleWitness


def digraph_from_arcs(vertices: Sequence[int], arcs) -> CycleDigraph:
    """A bare digraph (all vertices tagged side 1), for packing on its own."""
    vs = tuple(vertices)
    arcset = frozenset((a, b) for a, b in arcs)
    if any(a == b for a, b in arcset):
        raise GraphError("self-loops are not allowed")
    if any(a not in vs or b not in vs for a, b in arcset):
        raise GraphError("arc endpoint outside the vertex set")
    return CycleDigraph(vs, {x: 1 for x in vs}, arcset)


def build_cycle_digraph(ctx: ReductionContext) -> CycleDigraph | ShortRainbowCycleFound:
    """Arcs point at the endpoint whose anchor color the edge repeats.

    An edge inside ``s1`` (or ``s2``) matching neither anchor closes a rainbow
    triangle with ``u`` (or ``v``); a cross edge matching neither anchor nor
    ``C(uv)`` closes a rainbow 4-cycle through ``u`` and ``v``.  Those are
    returned as :class:`ShortRainbowCycleFound`.
    """
    G = ctx.graph
    m = G.matrix
    u, v = ctx.u, ctx.v
    arcs: set[tuple[int, int]] = set()

    for hub, group in ((u, ctx.s1), (v, ctx.s2)):
        for a, b in itertools.combinations(group, 2):
            c = m[a][b]
            if c == ABSENT:
                continue
            if c == m[hub][b]:
                arcs.add((a, b))
            elif c == m[hub][a]:
                arcs.add((b, a))
            else:
                return ShortRainbowCycleFound(make_witness(G, [hub, a, b]))

    for x in ctx.s1:
        for y in ctx.s2:
            c = m[x][y]
            if c == ABSENT or c == ctx.uv_color:
                continue
            if c == m[u][x]:
                arcs.add((y, x))
            elif c == m[v][y]:
                arcs.add((x, y))
            else:
                return ShortRainbowCycleFound(make_witness(G, [u, x, y, v]))

    side = {x: 1 for x in ctx.s1}
    side.update({y: 2 for y in ctx.s2})
    D = CycleDigraph(ctx.s1 + ctx.s2, side, frozenset(arcs))
    if D.has_two_cycle():
        raise AssertionError("cycle digraph has a 2-cycle; anchor colors are not distinct")
    return D


# -- directed cycle packing ------------------------------------------------


def _cycles_through(out: dict[int, list[int]], v: int, allowed: set[int], tick) -> list[list[int]]:
    """Directed cycles with least vertex ``v``, one per vertex set, shortest first."""
    found: dict[frozenset, list[int]] = {}
    path = [v]
    on = {v}

    def dfs(x: int):
        tick()
        for y in out[x]:
            if y == v and len(path) >= 2:
                key = frozenset(path)
                if key not in found:
                    found[key] = list(path)
            elif y in allowed and y > v and y not in on:
                path.append(y)
                on.add(y)
                dfs(y)
                on.discard(y)
                path.pop()

    dfs(v)
    return sorted(found.values(), key=lambda c: (len(c), sorted(c)))


def _shortest_cycle(out: dict[int, list[int]], allowed: set[int]) -> list[int] | None:
    best = None
    for s in sorted(allowed):
        parent = {s: None}
        q = deque([s])
        while q:
            x = q.popleft()
            hit = False
            for y in out[x]:
                if y not in allowed:
                    continue
                if y == s:
                    cyc = [x]
                    while parent[cyc[-1]] is not None:
                        cyc.append(parent[cyc[-1]])
                    cyc.reverse()
                    if best is None or len(cyc) < len(best):
                        best = cyc
                    hit = True
                    break
                if y not in parent:
                    parent[y] = x
                    q.append(y)
            if hit:
                break
    return best


def pack_directed_cycles(D: CycleDigraph, k: int, budget: int | None = None) -> Packing:
    """``k`` vertex-disjoint directed cycles of ``D``, each listed in arc order.

    Exhaustive backtracking for up to 14 vertices.  Larger digraphs get a
    greedy shortest-cycle pass, then a budgeted exhaustive search; a miss is
    reported as inexact.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    out = D.out
    verts = sorted(D.vertices)
    if len(verts) > EXACT_DIGRAPH_MAX:
        allowed = set(verts)
        greedy = []
        while len(greedy) < k:
            cyc = _shortest_cycle(out, allowed)
            if cyc is None:
                break
            greedy.append(cyc)
            allowed -= set(cyc)
        if len(greedy) == k:
            return Packing(greedy, exact=True)
        if budget is None:
            budget = 200_000

    steps = 0

    def tick():
        nonlocal steps
        steps += 1
        if budget is not None and steps > budget:
            raise _BudgetExceeded

    chosen: list[list[int]] = []

    def solve(remaining: list[int], need: int) -> bool:
        if need == 0:
            return True
        if len(remaining) < 2 * need:
            return False
        v, rest = remaining[0], remaining[1:]
        for cyc in _cycles_through(out, v, set(remaining), tick):
            chosen.append(cyc)
            taken = set(cyc)
            if solve([w for w in rest if w not in taken], need - 1):
                return True
            chosen.pop()
        return solve(rest, need)

    try:
        ok = solve(verts, k)
    except _BudgetExceeded:
        return Packing(None, exact=False)
    return Packing(list(chosen) if ok else None, exact=True)


class LiftError(AssertionError):
    """A lifted directed cycle failed the independent rainbow re-check."""


def lift_cycles(ctx: ReductionContext, cycles: Sequence[Sequence[int]]) -> list[CycleWitness]:
    """Map directed cycles of the reduction digraph to rainbow cycles of the host graph.

    Every arc's edge repeats its head's anchor color and anchors are
    pairwise distinct, so each lifted cycle must be rainbow; this is
    re-checked on the host graph before returning.
    """
    G = ctx.graph
    out: list[CycleWitness] = []
    seen: set[int] = set()
    for cyc in cycles:
        cyc = list(cyc)
        if not is_rainbow_cycle(G, cyc):
            raise LiftError(f"lifted cycle {cyc} is not a rainbow cycle of the host graph")
        if seen & set(cyc):
            raise LiftError(f"lifted cycle {cyc} overlaps an earlier cycle")
        seen |= set(cyc)
        out.append(make_witness(G, cyc))
    return out


# -- heuristic finder --------------------------------------------------------


@dataclass
class RainbowPacking:
    """Result of :func:`find_disjoint_rainbow_cycles_heuristic`.

    ``cycles`` is ``None`` when fewer than ``k`` cycles were found; that
    carries no claim of nonexistence.
    """

    cycles: list[CycleWitness] | None
    k: int
    constant: int
    greedy_cycles: int
    stage: str | None
    threshold_doubled: int
    min_cn_union: int | None
    anchors_tried: int = 0
    diagnostics: list[dict] = field(default_factory=list)

    @property
    def hypothesis_met(self) -> bool:
        # |CN(u) | CN(v)| >= n/2 + constant*k + 1, doubled to stay in integers
        return self.min_cn_union is not None and 2 * self.min_cn_union >= self.threshold_doubled

    def to_dict(self) -> dict:
        return {
            "found": self.cycles is not None,
            "cycles": None if self.cycles is None else [w.to_dict() for w in self.cycles],
            "k": self.k,
            "constant": self.constant,
            "greedy_cycles": self.greedy_cycles,
            "stage": self.stage,
            "min_cn_union": self.min_cn_union,
            "hypothesis_threshold": self.threshold_doubled / 2,
            "hypothesis_met": self.hypothesis_met,
            "anchors_tried": self.anchors_tried,
            "diagnostics": self.diagnostics,
        }


def _induced(G: ColoredGraph, vs: list[int]) -> ColoredGraph:
    m = G.matrix
    return ColoredGraph(len(vs), tuple(tuple(m[a][b] for b in vs) for a in vs))


def find_disjoint_rainbow_cycles_heuristic(
    G: ColoredGraph, k: int, constant: int = ALON_CONSTANT, max_anchors: int | None = None
) -> RainbowPacking:
    """Greedy short-cycle packing followed by the anchor-edge reduction.

    Rainbow cycles of length 3 to 5 are packed greedily (shortest first).  If
    fewer than ``k`` turn up, each edge ``uv`` of the remaining graph is tried
    as an anchor: its reduction digraph is searched for the missing number of
    disjoint directed cycles, which lift to rainbow cycles.  ``constant`` only
    feeds the reported hypothesis threshold and out-degree diagnostics.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    result = RainbowPacking(
        cycles=None,
        k=k,
        constant=constant,
        greedy_cycles=0,
        stage=None,
        threshold_doubled=G.n + 2 * constant * k + 2,
        min_cn_union=min_cn_union(G),
    )
    if G.c < 3:
        return result
    packed: list[CycleWitness] = []
    remaining = list(range(G.n))
    while len(packed) < k:
        w = find_shortest_rainbow_cycle(G, 5, within=remaining)
        if w is None:
            break
        packed.append(w)
        taken = set(w.vertices)
        remaining = [x for x in remaining if x not in taken]
    result.greedy_cycles = len(packed)
    if len(packed) >= k:
        result.cycles = packed[:k]
        result.stage = "greedy"
        return result

    sub = _induced(G, remaining)
    need = k - len(packed)
    tried = 0
    for a, b, _ in sub.edges:
        if max_anchors is not None and tried >= max_anchors:
            break
        tried += 1
        ctx = build_reduction(sub, a, b)
        if len(ctx.s1) + len(ctx.s2) < 3 * need:
            continue
        D = build_cycle_digraph(ctx)
        if isinstance(D, ShortRainbowCycleFound):
            # unreachable after a maximal greedy pass; kept for safety
            cyc = [remaining[x] for x in D.witness.vertices]
            packed.append(make_witness(G, cyc))
            if len(packed) >= k:
                result.cycles = packed[:k]
                result.stage = "reduction"
                result.anchors_tried = tried
                return result
            continue
        degs = [D.out_degree(x) for x in D.vertices]
        if len(result.diagnostics) < 20:
            result.diagnostics.append(
                {
                    "anchor": [remaining[a], remaining[b]],
                    "digraph_order": len(D.vertices),
                    "min_out_degree": min(degs, default=0),
                    "out_degree_target": constant * need,
                }
            )
        pk = pack_directed_cycles(D, need)
        if pk.cycles is None:
            continue
        lifted = lift_cycles(ctx, pk.cycles)
        mapped = [make_witness(G, [remaining[x] for x in w.vertices]) for w in lifted]
        result.cycles = packed + mapped
        result.stage = "reduction"
        result.anchors_tried = tried
        return result
    result.anchors_tried = tried
    return result
