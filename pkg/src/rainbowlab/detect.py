"""Rainbow cycle detection, triangle counting and small-scale disjoint packing."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .core import ABSENT, ColoredGraph

#: Disjoint packing is searched exhaustively up to this many vertices.
EXACT_PACKING_MAX_N = 12
#: Search-step budget for disjoint packing above :data:`EXACT_PACKING_MAX_N`.
DEFAULT_PACKING_BUDGET = 200_000


@dataclass(frozen=True)
class LengthSpec:
    """Allowed cycle lengths ``lo..hi`` (``hi=None`` means unbounded)."""

    lo: int = 3
    hi: int | None = None

    def __post_init__(self):
        if self.lo < 3 or (self.hi is not None and self.hi < self.lo):
            raise ValueError(f"invalid cycle length range {self.lo}..{self.hi}")

    def allows(self, length: int) -> bool:
        return length >= self.lo and (self.hi is None or length <= self.hi)

    def cap(self, n: int) -> int:
        return n if self.hi is None else min(self.hi, n)

    def __str__(self) -> str:
        if self.hi is None:
            return "any"
        if self.hi == self.lo:
            return f"exact({self.lo})"
        return f"at_most({self.hi})"


def Exact(length: int) -> LengthSpec:
    return LengthSpec(length, length)


def AtMost(length: int) -> LengthSpec:
    return LengthSpec(3, length)


ANY = LengthSpec()


@dataclass(frozen=True)
class CycleWitness:
    """A cycle as a closed vertex sequence; ``colors[i]`` is the color of
    edge ``vertices[i] vertices[i+1]`` (wrapping around)."""

    vertices: tuple[int, ...]
    colors: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.vertices)

    def edges(self) -> list[tuple[int, int]]:
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def to_dict(self) -> dict:
        return {"vertices": list(self.vertices), "colors": list(self.colors)}


def make_witness(G: ColoredGraph, cycle: Sequence[int]) -> CycleWitness:
    """Canonical witness for ``cycle``: least vertex first, then the smaller neighbor."""
    vs = list(cycle)
    i = vs.index(min(vs))
    vs = vs[i:] + vs[:i]
    if len(vs) > 2 and vs[1] > vs[-1]:
        vs = [vs[0]] + vs[:0:-1]
    m = G.matrix
    return CycleWitness(tuple(vs), tuple(m[vs[j]][vs[(j + 1) % len(vs)]] for j in range(len(vs))))


def is_rainbow_cycle(G: ColoredGraph, cycle: Sequence[int]) -> bool:
    """Independent re-check: distinct vertices, consecutive adjacency, distinct colors."""
    vs = list(cycle)
    if len(vs) < 3 or len(set(vs)) != len(vs):
        return False
    if any(not 0 <= v < G.n for v in vs):
        return False
    seen = set()
    for a, b in zip(vs, vs[1:] + vs[:1]):
        c = G.matrix[a][b]
        if c == ABSENT or c in seen:
            return False
        seen.add(c)
    return True


def validate_witness(G: ColoredGraph, w: CycleWitness) -> bool:
    if not is_rainbow_cycle(G, w.vertices):
        return False
    return list(w.colors) == [G.matrix[a][b] for a, b in w.edges()]


def iter_rainbow_cycles(
    G: ColoredGraph, length: LengthSpec = ANY, within: Iterable[int] | None = None
) -> Iterator[CycleWitness]:
    """Yield every rainbow cycle (each once, canonically oriented).

    Backtracks over paths that start at the cycle's least vertex, visiting
    only larger vertices and pruning on a bitmask of used colors.
    """
    n = G.n
    allowed = (1 << n) - 1 if within is None else sum(1 << v for v in set(within))
    cap = min(length.cap(n), G.c)
    if cap < length.lo:
        return
    m = G.matrix
    cidx = G.color_index
    nbrs = G.neighbors

    for s in range(n):
        if not allowed >> s & 1:
            continue
        path = [s]
        on_path = 1 << s
        higher = allowed & ~((1 << (s + 1)) - 1)

        def extend(v: int, used: int) -> Iterator[CycleWitness]:
            nonlocal on_path
            k = len(path)  # vertices on the path, k - 1 edges
            if k >= length.lo and path[1] < v:
                c = m[v][s]
                if c != ABSENT and not used >> cidx[c] & 1:
                    yield make_witness(G, path)
            if k >= cap:
                return
            for w in nbrs[v]:
                if not higher >> w & 1 or on_path >> w & 1:
                    continue
                bit = 1 << cidx[m[v][w]]
                if used & bit:
                    continue
                path.append(w)
                on_path |= 1 << w
                yield from extend(w, used | bit)
                on_path &= ~(1 << w)
                path.pop()

        yield from extend(s, 0)


def find_rainbow_cycle(
    G: ColoredGraph, length: LengthSpec = ANY, within: Iterable[int] | None = None
) -> CycleWitness | None:
    return next(iter_rainbow_cycles(G, length, within), None)


def find_shortest_rainbow_cycle(
    G: ColoredGraph, max_length: int, within: Iterable[int] | None = None
) -> CycleWitness | None:
    """First rainbow cycle of the least length in ``3..max_length``."""
    within = None if within is None else list(within)
    for ell in range(3, max_length + 1):
        w = find_rainbow_cycle(G, Exact(ell), within)
        if w is not None:
            return w
    return None


def count_rainbow_cycles(G: ColoredGraph, length: LengthSpec, limit: int | None = None) -> int:
    count = 0
    for _ in iter_rainbow_cycles(G, length):
        count += 1
        if limit is not None and count >= limit:
            break
    return count


def _triangles(G: ColoredGraph) -> Iterator[tuple[int, int, int]]:
    adj = G.adjacency_bits
    for u in range(G.n):
        for v in G.neighbors[u]:
            if v <= u:
                continue
            common = adj[u] & adj[v] & ~((1 << (v + 1)) - 1)
            while common:
                low = common & -common
                yield u, v, low.bit_length() - 1
                common ^= low


def count_triangles(G: ColoredGraph) -> int:
    """Triangles of the underlying graph."""
    adj = G.adjacency_bits
    total = 0
    for u in range(G.n):
        for v in G.neighbors[u]:
            if v > u:
                total += (adj[u] & adj[v] & ~((1 << (v + 1)) - 1)).bit_count()
    return total


def count_rainbow_triangles(G: ColoredGraph) -> int:
    m = G.matrix
    total = 0
    for u, v, w in _triangles(G):
        a, b, c = m[u][v], m[v][w], m[u][w]
        if a != b and b != c and a != c:
            total += 1
    return total


def has_rainbow_triangle(G: ColoredGraph) -> bool:
    m = G.matrix
    for u, v, w in _triangles(G):
        a, b, c = m[u][v], m[v][w], m[u][w]
        if a != b and b != c and a != c:
            return True
    return False


def is_gallai(G: ColoredGraph) -> bool:
    """Complete and free of rainbow triangles."""
    return G.is_complete() and not has_rainbow_triangle(G)


# -- disjoint packing ------------------------------------------------------


@dataclass(frozen=True)
class Packing:
    """Outcome of a disjoint cycle search.

    ``cycles`` is ``None`` when no packing was found.  ``exact`` is true when
    the search was exhaustive, so ``None`` then proves nonexistence.
    """

    cycles: list | None
    exact: bool

    @property
    def status(self) -> str:
        if self.cycles is not None:
            return "found"
        return "none" if self.exact else "unknown"


class _BudgetExceeded(Exception):
    pass


class _Search:
    def __init__(self, G: ColoredGraph, budget: int | None):
        self.G = G
        self.budget = budget
        self.steps = 0

    def tick(self):
        self.steps += 1
        if self.budget is not None and self.steps > self.budget:
            raise _BudgetExceeded

    def spanning_rainbow_cycle(self, S: Sequence[int]) -> list[int] | None:
        """A rainbow cycle through exactly the vertices of ``S`` (``S[0]`` least)."""
        G = self.G
        m = G.matrix
        k = len(S)
        inside = set(S)
        if len({m[a][b] for a, b in itertools.combinations(S, 2) if m[a][b] != ABSENT}) < k:
            return None
        nbrs = {v: [w for w in G.neighbors[v] if w in inside] for v in S}
        if any(len(ws) < 2 for ws in nbrs.values()):
            return None
        s = S[0]
        path = [s]
        on = {s}

        def dfs(v: int, used: set) -> bool:
            self.tick()
            if len(path) == k:
                c = m[v][s]
                return c != ABSENT and c not in used and path[1] < v
            for w in nbrs[v]:
                if w in on:
                    continue
                c = m[v][w]
                if c in used:
                    continue
                path.append(w)
                on.add(w)
                used.add(c)
                if dfs(w, used):
                    return True
                used.discard(c)
                on.discard(w)
                path.pop()
            return False

        return list(path) if dfs(s, set()) else None


def find_disjoint_rainbow_cycles(
    G: ColoredGraph, k: int, length: LengthSpec = ANY, budget: int | None = None
) -> Packing:
    """Search for ``k`` pairwise vertex-disjoint rainbow cycles.

    Backtracking: the least remaining vertex is either left unused or lies on
    a cycle whose vertex set is tried among the remaining vertices, smallest
    sets first.  Exhaustive for ``n <= 12``; above that the search stops
    after ``budget`` steps and an unsuccessful result is marked inexact.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if budget is None and G.n > EXACT_PACKING_MAX_N:
        budget = DEFAULT_PACKING_BUDGET
    search = _Search(G, budget)
    lo = length.lo
    chosen: list[list[int]] = []

    def solve(remaining: list[int], need: int) -> bool:
        if need == 0:
            return True
        if len(remaining) < need * lo:
            return False
        v, rest = remaining[0], remaining[1:]
        hi = length.cap(len(remaining))
        for size in range(lo, hi + 1):
            for others in itertools.combinations(rest, size - 1):
                search.tick()
                cyc = search.spanning_rainbow_cycle((v,) + others)
                if cyc is None:
                    continue
                chosen.append(cyc)
                taken = set(others)
                if solve([w for w in rest if w not in taken], need - 1):
                    return True
                chosen.pop()
        return solve(rest, need)

    try:
        ok = solve(list(range(G.n)), k)
    except _BudgetExceeded:
        return Packing(None, exact=False)
    if not ok:
        return Packing(None, exact=True)
    return Packing([make_witness(G, c) for c in chosen], exact=True)
