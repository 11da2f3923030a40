"""Edge-colored graph representation, color statistics and enumeration.

A :class:`ColoredGraph` is a symmetric color matrix; ``ABSENT`` marks a
non-edge.  Colors are arbitrary non-negative integers and are preserved as
given; relabeling to first-occurrence order only happens inside
:func:`canonical_key` and exhaustive enumeration.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence

ABSENT = -1

#: Largest vertex count accepted by :func:`enumerate_graphs`.
MAX_ENUM_VERTICES = 8
#: Largest edge count accepted by exhaustive coloring enumeration (Bell(12) ~ 4.2M).
MAX_EXHAUSTIVE_EDGES = 12


class GraphError(ValueError):
    """Raised when a graph cannot be built or an index is out of range."""


@dataclass(frozen=True)
class ColoredGraph:
    """Immutable edge-colored simple graph on vertices ``0..n-1``.

    ``matrix[u][v]`` is the color of edge ``uv`` or ``ABSENT``.  Use
    :func:`build_graph` rather than the constructor; it validates input.
    """

    n: int
    matrix: tuple[tuple[int, ...], ...] = field(repr=False)

    def color(self, u: int, v: int) -> int | None:
        c = self.matrix[u][v]
        return None if c == ABSENT else c

    def has_edge(self, u: int, v: int) -> bool:
        return self.matrix[u][v] != ABSENT

    @cached_property
    def edges(self) -> tuple[tuple[int, int, int], ...]:
        """Edges ``(u, v, color)`` with ``u < v`` in lexicographic order."""
        m = self.matrix
        return tuple(
            (u, v, m[u][v])
            for u in range(self.n)
            for v in range(u + 1, self.n)
            if m[u][v] != ABSENT
        )

    @property
    def e(self) -> int:
        return len(self.edges)

    @cached_property
    def palette(self) -> frozenset[int]:
        return frozenset(c for _, _, c in self.edges)

    @property
    def c(self) -> int:
        return len(self.palette)

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        m = self.matrix
        return tuple(
            tuple(w for w in range(self.n) if m[v][w] != ABSENT) for v in range(self.n)
        )

    @cached_property
    def adjacency_bits(self) -> tuple[int, ...]:
        """Neighborhood of each vertex as an int bitmask."""
        out = []
        for nbrs in self.neighbors:
            bits = 0
            for w in nbrs:
                bits |= 1 << w
            out.append(bits)
        return tuple(out)

    @cached_property
    def color_index(self) -> dict[int, int]:
        """Dense index for every color, in ascending color order."""
        return {c: i for i, c in enumerate(sorted(self.palette))}

    @cached_property
    def cn_bits(self) -> tuple[int, ...]:
        """Color neighborhood of each vertex as a bitmask over :attr:`color_index`."""
        idx = self.color_index
        m = self.matrix
        out = []
        for v in range(self.n):
            bits = 0
            for w in self.neighbors[v]:
                bits |= 1 << idx[m[v][w]]
            out.append(bits)
        return tuple(out)

    @cached_property
    def color_classes(self) -> dict[int, tuple[tuple[int, int], ...]]:
        classes: dict[int, list[tuple[int, int]]] = {}
        for u, v, c in self.edges:
            classes.setdefault(c, []).append((u, v))
        return {c: tuple(es) for c, es in classes.items()}

    @cached_property
    def saturation(self) -> tuple[int, ...]:
        """Saturated degree of every vertex."""
        # A color is saturated by v iff v lies on every edge of its class.
        counts = [0] * self.n
        for es in self.color_classes.values():
            common = {es[0][0], es[0][1]}
            for u, v in es[1:]:
                common &= {u, v}
                if not common:
                    break
            for w in common:
                counts[w] += 1
        return tuple(counts)

    def is_complete(self) -> bool:
        return self.e == self.n * (self.n - 1) // 2

    def is_rainbow(self) -> bool:
        return self.c == self.e

    def edge_list(self) -> list[tuple[int, int, int]]:
        return list(self.edges)


@dataclass(frozen=True)
class GraphStats:
    e: int
    c: int
    min_color_degree: int
    degrees: tuple[int, ...]
    color_degrees: tuple[int, ...]


def _matrix_from_edges(n: int, edges: Iterable[tuple[int, int, int]]) -> tuple[tuple[int, ...], ...]:
    rows = [[ABSENT] * n for _ in range(n)]
    for pos, edge in enumerate(edges):
        try:
            u, v, c = edge
        except (TypeError, ValueError):
            raise GraphError(f"edge #{pos}: expected (u, v, color), got {edge!r}") from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge #{pos}: vertex out of range for n={n}: ({u}, {v})")
        if u == v:
            raise GraphError(f"edge #{pos}: loop at vertex {u}")
        if c is None or c < 0:
            raise GraphError(f"edge #{pos}: color must be a non-negative integer, got {c!r}")
        old = rows[u][v]
        if old != ABSENT and old != c:
            raise GraphError(f"edge #{pos}: duplicate pair ({u}, {v}) with colors {old} and {c}")
        rows[u][v] = rows[v][u] = c
    return tuple(tuple(r) for r in rows)


def build_graph(n: int, edges: Iterable[tuple[int, int, int]]) -> ColoredGraph:
    """Build a colored graph from ``(u, v, color)`` triples.

    Repeating a pair with the same color is tolerated; repeating it with a
    different color, loops, negative colors and out-of-range vertices raise
    :class:`GraphError`.
    """
    if n < 0:
        raise GraphError(f"vertex count must be non-negative, got {n}")
    return ColoredGraph(n, _matrix_from_edges(n, edges))


def from_matrix(rows: Sequence[Sequence[int]]) -> ColoredGraph:
    n = len(rows)
    for u in range(n):
        if len(rows[u]) != n:
            raise GraphError("matrix is not square")
        if rows[u][u] != ABSENT:
            raise GraphError(f"loop at vertex {u}")
        for v in range(u + 1, n):
            if rows[u][v] != rows[v][u]:
                raise GraphError(f"matrix not symmetric at ({u}, {v})")
    return ColoredGraph(n, tuple(tuple(r) for r in rows))


def _check_vertex(G: ColoredGraph, v: int) -> None:
    if not 0 <= v < G.n:
        raise GraphError(f"vertex {v} out of range for n={G.n}")


def degree(G: ColoredGraph, v: int) -> int:
    return len(G.neighbors[v])


def color_degree(G: ColoredGraph, v: int) -> int:
    return G.cn_bits[v].bit_count()


def stats(G: ColoredGraph) -> GraphStats:
    degs = tuple(len(nb) for nb in G.neighbors)
    cdegs = tuple(b.bit_count() for b in G.cn_bits)
    return GraphStats(
        e=G.e,
        c=G.c,
        min_color_degree=min(cdegs, default=0),
        degrees=degs,
        color_degrees=cdegs,
    )


def color_neighborhood(G: ColoredGraph, v: int, scope: Iterable[int] | None = None) -> frozenset[int]:
    """Colors on edges from ``v`` into ``scope`` (all of ``V(G)`` by default)."""
    _check_vertex(G, v)
    row = G.matrix[v]
    if scope is None:
        targets: Iterable[int] = G.neighbors[v]
    else:
        targets = list(scope)
        for w in targets:
            _check_vertex(G, w)
    return frozenset(row[w] for w in targets if w != v and row[w] != ABSENT)


def cn_union(G: ColoredGraph, u: int, v: int) -> int:
    """``|CN(u) | CN(v)|``."""
    _check_vertex(G, u)
    _check_vertex(G, v)
    if u == v:
        raise GraphError("cn_union needs two distinct vertices")
    return (G.cn_bits[u] | G.cn_bits[v]).bit_count()


def min_cn_union(G: ColoredGraph) -> int | None:
    """Minimum of :func:`cn_union` over all vertex pairs, ``None`` if ``n < 2``."""
    bits = G.cn_bits
    best = None
    for u in range(G.n):
        bu = bits[u]
        for v in range(u + 1, G.n):
            s = (bu | bits[v]).bit_count()
            if best is None or s < best:
                best = s
    return best


def _saturation_counts(G: ColoredGraph) -> tuple[int, ...]:
    return G.saturation


def saturated_degree(G: ColoredGraph, v: int) -> int:
    """``c(G) - c(G - v)``: number of colors all of whose edges touch ``v``."""
    _check_vertex(G, v)
    return _saturation_counts(G)[v]


def saturated_degrees(G: ColoredGraph) -> tuple[int, ...]:
    return _saturation_counts(G)


# -- subgraphs -------------------------------------------------------------


@dataclass(frozen=True)
class Induced:
    vertices: tuple[int, ...]

    def __init__(self, vertices: Iterable[int]):
        object.__setattr__(self, "vertices", tuple(vertices))


@dataclass(frozen=True)
class Cross:
    left: tuple[int, ...]
    right: tuple[int, ...]

    def __init__(self, left: Iterable[int], right: Iterable[int]):
        object.__setattr__(self, "left", tuple(left))
        object.__setattr__(self, "right", tuple(right))


@dataclass(frozen=True)
class DeleteVertex:
    vertex: int


@dataclass(frozen=True)
class DeleteEdge:
    u: int
    v: int


Selector = Induced | Cross | DeleteVertex | DeleteEdge


def _relabel(G: ColoredGraph, keep: Sequence[int], allowed=None) -> ColoredGraph:
    m = G.matrix
    rows = []
    for a in keep:
        row = []
        for b in keep:
            c = m[a][b]
            if c != ABSENT and allowed is not None and not allowed(a, b):
                c = ABSENT
            row.append(c)
        rows.append(tuple(row))
    return ColoredGraph(len(keep), tuple(rows))


def subgraph(G: ColoredGraph, selector: Selector) -> ColoredGraph:
    """Extract a subgraph; surviving vertices are renumbered in ascending order.

    ``Cross(S1, S2)`` keeps vertex set ``S1 | S2`` and only the edges with one
    end in each class.
    """
    if isinstance(selector, Induced):
        keep = sorted(set(selector.vertices))
        for v in keep:
            _check_vertex(G, v)
        return _relabel(G, keep)
    if isinstance(selector, Cross):
        left, right = set(selector.left), set(selector.right)
        if left & right:
            raise GraphError(f"cross classes overlap on {sorted(left & right)}")
        for v in left | right:
            _check_vertex(G, v)
        keep = sorted(left | right)
        return _relabel(G, keep, lambda a, b: (a in left) != (b in left))
    if isinstance(selector, DeleteVertex):
        _check_vertex(G, selector.vertex)
        return _relabel(G, [w for w in range(G.n) if w != selector.vertex])
    if isinstance(selector, DeleteEdge):
        u, v = selector.u, selector.v
        _check_vertex(G, u)
        _check_vertex(G, v)
        if not G.has_edge(u, v):
            raise GraphError(f"({u}, {v}) is not an edge")
        rows = [list(r) for r in G.matrix]
        rows[u][v] = rows[v][u] = ABSENT
        return ColoredGraph(G.n, tuple(tuple(r) for r in rows))
    raise TypeError(f"unknown selector {selector!r}")


def permute(G: ColoredGraph, perm: Sequence[int], recolor: dict[int, int] | None = None) -> ColoredGraph:
    """Graph with vertex ``v`` renamed to ``perm[v]`` and colors mapped by ``recolor``."""
    n = G.n
    rows = [[ABSENT] * n for _ in range(n)]
    for u, v, c in G.edges:
        c2 = recolor[c] if recolor is not None else c
        rows[perm[u]][perm[v]] = rows[perm[v]][perm[u]] = c2
    return ColoredGraph(n, tuple(tuple(r) for r in rows))


def recolor_first_occurrence(G: ColoredGraph) -> ColoredGraph:
    """Relabel colors 0, 1, ... in order of first appearance along sorted edges."""
    mapping: dict[int, int] = {}
    for _, _, c in G.edges:
        if c not in mapping:
            mapping[c] = len(mapping)
    return permute(G, range(G.n), mapping)


# -- canonical form --------------------------------------------------------


def _twin_classes(m: tuple[tuple[int, ...], ...], n: int) -> list[int]:
    cls = list(range(n))
    for a in range(n):
        if cls[a] != a:
            continue
        for b in range(a + 1, n):
            if cls[b] != b:
                continue
            if all(m[a][x] == m[b][x] for x in range(n) if x != a and x != b):
                cls[b] = a
    return cls


def _vertex_labels(G: ColoredGraph) -> list[tuple]:
    sizes = {c: len(es) for c, es in G.color_classes.items()}
    m = G.matrix
    return [
        (len(G.neighbors[v]), G.cn_bits[v].bit_count(), tuple(sorted(sizes[m[v][w]] for w in G.neighbors[v])))
        for v in range(G.n)
    ]


def canonical_sequence(G: ColoredGraph) -> tuple[int, ...]:
    """Lexicographically least relabeled upper triangle over vertex orders.

    Entries are read column by column (``(0,1), (0,2), (1,2), (0,3), ...``),
    non-edges become 0 and colors become 1, 2, ... in order of first
    occurrence.  Only vertex orders sorted by an isomorphism-invariant label
    (degree, color degree, sizes of incident color classes) are searched, by
    branch and bound.  Vertices with identical rows (outside their own pair)
    are interchangeable, so only one of them is tried at each branch.
    """
    n = G.n
    m = G.matrix
    twin = _twin_classes(m, n)
    label = _vertex_labels(G)
    slot = sorted(label)
    best: list[int] | None = None
    order: list[int] = []
    used = [False] * n
    seq: list[int] = []

    def extend(relabel: dict[int, int]) -> None:
        nonlocal best
        p = len(order)
        if p == n:
            if best is None or seq < best:
                best = list(seq)
            return
        tried = set()
        end = (p + 1) * p // 2
        for w in range(n):
            if used[w] or twin[w] in tried or label[w] != slot[p]:
                continue
            tried.add(twin[w])
            rl = dict(relabel)
            for x in order:
                c = m[x][w]
                if c == ABSENT:
                    seq.append(0)
                else:
                    if c not in rl:
                        rl[c] = len(rl) + 1
                    seq.append(rl[c])
            if best is None or seq <= best[:end]:
                used[w] = True
                order.append(w)
                extend(rl)
                order.pop()
                used[w] = False
            del seq[len(seq) - p :]

    extend({})
    return tuple(best or ())


def canonical_key(G: ColoredGraph) -> bytes:
    """Key equal for two graphs iff they differ by a vertex permutation and a color bijection."""
    seq = canonical_sequence(G)
    width = 1 if max(seq, default=0) < 256 else 2
    return bytes([width]) + G.n.to_bytes(2, "big") + b"".join(x.to_bytes(width, "big") for x in seq)


# -- enumeration -----------------------------------------------------------


def bell_number(k: int) -> int:
    row = [1]
    for _ in range(k):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def restricted_growth_strings(length: int) -> Iterator[tuple[int, ...]]:
    """All set partitions of ``range(length)`` as restricted-growth strings, lexicographic."""
    if length == 0:
        yield ()
        return
    a = [0] * length
    b = [1] * length  # b[i] = 1 + max(a[:i]), the largest value a[i] may take
    while True:
        yield tuple(a)
        i = length - 1
        while i > 0 and a[i] == b[i]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        top = max(b[i], a[i] + 1)
        for j in range(i + 1, length):
            a[j] = 0
            b[j] = top


def _uncolored(n: int, pairs: Iterable[tuple[int, int]]) -> ColoredGraph:
    return build_graph(n, [(u, v, 0) for u, v in pairs])


@lru_cache(maxsize=None)
def _graph_classes(n: int) -> tuple[ColoredGraph, ...]:
    if n <= 1:
        return (_uncolored(n, []),)
    seen: dict[bytes, ColoredGraph] = {}
    for parent in _graph_classes(n - 1):
        base = [(u, v) for u, v, _ in parent.edges]
        for mask in range(1 << (n - 1)):
            pairs = base + [(w, n - 1) for w in range(n - 1) if mask >> w & 1]
            G = _uncolored(n, pairs)
            key = canonical_key(G)
            if key not in seen:
                seen[key] = G
    return tuple(sorted(seen.values(), key=lambda g: (g.e, canonical_sequence(g))))


def enumerate_graphs(n: int) -> Iterator[ColoredGraph]:
    """One underlying graph (all edges color 0) per isomorphism class on ``n`` vertices.

    Classes on ``n`` vertices are grown from those on ``n - 1`` by adding a
    vertex with every possible neighborhood and deduplicating by canonical key.
    """
    if n < 0 or n > MAX_ENUM_VERTICES:
        raise GraphError(f"enumerate_graphs supports 0 <= n <= {MAX_ENUM_VERTICES}, got {n}")
    yield from _graph_classes(n)


@dataclass(frozen=True)
class EnumSpec:
    """Which colorings of ``underlying`` to produce.

    ``mode="exhaustive"`` yields every set partition of the (sorted) edge set
    once.  ``mode="random"`` yields ``count`` colorings whose palette size is
    drawn uniformly from ``palette_range`` (clipped to ``[1, e]`` by default).
    """

    underlying: ColoredGraph
    mode: str = "exhaustive"
    seed: int = 0
    count: int = 0
    palette_range: tuple[int, int] | None = None


def enumerate_colorings(spec: EnumSpec) -> Iterator[ColoredGraph]:
    G = spec.underlying
    pairs = [(u, v) for u, v, _ in G.edges]
    if spec.mode == "exhaustive":
        if len(pairs) > MAX_EXHAUSTIVE_EDGES:
            raise GraphError(
                f"exhaustive coloring needs e <= {MAX_EXHAUSTIVE_EDGES}, got e={len(pairs)}"
            )
        yield from _exhaustive_colorings(G.n, pairs)
    elif spec.mode == "random":
        lo, hi = spec.palette_range or (1, max(1, len(pairs)))
        for i in range(spec.count):
            rng = random.Random(f"{spec.seed}/{i}")
            palette = rng.randint(lo, hi)
            yield _random_colored(G.n, pairs, palette, rng)
    else:
        raise GraphError(f"unknown enumeration mode {spec.mode!r}")


def _exhaustive_colorings(n: int, pairs: list[tuple[int, int]]) -> Iterator[ColoredGraph]:
    base = [[ABSENT] * n for _ in range(n)]
    for rgs in restricted_growth_strings(len(pairs)):
        rows = [r[:] for r in base]
        for (u, v), c in zip(pairs, rgs):
            rows[u][v] = rows[v][u] = c
        yield ColoredGraph(n, tuple(map(tuple, rows)))


def _random_colored(n: int, pairs, palette: int, rng: random.Random) -> ColoredGraph:
    rows = [[ABSENT] * n for _ in range(n)]
    for u, v in pairs:
        rows[u][v] = rows[v][u] = rng.randrange(palette)
    return ColoredGraph(n, tuple(map(tuple, rows)))


def random_coloring(underlying: ColoredGraph, palette: int, seed: int) -> ColoredGraph:
    """Color each edge of ``underlying`` uniformly from ``range(palette)``."""
    if palette < 1:
        raise GraphError("palette must be at least 1")
    pairs = [(u, v) for u, v, _ in underlying.edges]
    return _random_colored(underlying.n, pairs, palette, random.Random(seed))


# -- small constructors used across the package ----------------------------


def complete_graph(n: int, color: int = 0) -> ColoredGraph:
    return build_graph(n, [(u, v, color) for u, v in itertools.combinations(range(n), 2)])


def rainbow_complete(n: int) -> ColoredGraph:
    return build_graph(n, [(u, v, i) for i, (u, v) in enumerate(itertools.combinations(range(n), 2))])


def random_graph(n: int, p: float, rng: random.Random) -> ColoredGraph:
    return _uncolored(n, [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p])
