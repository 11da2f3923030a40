"""Extremal families built from monochromatic joins, and their recognizers.

A composition tree has two leaf kinds, a single vertex and a rainbow
triangle, and one internal kind, the join of two subtrees whose cross edges
all get one fresh color.  Trees with no triangle leaf generate the family of
extremal graphs with no rainbow triangle; trees with ``k`` triangle leaves
generate complete colorings with exactly ``k`` rainbow triangles and
``c(G) = n + k - 1``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterator

from .core import ABSENT, ColoredGraph, GraphError, build_graph
from .detect import count_rainbow_triangles, has_rainbow_triangle, is_gallai

#: Largest order accepted by :func:`gallai_decompose`.
MAX_GALLAI_N = 12


@dataclass(frozen=True)
class LeafK1:
    vertex: int | None = None


@dataclass(frozen=True)
class LeafRainbowTriangle:
    colors: tuple[int, int, int]
    vertices: tuple[int, int, int] | None = None


@dataclass(frozen=True)
class Join:
    left: "CompositionTree"
    right: "CompositionTree"
    color: int


CompositionTree = LeafK1 | LeafRainbowTriangle | Join


def tree_order(tree: CompositionTree) -> int:
    if isinstance(tree, LeafK1):
        return 1
    if isinstance(tree, LeafRainbowTriangle):
        return 3
    return tree_order(tree.left) + tree_order(tree.right)


def triangle_leaves(tree: CompositionTree) -> int:
    if isinstance(tree, LeafK1):
        return 0
    if isinstance(tree, LeafRainbowTriangle):
        return 1
    return triangle_leaves(tree.left) + triangle_leaves(tree.right)


def leaf_vertices(tree: CompositionTree) -> list[int | None]:
    """Vertex labels in leaf order (``None`` for unlabeled leaves)."""
    if isinstance(tree, LeafK1):
        return [tree.vertex]
    if isinstance(tree, LeafRainbowTriangle):
        return list(tree.vertices) if tree.vertices is not None else [None, None, None]
    return leaf_vertices(tree.left) + leaf_vertices(tree.right)


def tree_colors(tree: CompositionTree) -> list[int]:
    if isinstance(tree, LeafK1):
        return []
    if isinstance(tree, LeafRainbowTriangle):
        return list(tree.colors)
    return [tree.color] + tree_colors(tree.left) + tree_colors(tree.right)


def gen_from_tree(tree: CompositionTree) -> ColoredGraph:
    """The complete colored graph described by ``tree``.

    When every leaf carries a vertex label and the labels are exactly
    ``0..n-1`` they are used as vertex ids; otherwise vertices are numbered in
    leaf order.
    """
    colors = tree_colors(tree)
    if len(set(colors)) != len(colors):
        raise GraphError("malformed tree: a color is reused across the tree")
    if any(c < 0 for c in colors):
        raise GraphError("malformed tree: negative color")
    n = tree_order(tree)
    labels = leaf_vertices(tree)
    if None in labels or sorted(labels) != list(range(n)):
        labels = list(range(n))
    edges: list[tuple[int, int, int]] = []
    pos = 0

    def walk(t: CompositionTree) -> list[int]:
        nonlocal pos
        if isinstance(t, LeafK1):
            pos += 1
            return [labels[pos - 1]]
        if isinstance(t, LeafRainbowTriangle):
            a, b, c = labels[pos : pos + 3]
            pos += 3
            ab, bc, ca = t.colors
            edges.extend([(a, b, ab), (b, c, bc), (a, c, ca)])
            return [a, b, c]
        left = walk(t.left)
        right = walk(t.right)
        edges.extend((x, y, t.color) for x in left for y in right)
        return left + right

    walk(tree)
    return build_graph(n, edges)


def _check_family_size(n: int, k: int) -> None:
    if k < 0 or n < 1 or n < 3 * k:
        raise GraphError(f"no composition tree with n={n} vertices and k={k} triangles (need n >= max(1, 3k))")


def random_tree(n: int, k: int, seed: int) -> CompositionTree:
    """A random tree with ``n`` vertices and ``k`` triangle leaves.

    Each join splits ``(n, k)`` uniformly among the feasible ``(n1, k1)``
    pairs; cut and triangle colors come from one global counter.
    """
    _check_family_size(n, k)
    rng = random.Random(seed)
    counter = itertools.count()

    def build(n: int, k: int) -> CompositionTree:
        if n == 1 and k == 0:
            return LeafK1()
        if n == 3 and k == 1:
            return LeafRainbowTriangle((next(counter), next(counter), next(counter)))
        splits = [
            (n1, k1)
            for n1 in range(1, n)
            for k1 in range(k + 1)
            if n1 >= max(1, 3 * k1) and n - n1 >= max(1, 3 * (k - k1))
        ]
        n1, k1 = rng.choice(splits)
        color = next(counter)
        return Join(build(n1, k1), build(n - n1, k - k1), color)

    return build(n, k)


def all_trees(n: int, k: int) -> Iterator[CompositionTree]:
    """One tree per isomorphism class of generated graph (unordered tree shapes)."""
    _check_family_size(n, k)
    counter = itertools.count()

    def shapes(n: int, k: int) -> list[tuple]:
        if n == 1 and k == 0:
            return [("k1",)]
        out = [("tri",)] if (n == 3 and k == 1) else []
        seen = set()
        for n1 in range(1, n):
            for k1 in range(k + 1):
                n2, k2 = n - n1, k - k1
                if n1 < max(1, 3 * k1) or n2 < max(1, 3 * k2) or (n1, k1) > (n2, k2):
                    continue
                for a in shapes(n1, k1):
                    for b in shapes(n2, k2):
                        key = tuple(sorted((a, b)))
                        if key not in seen:
                            seen.add(key)
                            out.append(("join",) + key)
        return out

    def realize(shape: tuple) -> CompositionTree:
        if shape[0] == "k1":
            return LeafK1()
        if shape[0] == "tri":
            return LeafRainbowTriangle((next(counter), next(counter), next(counter)))
        color = next(counter)
        return Join(realize(shape[1]), realize(shape[2]), color)

    for shape in shapes(n, k):
        yield realize(shape)


# -- recognition -----------------------------------------------------------


def _spanning_biclique(G: ColoredGraph, color: int) -> tuple[list[int], list[int]] | None:
    """Sides ``(V1, V2)`` if the edges of ``color`` are exactly all ``V1``-``V2`` pairs."""
    es = G.color_classes.get(color, ())
    n = G.n
    side = [-1] * n
    adj: dict[int, list[int]] = {}
    for u, v in es:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    if len(adj) != n:
        return None
    side[0] = 0
    stack = [0]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if side[y] == -1:
                side[y] = 1 - side[x]
                stack.append(y)
            elif side[y] == side[x]:
                return None
    if -1 in side:
        return None
    left = [v for v in range(n) if side[v] == 0]
    right = [v for v in range(n) if side[v] == 1]
    if len(es) != len(left) * len(right):
        return None
    return left, right


def _induced(G: ColoredGraph, vs: list[int]) -> ColoredGraph:
    m = G.matrix
    return ColoredGraph(len(vs), tuple(tuple(m[a][b] for b in vs) for a in vs))


def _relabel_tree(tree: CompositionTree, vs: list[int]) -> CompositionTree:
    if isinstance(tree, LeafK1):
        return LeafK1(vs[tree.vertex])
    if isinstance(tree, LeafRainbowTriangle):
        return LeafRainbowTriangle(tree.colors, tuple(vs[x] for x in tree.vertices))
    return Join(_relabel_tree(tree.left, vs), _relabel_tree(tree.right, vs), tree.color)


def membership_g0(G: ColoredGraph) -> CompositionTree | None:
    """Witness tree (leaves labeled by vertex) if ``G`` is in the triangle-free family.

    Requires a complete graph with ``n - 1`` colors and then looks for a color
    whose class is a spanning complete bipartite graph, recursing on both
    sides.
    """
    n = G.n
    if n == 1:
        return LeafK1(0)
    if n == 0 or not G.is_complete() or G.c != n - 1:
        return None
    for color in sorted(G.palette):
        sides = _spanning_biclique(G, color)
        if sides is None:
            continue
        left, right = sides
        t1 = membership_g0(_induced(G, left))
        if t1 is None:
            continue
        t2 = membership_g0(_induced(G, right))
        if t2 is None:
            continue
        return Join(_relabel_tree(t1, left), _relabel_tree(t2, right), color)
    return None


def membership_g1(G: ColoredGraph) -> CompositionTree | None:
    """Witness tree if ``G`` is in the family with exactly one rainbow triangle."""
    n = G.n
    if n == 3 and G.is_complete() and G.c == 3:
        m = G.matrix
        return LeafRainbowTriangle((m[0][1], m[1][2], m[0][2]), (0, 1, 2))
    if n < 4 or not G.is_complete() or G.c != n:
        return None
    if count_rainbow_triangles(G) != 1:
        return None
    for color in sorted(G.palette):
        sides = _spanning_biclique(G, color)
        if sides is None:
            continue
        for tri_side, other in (sides, sides[::-1]):
            H1, H0 = _induced(G, tri_side), _induced(G, other)
            if len(tri_side) < 3 or has_rainbow_triangle(H0):
                continue
            t1 = membership_g1(H1)
            if t1 is None:
                continue
            t0 = membership_g0(H0)
            if t0 is None:
                continue
            return Join(_relabel_tree(t1, tri_side), _relabel_tree(t0, other), color)
    return None


def gen_rainbow_bipartite(a: int, b: int) -> ColoredGraph:
    """Rainbow complete bipartite graph with sides ``0..a-1`` and ``a..a+b-1``."""
    if a < 1 or b < 1:
        raise GraphError("both sides need at least one vertex")
    return build_graph(a + b, [(x, a + y, x * b + y) for x in range(a) for y in range(b)])


def bipartition_sides(G: ColoredGraph) -> tuple[list[int], list[int]] | None:
    """Sides if the underlying graph is complete bipartite with both sides non-empty."""
    n = G.n
    if n < 2:
        return None
    side = [-1] * n
    for start in range(n):
        if side[start] != -1:
            continue
        if start != 0:
            return None  # disconnected
        side[start] = 0
        stack = [start]
        while stack:
            x = stack.pop()
            for y in G.neighbors[x]:
                if side[y] == -1:
                    side[y] = 1 - side[x]
                    stack.append(y)
                elif side[y] == side[x]:
                    return None
    left = [v for v in range(n) if side[v] == 0]
    right = [v for v in range(n) if side[v] == 1]
    if not right or G.e != len(left) * len(right):
        return None
    return left, right


def is_rainbow_balanced_biclique(G: ColoredGraph) -> bool:
    """Rainbow ``K_{ceil(n/2), floor(n/2)}``."""
    sides = bipartition_sides(G)
    if sides is None:
        return False
    return sorted(map(len, sides)) == [G.n // 2, G.n - G.n // 2] and G.is_rainbow()


# -- Gallai decomposition --------------------------------------------------


@dataclass(frozen=True)
class GallaiDecomposition:
    parts: tuple[tuple[int, ...], ...]
    cross_colors: dict  # (i, j) with i < j -> color

    @property
    def reduced_colors(self) -> frozenset[int]:
        return frozenset(self.cross_colors.values())

    def to_dict(self) -> dict:
        return {
            "parts": [list(p) for p in self.parts],
            "cross_colors": [[i, j, c] for (i, j), c in sorted(self.cross_colors.items())],
        }


def _rgs_with_blocks(length: int, blocks: int) -> Iterator[tuple[int, ...]]:
    """Restricted-growth strings with exactly ``blocks`` distinct values, lexicographic."""
    a = [0] * length

    def rec(i: int, top: int) -> Iterator[tuple[int, ...]]:
        if i == length:
            if top + 1 == blocks:
                yield tuple(a)
            return
        for x in range(min(top + 1, blocks - 1) + 1):
            new_top = max(top, x)
            if blocks - 1 - new_top > length - 1 - i:
                continue
            a[i] = x
            yield from rec(i + 1, new_top)

    yield from rec(1, 0)


def _decomposition_for(G: ColoredGraph, rgs: tuple[int, ...], blocks: int) -> GallaiDecomposition | None:
    m = G.matrix
    cross: dict[tuple[int, int], int] = {}
    for u in range(G.n):
        for v in range(u + 1, G.n):
            i, j = rgs[u], rgs[v]
            if i == j:
                continue
            key = (i, j) if i < j else (j, i)
            c = m[u][v]
            prev = cross.setdefault(key, c)
            if prev != c:
                return None
    if len(set(cross.values())) > 2:
        return None
    parts = tuple(tuple(v for v in range(G.n) if rgs[v] == b) for b in range(blocks))
    return GallaiDecomposition(parts, cross)


def validate_decomposition(G: ColoredGraph, d: GallaiDecomposition) -> bool:
    """Independent re-check: partition of V, monochromatic cross pairs, <= 2 reduced colors."""
    parts = [set(p) for p in d.parts]
    if len(parts) < 2 or any(not p for p in parts):
        return False
    if sorted(v for p in parts for v in p) != list(range(G.n)):
        return False
    colors = set()
    for i, j in itertools.combinations(range(len(parts)), 2):
        seen = {G.matrix[a][b] for a in parts[i] for b in parts[j]}
        if len(seen) != 1 or ABSENT in seen:
            return False
        colors |= seen
    return len(colors) <= 2


def gallai_decompose(G: ColoredGraph) -> GallaiDecomposition:
    """Decomposition of a Gallai coloring into parts with monochromatic cross pairs.

    Picks the valid partition with the fewest parts, ties broken by the
    lexicographic order of restricted-growth strings.
    """
    if not 2 <= G.n <= MAX_GALLAI_N:
        raise GraphError(f"gallai_decompose supports 2 <= n <= {MAX_GALLAI_N}, got n={G.n}")
    if not is_gallai(G):
        raise GraphError("input is not a Gallai coloring (complete, no rainbow triangle)")
    for blocks in range(2, G.n + 1):
        for rgs in _rgs_with_blocks(G.n, blocks):
            d = _decomposition_for(G, rgs, blocks)
            if d is not None:
                return d
    raise AssertionError("no Gallai decomposition found for a Gallai coloring")


# -- JSON form -------------------------------------------------------------


def tree_to_dict(tree: CompositionTree) -> dict:
    if isinstance(tree, LeafK1):
        return {"kind": "k1", "vertex": tree.vertex}
    if isinstance(tree, LeafRainbowTriangle):
        return {
            "kind": "triangle",
            "colors": list(tree.colors),
            "vertices": None if tree.vertices is None else list(tree.vertices),
        }
    return {"kind": "join", "color": tree.color, "children": [tree_to_dict(tree.left), tree_to_dict(tree.right)]}


def tree_from_dict(data: dict) -> CompositionTree:
    kind = data.get("kind")
    if kind == "k1":
        return LeafK1(data.get("vertex"))
    if kind == "triangle":
        vs = data.get("vertices")
        return LeafRainbowTriangle(tuple(data["colors"]), None if vs is None else tuple(vs))
    if kind == "join":
        left, right = data["children"]
        return Join(tree_from_dict(left), tree_from_dict(right), data["color"])
    raise ValueError(f"unknown tree node kind {kind!r}")
