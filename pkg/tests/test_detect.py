import itertools
import random

import pytest
from hypothesis import given, settings

import oracles
from strategies import colored_graphs
from rainbowlab.core import build_graph, complete_graph, rainbow_complete
from rainbowlab.detect import (
    ANY,
    AtMost,
    Exact,
    LengthSpec,
    count_rainbow_cycles,
    count_rainbow_triangles,
    count_triangles,
    find_disjoint_rainbow_cycles,
    find_rainbow_cycle,
    find_shortest_rainbow_cycle,
    has_rainbow_triangle,
    is_gallai,
    is_rainbow_cycle,
    iter_rainbow_cycles,
    make_witness,
    validate_witness,
)
from rainbowlab.families import gen_from_tree, gen_rainbow_bipartite, random_tree

RAINBOW_K3 = build_graph(3, [(0, 1, 0), (1, 2, 1), (0, 2, 2)])


def raw(G):
    return [list(r) for r in G.matrix]


def test_length_spec():
    assert str(Exact(4)) == "exact(4)" and str(AtMost(5)) == "at_most(5)" and str(ANY) == "any"
    assert AtMost(4).allows(3) and not Exact(4).allows(3)
    with pytest.raises(ValueError):
        LengthSpec(2, 3)
    with pytest.raises(ValueError):
        LengthSpec(5, 4)


def test_find_rainbow_triangle():
    w = find_rainbow_cycle(RAINBOW_K3, Exact(3))
    assert w.vertices == (0, 1, 2) and w.colors == (0, 1, 2)
    assert validate_witness(RAINBOW_K3, w)


@pytest.mark.parametrize("seed", range(10))
def test_family_zero_has_no_rainbow_triangle(seed):
    G = gen_from_tree(random_tree(8, 0, seed))
    assert find_rainbow_cycle(G, Exact(3)) is None
    assert is_gallai(G)


def test_bipartite_rainbow_cycles():
    K33 = gen_rainbow_bipartite(3, 3)
    assert find_rainbow_cycle(K33, Exact(3)) is None
    w = find_rainbow_cycle(K33, Exact(4))
    assert w is not None and len(w) == 4 and validate_witness(K33, w)
    # brute force agrees on the number of rainbow 4-cycles: 9 choices of two
    # vertices per side, each carrying exactly one 4-cycle
    assert count_rainbow_cycles(K33, Exact(4)) == oracles.count_rainbow_cycles(raw(K33), 6, [4]) == 9


def test_witness_canonical_form():
    G = rainbow_complete(5)
    w = make_witness(G, [3, 1, 4, 0])
    assert w.vertices == (0, 3, 1, 4)
    w2 = make_witness(G, [4, 1, 3, 0])
    assert w2.vertices == (0, 3, 1, 4)
    assert w.to_dict() == {"vertices": [0, 3, 1, 4], "colors": list(w.colors)}


def test_is_rainbow_cycle_rejects_bad_input():
    G = complete_graph(4)
    assert not is_rainbow_cycle(G, [0, 1, 2])
    assert not is_rainbow_cycle(RAINBOW_K3, [0, 1])
    assert not is_rainbow_cycle(RAINBOW_K3, [0, 1, 1])
    assert not is_rainbow_cycle(RAINBOW_K3, [0, 1, 7])


def test_triangle_count_examples():
    assert count_rainbow_triangles(rainbow_complete(4)) == 4
    assert count_rainbow_triangles(complete_graph(5)) == 0
    assert count_triangles(complete_graph(4)) == 4
    assert count_triangles(gen_rainbow_bipartite(3, 3)) == 0
    K5e = build_graph(5, [(u, v, 0) for u, v in itertools.combinations(range(5), 2) if (u, v) != (0, 1)])
    assert count_triangles(K5e) == len(oracles.triangles(raw(K5e), 5)) == 7


@pytest.mark.parametrize("k", [0, 1, 2, 3])
@pytest.mark.parametrize("seed", range(5))
def test_family_k_rainbow_triangles(k, seed):
    n = 9
    G = gen_from_tree(random_tree(n, k, seed))
    assert count_rainbow_triangles(G) == oracles.rainbow_triangles(raw(G), n) == k


@given(colored_graphs())
def test_counts_match_brute_force(G):
    m = raw(G)
    assert count_triangles(G) == len(oracles.triangles(m, G.n))
    assert count_rainbow_triangles(G) == oracles.rainbow_triangles(m, G.n)
    assert (find_rainbow_cycle(G, Exact(3)) is None) == (count_rainbow_triangles(G) == 0)
    assert has_rainbow_triangle(G) == (count_rainbow_triangles(G) > 0)


@settings(max_examples=150)
@given(colored_graphs(max_n=6))
def test_cycle_enumeration_matches_brute_force(G):
    m = raw(G)
    for lo, hi in [(3, 3), (4, 4), (3, 5), (3, 6)]:
        spec = LengthSpec(lo, hi)
        assert count_rainbow_cycles(G, spec) == oracles.count_rainbow_cycles(m, G.n, range(lo, hi + 1))
    for w in iter_rainbow_cycles(G):
        assert validate_witness(G, w)


@given(colored_graphs(max_n=7))
def test_adding_fresh_colored_edge_never_loses_rainbow_triangles(G):
    missing = [(u, v) for u, v in itertools.combinations(range(G.n), 2) if not G.has_edge(u, v)]
    if not missing:
        return
    u, v = missing[0]
    fresh = max(G.palette, default=-1) + 1
    H = build_graph(G.n, list(G.edges) + [(u, v, fresh)])
    assert count_rainbow_triangles(H) >= count_rainbow_triangles(G)


def test_within_restricts_search():
    G = rainbow_complete(6)
    w = find_rainbow_cycle(G, Exact(4), within=[2, 3, 4, 5])
    assert set(w.vertices) == {2, 3, 4, 5}
    assert find_rainbow_cycle(G, Exact(4), within=[0, 1, 2]) is None
    assert len(find_shortest_rainbow_cycle(G, 5)) == 3
    assert find_shortest_rainbow_cycle(complete_graph(6), 5) is None


def test_is_gallai_examples():
    assert is_gallai(complete_graph(5))
    assert not is_gallai(RAINBOW_K3)
    assert not is_gallai(build_graph(3, [(0, 1, 0)]))


# -- disjoint packing ----------------------------------------------------------------


def test_packing_two_triangle_blocks():
    edges = [(0, 1, 0), (1, 2, 1), (0, 2, 2), (3, 4, 3), (4, 5, 4), (3, 5, 5), (2, 3, 9)]
    G = build_graph(6, edges)
    res = find_disjoint_rainbow_cycles(G, 2, Exact(3))
    assert res.status == "found"
    assert sorted(w.vertices for w in res.cycles) == [(0, 1, 2), (3, 4, 5)]


def test_packing_too_few_vertices():
    res = find_disjoint_rainbow_cycles(RAINBOW_K3, 2)
    assert res.cycles is None and res.exact and res.status == "none"


def test_packing_rainbow_k8_two_c4():
    G = rainbow_complete(8)
    res = find_disjoint_rainbow_cycles(G, 2, Exact(4))
    assert res.status == "found"
    a, b = res.cycles
    assert len(a) == len(b) == 4 and not set(a.vertices) & set(b.vertices)
    assert validate_witness(G, a) and validate_witness(G, b)


def test_packing_rejects_bad_k():
    with pytest.raises(ValueError):
        find_disjoint_rainbow_cycles(RAINBOW_K3, 0)


def test_packing_budget_marks_inexact():
    G = complete_graph(14)
    res = find_disjoint_rainbow_cycles(G, 1, budget=50)
    assert res.status == "unknown" and not res.exact


@pytest.mark.parametrize("seed", range(60))
def test_packing_matches_brute_force(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 8)
    pairs = [p for p in itertools.combinations(range(n), 2) if rng.random() < rng.uniform(0.4, 1.0)]
    palette = rng.randint(2, max(2, len(pairs)))
    G = build_graph(n, [(u, v, rng.randrange(palette)) for u, v in pairs])
    for lengths, spec in [(range(3, n + 1), ANY), ([4], Exact(4)), ([3], Exact(3))]:
        best = oracles.max_disjoint(oracles.rainbow_cycle_sets(raw(G), n, lengths))
        for k in (1, 2, 3):
            res = find_disjoint_rainbow_cycles(G, k, spec)
            assert res.exact
            assert (res.cycles is not None) == (best >= k)
            if res.cycles is not None:
                used = set()
                for w in res.cycles:
                    assert validate_witness(G, w) and spec.allows(len(w))
                    assert not used & set(w.vertices)
                    used |= set(w.vertices)
