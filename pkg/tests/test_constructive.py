import itertools
import random

import pytest
from hypothesis import given, settings

import oracles
from strategies import colored_graphs
from rainbowlab.core import GraphError, build_graph, complete_graph, rainbow_complete
from rainbowlab.constructive import (
    BipartitionState,
    LiftError,
    ShortRainbowCycleFound,
    build_cycle_digraph,
    build_reduction,
    digraph_from_arcs,
    find_disjoint_rainbow_cycles_heuristic,
    lift_cycles,
    pack_directed_cycles,
    spanning_bipartite,
)
from rainbowlab.detect import find_shortest_rainbow_cycle, validate_witness
from rainbowlab.families import gen_rainbow_bipartite


def cdeg(G, v):
    return G.cn_bits[v].bit_count()


def holds_everywhere(state):
    G = state.graph
    return all(2 * state.dc_H(v) + 3 * state.d_H(v) >= cdeg(G, v) + len(G.neighbors[v]) for v in range(G.n))


# -- spanning bipartite subgraph ------------------------------------------------------


def test_bipartite_graph_with_own_seed_needs_no_moves():
    G = gen_rainbow_bipartite(3, 4)
    state = spanning_bipartite(G, seed=[0, 0, 0, 1, 1, 1, 1])
    assert state.moves == []
    for v in range(G.n):
        assert state.d_H(v) == len(G.neighbors[v])
        assert state.dc_H(v) == cdeg(G, v)
    assert holds_everywhere(state)


def test_monochromatic_triangle_cut():
    G = complete_graph(3)
    state = spanning_bipartite(G)
    assert 0 < len(state.X) < 3
    assert holds_everywhere(state)
    # every nontrivial cut of a monochromatic triangle satisfies the inequality
    for lone in range(3):
        side = [1 if v == lone else 0 for v in range(3)]
        assert holds_everywhere(BipartitionState(G, side))


def test_edgeless_graph():
    state = spanning_bipartite(build_graph(5, []))
    assert state.moves == [] and state.f == 0 and holds_everywhere(state)


def test_bad_seed_rejected():
    with pytest.raises(GraphError):
        spanning_bipartite(complete_graph(3), seed=[0, 2, 1])


@settings(max_examples=200)
@given(colored_graphs(max_n=12))
def test_spanning_bipartite_postconditions(G):
    state = spanning_bipartite(G)
    assert holds_everywhere(state)
    assert all(state.slack(v) >= 0 for v in range(G.n))
    assert all(mv.f_after > mv.f_before for mv in state.moves)
    assert len(state.moves) <= G.e + sum(cdeg(G, v) for v in range(G.n))
    assert state.f == state.recompute_f()


# -- anchor-edge reduction -------------------------------------------------------------


def brute_max_selection(G, u, v):
    """Largest s1 + s2 over disjoint anchor sets with distinct anchor colors."""
    m = G.matrix
    others = [w for w in range(G.n) if w not in (u, v)]
    best = 0
    for choice in itertools.product((0, 1, 2), repeat=len(others)):
        anchors = []
        ok = True
        for w, ch in zip(others, choice):
            if ch == 0:
                continue
            c = m[u][w] if ch == 1 else m[v][w]
            if c == -1:
                ok = False
                break
            anchors.append(c)
        if ok and len(set(anchors)) == len(anchors) and m[u][v] not in anchors:
            best = max(best, len(anchors))
    return best


def test_reduction_rainbow_k5():
    ctx = build_reduction(rainbow_complete(5), 0, 1)
    assert ctx.validate()
    # S1 and S2 are disjoint, so the three other vertices bound s1 + s2
    assert len(ctx.s1) + len(ctx.s2) == brute_max_selection(rainbow_complete(5), 0, 1) == 3


def test_reduction_monochromatic_k4():
    ctx = build_reduction(complete_graph(4), 0, 1)
    assert ctx.s1 == () and ctx.s2 == ()


def test_reduction_rainbow_star():
    star = build_graph(5, [(0, w, w) for w in range(1, 5)])
    ctx = build_reduction(star, 0, 1)
    assert ctx.s2 == () and ctx.s1 == (2, 3, 4)


def test_reduction_requires_an_edge():
    with pytest.raises(GraphError):
        build_reduction(build_graph(3, [(0, 1, 0)]), 0, 2)


@pytest.mark.parametrize("seed", range(40))
def test_reduction_is_valid_and_maximal(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 8)
    pairs = [p for p in itertools.combinations(range(n), 2) if rng.random() < 0.7] or [(0, 1)]
    G = build_graph(n, [(a, b, rng.randrange(rng.randint(1, 6))) for a, b in pairs])
    u, v = rng.choice(pairs)
    ctx = build_reduction(G, u, v)
    assert ctx.validate()
    used = {ctx.anchor(x) for x in ctx.s1 + ctx.s2} | {ctx.uv_color}
    for w in range(n):
        if w in (u, v) or w in ctx.s1 + ctx.s2:
            continue
        for hub in (u, v):
            assert not G.has_edge(hub, w) or G.matrix[hub][w] in used
    assert len(ctx.s1) + len(ctx.s2) <= brute_max_selection(G, u, v)


# -- cycle digraph -----------------------------------------------------------------------


def test_arc_points_at_repeated_anchor():
    G = build_graph(4, [(0, 1, 0), (0, 2, 1), (0, 3, 2), (2, 3, 2)])
    D = build_cycle_digraph(build_reduction(G, 0, 1))
    assert D.arcs == frozenset({(2, 3)})
    assert D.side == {2: 1, 3: 1}


def test_cross_edge_with_anchor_color_gets_no_arc():
    G = build_graph(4, [(0, 1, 0), (0, 2, 1), (1, 3, 2), (2, 3, 0)])
    ctx = build_reduction(G, 0, 1)
    assert ctx.s1 == (2,) and ctx.s2 == (3,)
    D = build_cycle_digraph(ctx)
    assert D.arcs == frozenset()


def test_short_rainbow_triangle_escape():
    G = build_graph(4, [(0, 1, 0), (0, 2, 1), (0, 3, 2), (2, 3, 9)])
    res = build_cycle_digraph(build_reduction(G, 0, 1))
    assert isinstance(res, ShortRainbowCycleFound)
    assert res.witness.vertices == (0, 2, 3) and res.witness.colors == (1, 9, 2)
    assert validate_witness(G, res.witness)


def test_short_rainbow_four_cycle_escape():
    G = build_graph(4, [(0, 1, 0), (0, 2, 1), (1, 3, 2), (2, 3, 7)])
    res = build_cycle_digraph(build_reduction(G, 0, 1))
    assert isinstance(res, ShortRainbowCycleFound)
    assert len(res.witness) == 4 and validate_witness(G, res.witness)


# -- directed packing ----------------------------------------------------------------------


def test_pack_examples():
    tri = digraph_from_arcs([0, 1, 2], [(0, 1), (1, 2), (2, 0)])
    assert pack_directed_cycles(tri, 1).cycles == [[0, 1, 2]]
    dag = digraph_from_arcs([0, 1, 2, 3], [(0, 1), (1, 2), (0, 3), (3, 2)])
    res = pack_directed_cycles(dag, 1)
    assert res.cycles is None and res.exact
    two = digraph_from_arcs(range(6), [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    assert sorted(map(sorted, pack_directed_cycles(two, 2).cycles)) == [[0, 1, 2], [3, 4, 5]]


def test_digraph_validation():
    with pytest.raises(GraphError):
        digraph_from_arcs([0, 1], [(0, 0)])
    with pytest.raises(GraphError):
        digraph_from_arcs([0, 1], [(0, 5)])
    with pytest.raises(ValueError):
        pack_directed_cycles(digraph_from_arcs([0], []), 0)


@pytest.mark.parametrize("seed", range(80))
def test_pack_matches_brute_force(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 8)
    p = rng.uniform(0.1, 0.5)
    arcs = [(a, b) for a in range(n) for b in range(n) if a != b and rng.random() < p]
    D = digraph_from_arcs(range(n), arcs)
    best = oracles.max_disjoint(oracles.directed_cycle_sets(range(n), arcs))
    arcset = set(arcs)
    for k in range(1, 4):
        res = pack_directed_cycles(D, k)
        assert res.exact
        assert (res.cycles is not None) == (best >= k)
        if res.cycles:
            seen = set()
            for cyc in res.cycles:
                assert all((cyc[i], cyc[(i + 1) % len(cyc)]) in arcset for i in range(len(cyc)))
                assert not seen & set(cyc)
                seen |= set(cyc)


def test_pack_large_digraph_uses_greedy_pass():
    n = 30
    arcs = [(i, (i + 1) % 3 + 3 * (i // 3)) for i in range(n)]
    D = digraph_from_arcs(range(n), arcs)
    res = pack_directed_cycles(D, 10)
    assert res.status == "found" and len(res.cycles) == 10


# -- lifting ----------------------------------------------------------------------------------


def s1_triangle_instance():
    # u=0, v=1, x1..x3 = 2..4 with anchors 10..12; x1->x2->x3->x1
    edges = [(0, 1, 0), (0, 2, 10), (0, 3, 11), (0, 4, 12), (2, 3, 11), (3, 4, 12), (2, 4, 10)]
    return build_graph(5, edges)


def test_lift_directed_triangle():
    G = s1_triangle_instance()
    ctx = build_reduction(G, 0, 1)
    D = build_cycle_digraph(ctx)
    assert D.arcs == frozenset({(2, 3), (3, 4), (4, 2)})
    cycles = pack_directed_cycles(D, 1).cycles
    (w,) = lift_cycles(ctx, cycles)
    assert w.vertices == (2, 3, 4) and sorted(w.colors) == [10, 11, 12]
    assert validate_witness(G, w)


def test_lift_empty():
    ctx = build_reduction(s1_triangle_instance(), 0, 1)
    assert lift_cycles(ctx, []) == []


def test_lift_mixed_four_cycle():
    # x1=2, x2=3 in S1 (anchors 10, 11); y1=4, y2=5 in S2 (anchors 20, 21)
    edges = [(0, 1, 0), (0, 2, 10), (0, 3, 11), (1, 4, 20), (1, 5, 21)]
    edges += [(2, 4, 20), (3, 4, 11), (3, 5, 21), (2, 5, 10)]
    G = build_graph(6, edges)
    ctx = build_reduction(G, 0, 1)
    assert ctx.s1 == (2, 3) and ctx.s2 == (4, 5)
    D = build_cycle_digraph(ctx)
    cycles = pack_directed_cycles(D, 1).cycles
    (w,) = lift_cycles(ctx, cycles)
    assert len(w) == 4 and validate_witness(G, w)


def test_lift_rejects_non_rainbow_cycle():
    ctx = build_reduction(complete_graph(5), 0, 1)
    with pytest.raises(LiftError):
        lift_cycles(ctx, [[2, 3, 4]])


# -- heuristic finder ------------------------------------------------------------------------


def assert_disjoint_rainbow(G, cycles, k):
    assert len(cycles) == k
    seen = set()
    for w in cycles:
        assert validate_witness(G, w)
        assert not seen & set(w.vertices)
        seen |= set(w.vertices)


def test_heuristic_rainbow_k9():
    G = rainbow_complete(9)
    res = find_disjoint_rainbow_cycles_heuristic(G, 3)
    assert_disjoint_rainbow(G, res.cycles, 3)
    assert all(len(w) == 3 for w in res.cycles)


def test_heuristic_monochromatic():
    res = find_disjoint_rainbow_cycles_heuristic(complete_graph(12), 1)
    assert res.cycles is None
    assert res.to_dict()["found"] is False


def test_heuristic_two_components_greedy():
    G = build_graph(6, [(0, 1, 0), (1, 2, 1), (0, 2, 2), (3, 4, 3), (4, 5, 4), (3, 5, 5)])
    res = find_disjoint_rainbow_cycles_heuristic(G, 2)
    assert res.stage == "greedy"
    assert_disjoint_rainbow(G, res.cycles, 2)


def test_heuristic_reduction_stage_finds_long_cycle():
    xs, ys = [2, 3, 4], [5, 6, 7]
    edges = [(0, 1, 0)] + [(0, x, 10 + i) for i, x in enumerate(xs)] + [(1, y, 20 + i) for i, y in enumerate(ys)]
    edges += [(2, 5, 20), (3, 5, 11), (3, 6, 21), (4, 6, 12), (4, 7, 22), (2, 7, 10)]
    G = build_graph(8, edges)
    assert find_shortest_rainbow_cycle(G, 5) is None
    res = find_disjoint_rainbow_cycles_heuristic(G, 1)
    assert res.stage == "reduction"
    assert_disjoint_rainbow(G, res.cycles, 1)
    assert len(res.cycles[0]) == 6


def test_heuristic_threshold_and_constant():
    G = rainbow_complete(10)
    res = find_disjoint_rainbow_cycles_heuristic(G, 1, constant=18)
    assert res.threshold_doubled == 10 + 2 * 18 + 2
    assert not res.hypothesis_met
    with pytest.raises(ValueError):
        find_disjoint_rainbow_cycles_heuristic(G, 0)


@settings(max_examples=100)
@given(colored_graphs(max_n=9))
def test_heuristic_outputs_revalidate(G):
    for k in (1, 2):
        res = find_disjoint_rainbow_cycles_heuristic(G, k)
        if res.cycles is not None:
            assert_disjoint_rainbow(G, res.cycles, k)
