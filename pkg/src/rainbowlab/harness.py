"""Theorem and lemma checkers.

Each check pairs a hypothesis with a conclusion, both built from the library
operations.  :func:`run_check` evaluates them over every instance of a
small exhaustive domain or over seeded random instances, and records every
instance where the hypothesis holds and the conclusion fails.
"""

from __future__ import annotations

import itertools
import json
import os
import random
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Callable, Iterator

from . import __version__
from .constructive import (
    EXACT_DIGRAPH_MAX,
    build_cycle_digraph,
    build_reduction,
    find_disjoint_rainbow_cycles_heuristic,
    lift_cycles,
    pack_directed_cycles,
    spanning_bipartite,
    ShortRainbowCycleFound,
)
from .core import (
    ABSENT,
    ColoredGraph,
    EnumSpec,
    build_graph,
    enumerate_colorings,
    enumerate_graphs,
    min_cn_union,
    permute,
    saturated_degrees,
)
from .detect import (
    EXACT_PACKING_MAX_N,
    AtMost,
    Exact,
    count_rainbow_cycles,
    count_rainbow_triangles,
    count_triangles,
    find_disjoint_rainbow_cycles,
    find_rainbow_cycle,
    has_rainbow_triangle,
    is_gallai,
)
from .families import (
    bipartition_sides,
    gallai_decompose,
    gen_from_tree,
    gen_rainbow_bipartite,
    is_rainbow_balanced_biclique,
    membership_g0,
    membership_g1,
    random_tree,
    validate_decomposition,
)
from .io import graph_to_obj, parse_graph, serialize_graph

MAX_ALL_GRAPHS_N = 5
MAX_COMPLETE_N = 5
MAX_UNCOLORED_N = 7
SPARSE_RATE = 1e-3
MAX_RECORDED_VIOLATIONS = 25
STRUCTURED_LABEL = "structured sample (not a refutation domain)"

GUARDS = {
    "exhaustive_all_graphs_max_n": MAX_ALL_GRAPHS_N,
    "exhaustive_complete_max_n": MAX_COMPLETE_N,
    "exhaustive_uncolored_max_n": MAX_UNCOLORED_N,
    "exact_packing_max_n": EXACT_PACKING_MAX_N,
    "exact_digraph_max_order": EXACT_DIGRAPH_MAX,
}


class CheckId(str, Enum):
    T1 = "T1"
    T2 = "T2"
    T3 = "T3"
    T4 = "T4"
    T5 = "T5"
    T6 = "T6"
    T7 = "T7"
    T8 = "T8"
    L_SAT = "L_SAT"
    L_GALLAI_COLORS = "L_GALLAI_COLORS"
    L_RADEMACHER = "L_RADEMACHER"
    L_CKRY = "L_CKRY"
    L_DISJ_C4 = "L_DISJ_C4"
    L_FIVE = "L_FIVE"
    L_SPABIP = "L_SPABIP"
    P_DISJ_C4 = "P_DISJ_C4"


class HarnessError(ValueError):
    """Bad configuration: guard exceeded, unknown id, unsupported mode."""


@dataclass(frozen=True)
class Params:
    k: int = 1
    constant: int = 64


@dataclass(frozen=True)
class CheckConfig:
    n_min: int | None = None
    n_max: int | None = None
    mode: str | None = None  # "exhaustive" | "sample"; None picks the check's default
    samples: int = 1000
    seed: int = 0
    k: int = 1
    constant: int = 64
    workers: int | None = None

    @property
    def params(self) -> Params:
        return Params(self.k, self.constant)


Predicate = Callable[[ColoredGraph, Params], bool]
Sampler = Callable[[int, random.Random, Params], ColoredGraph]


@dataclass(frozen=True)
class Check:
    id: str
    hypothesis: Predicate
    conclusion: Callable[[ColoredGraph, Params], bool | None]  # None: undecided
    domain: str | None = None  # exhaustive domain: "all", "complete", "uncolored"
    exhaustive_range: tuple[int, int] | None = None
    sample_range: tuple[int, int] = (6, 9)
    sampler: Sampler | None = None
    default_mode: str = "exhaustive"
    structured: bool = False
    notes: Callable[[ColoredGraph, Params], dict] | None = None
    edge_gate: Callable[[int, int], bool] | None = None  # cheap necessary condition on (n, e)


# -- predicates -------------------------------------------------------------


def _tri(n: int) -> int:
    return n * (n + 1) // 2


def _min_cdeg(G: ColoredGraph) -> int:
    return min((b.bit_count() for b in G.cn_bits), default=0)


def _hyp_t1(G, p):
    return G.n >= 3 and G.e + G.c >= _tri(G.n)


def _hyp_t2(G, p):
    return G.n >= 1 and G.e + G.c >= _tri(G.n) - 1 and not has_rainbow_triangle(G)


def _hyp_t3(G, p):
    return G.n >= 3 and G.e + G.c >= _tri(G.n) and count_rainbow_triangles(G) == 1


def _notes_t3(G, p):
    return {"strict_excess": int(G.e + G.c > _tri(G.n)), "incomplete": int(not G.is_complete())}


def _hyp_t4(G, p):
    n = G.n
    return n >= 5 and all(2 * b.bit_count() >= n for b in G.cn_bits) and not has_rainbow_triangle(G)


def _concl_t4(G, p):
    if G.n % 2:
        return False
    sides = bipartition_sides(G)
    return sides is not None and len(sides[0]) == len(sides[1])


def _ore(G: ColoredGraph, bound: int) -> bool:
    u = min_cn_union(G)
    return u is not None and u >= bound


def _hyp_t5(G, p):
    return G.n >= 4 and _ore(G, G.n - 1)


def _hyp_t6(G, p):
    return G.n >= 105 * p.k - 24 and _ore(G, G.n - 1)


def _concl_c4s(G, p):
    return count_rainbow_cycles(G, Exact(4), limit=p.k) >= p.k


def _hyp_t7(G, p):
    return G.n >= 6 and _ore(G, G.n - 1)


def _concl_t7(G, p):
    return has_rainbow_triangle(G) or is_rainbow_balanced_biclique(G)


def _notes_t7(G, p):
    return {"exception_branch": int(not has_rainbow_triangle(G))}


def _hyp_t8(G, p):
    u = min_cn_union(G)
    # |CN(u) | CN(v)| >= n/2 + constant*k + 1, doubled
    return u is not None and 2 * u >= G.n + 2 * p.constant * p.k + 2


def _concl_t8(G, p):
    res = find_disjoint_rainbow_cycles_heuristic(G, p.k, p.constant)
    if res.cycles is not None:
        return True
    pk = find_disjoint_rainbow_cycles(G, p.k)
    return None if pk.status == "unknown" else pk.cycles is not None


def _concl_sat(G, p):
    s = sum(saturated_degrees(G))
    return s <= 2 * G.c and ((s == 2 * G.c) == G.is_rainbow())


def _hyp_gallai(G, p):
    return G.n >= 1 and is_gallai(G)


def _concl_gallai(G, p):
    if G.c > G.n - 1:
        return False
    return G.n < 2 or validate_decomposition(G, gallai_decompose(G))


def _hyp_rademacher(G, p):
    return G.e >= G.n * G.n // 4 + 1


def _concl_rademacher(G, p):
    return count_triangles(G) >= G.n // 2


def _hyp_ckry(G, p):
    return G.n >= 1 and count_triangles(G) == 0 and 3 * (_min_cdeg(G) - 1) >= G.n


def _concl_c4(G, p):
    return find_rainbow_cycle(G, Exact(4)) is not None


def _hyp_disj(G, p):
    return G.n >= p.k + 3 and count_triangles(G) == 0 and 3 * (_min_cdeg(G) - p.k) >= G.n


def _hyp_five(G, p):
    return G.n >= 5 and _min_cdeg(G) == G.n - 1


def _concl_five(G, p):
    return all(find_rainbow_cycle(G, Exact(4), within=S) is not None for S in itertools.combinations(range(G.n), 5))


def _concl_spabip(G, p):
    state = spanning_bipartite(G)
    bound = G.e + sum(b.bit_count() for b in G.cn_bits)
    return (
        all(state.slack(v) >= 0 for v in range(G.n))
        and all(mv.f_after > mv.f_before for mv in state.moves)
        and len(state.moves) <= bound
        and state.f == state.recompute_f()
    )


def _hyp_prop(G, p):
    return G.n >= 4 * p.k and count_triangles(G) == 0 and 3 * (_min_cdeg(G) - 2 * p.k + 1) >= G.n


def _concl_prop(G, p):
    pk = find_disjoint_rainbow_cycles(G, p.k, Exact(4))
    if pk.status == "unknown":
        return None
    return pk.cycles is not None


def _always(G, p):
    return True


# -- samplers ---------------------------------------------------------------


def _colored(n: int, pairs, palette: int, rng: random.Random) -> ColoredGraph:
    return build_graph(n, [(u, v, rng.randrange(palette)) for u, v in pairs])


def _random_pairs(n: int, p: float, rng: random.Random):
    return [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]


def sample_general(n: int, rng: random.Random, params: Params | None = None) -> ColoredGraph:
    """Random density in [0.15, 1], palette uniform in [1, e]."""
    pairs = _random_pairs(n, rng.uniform(0.15, 1.0), rng)
    return _colored(n, pairs, rng.randint(1, max(1, len(pairs))), rng)


def _shuffle_vertices(G: ColoredGraph, rng: random.Random) -> ColoredGraph:
    perm = list(range(G.n))
    rng.shuffle(perm)
    return permute(G, perm)


def _edit(G: ColoredGraph, rng: random.Random, edits: int) -> ColoredGraph:
    """Recolor (to an existing or fresh color), delete or add a few edges."""
    n = G.n
    rows = [list(r) for r in G.matrix]
    fresh = max(G.palette, default=-1) + 1
    pairs = list(itertools.combinations(range(n), 2))
    for _ in range(edits):
        if not pairs:
            break
        u, v = rng.choice(pairs)
        colors = sorted({c for r in rows for c in r if c != ABSENT})
        r = rng.random()
        if rows[u][v] == ABSENT or r < 0.2:
            c = ABSENT if (rows[u][v] != ABSENT and r < 0.1) else (rng.choice(colors) if colors and r < 0.5 else fresh)
            if c == fresh:
                fresh += 1
        else:
            c = rng.choice(colors) if colors and r < 0.7 else fresh
            if c == fresh:
                fresh += 1
        rows[u][v] = rows[v][u] = c
    return ColoredGraph(n, tuple(map(tuple, rows)))


def sample_near_extremal(n: int, rng: random.Random, params: Params | None = None) -> ColoredGraph:
    """A random family member (0 or 1 triangle leaves), shuffled and usually edited."""
    k = 1 if n >= 3 and rng.random() < 0.5 else 0
    G = _shuffle_vertices(gen_from_tree(random_tree(n, k, rng.randrange(2**32))), rng)
    if rng.random() < 0.8:
        G = _edit(G, rng, rng.randint(1, 2))
    return G


def _random_bipartite(n: int, rng: random.Random, density: tuple[float, float], palette_frac: float) -> ColoredGraph:
    a = rng.randint(max(1, n // 2 - 1), max(1, (n + 1) // 2 + 1)) if n >= 2 else n
    a = min(a, n - 1) if n >= 2 else a
    perm = list(range(n))
    rng.shuffle(perm)
    left, right = perm[:a], perm[a:]
    p = rng.uniform(*density)
    pairs = [(min(x, y), max(x, y)) for x in left for y in right if rng.random() < p]
    lo = max(1, int(len(pairs) * palette_frac))
    return _colored(n, pairs, rng.randint(lo, max(lo, len(pairs))), rng)


def sample_dense_colorful(n: int, rng: random.Random, params: Params | None = None) -> ColoredGraph:
    """Mixture aimed at color-neighborhood hypotheses.

    Dense random graphs with large palettes, balanced rainbow bicliques
    (shuffled, sometimes edited), near-rainbow complete graphs and random
    dense bipartite graphs.
    """
    r = rng.random()
    if r < 0.25:
        pairs = _random_pairs(n, rng.uniform(0.6, 1.0), rng)
        return _colored(n, pairs, rng.randint(max(1, len(pairs) // 2), max(1, len(pairs))), rng)
    if r < 0.5:
        G = _shuffle_vertices(gen_rainbow_bipartite((n + 1) // 2, n // 2), rng)
        if rng.random() < 0.5:
            G = _edit(G, rng, rng.randint(1, 2))
        return G
    if r < 0.75:
        pairs = list(itertools.combinations(range(n), 2))
        return _colored(n, pairs, rng.randint(n - 1, len(pairs)), rng)
    return _random_bipartite(n, rng, (0.7, 1.0), 0.5)


def sample_bipartite(n: int, rng: random.Random, params: Params | None = None) -> ColoredGraph:
    """Dense random bipartite graphs, or a balanced rainbow biclique with a few
    edges deleted or recolored to existing colors."""
    if n < 2 or rng.random() < 0.5:
        return _random_bipartite(n, rng, (0.85, 1.0), 0.5)
    G = gen_rainbow_bipartite((n + 1) // 2, n // 2)
    edges = {(u, v): c for u, v, c in G.edges}
    for _ in range(rng.randint(0, n)):
        keys = sorted(edges)
        if len(keys) < 2:
            break
        a, b = rng.sample(keys, 2)
        if rng.random() < 0.3:
            del edges[a]
        else:
            edges[a] = edges[b]
    return _shuffle_vertices(build_graph(n, [(u, v, c) for (u, v), c in sorted(edges.items())]), rng)


def proper_complete_coloring(n: int, rng: random.Random, fresh_rate: float = 0.2) -> ColoredGraph:
    """Round-robin 1-factorization of ``K_n``, randomly relabeled.

    Vertices and colors are permuted at random; then each edge moves to a
    brand-new color with probability ``fresh_rate`` (the coloring stays proper).
    """
    m = n if n % 2 == 0 else n + 1
    color = {}
    for r in range(m - 1):
        pairs = [(m - 1, r)] + [((r + i) % (m - 1), (r - i) % (m - 1)) for i in range(1, m // 2)]
        for a, b in pairs:
            if a < n and b < n:
                color[(min(a, b), max(a, b))] = r
    perm = list(range(n))
    rng.shuffle(perm)
    palette = list(range(m - 1))
    rng.shuffle(palette)
    fresh = m - 1
    edges = []
    for (a, b), c in sorted(color.items()):
        c = palette[c]
        if rng.random() < fresh_rate:
            c, fresh = fresh, fresh + 1
        edges.append((perm[a], perm[b], c))
    return build_graph(n, edges)


def sample_proper_complete(n: int, rng: random.Random, params: Params | None = None) -> ColoredGraph:
    return proper_complete_coloring(n, rng, rng.choice([0.0, 0.1, 0.3]))


def sample_small_palette_complete(n: int, rng: random.Random, params: Params | None = None) -> ColoredGraph:
    pairs = list(itertools.combinations(range(n), 2))
    return _colored(n, pairs, rng.randint(1, 3), rng)


def sample_rademacher(n: int, rng: random.Random, params: Params | None = None) -> ColoredGraph:
    pairs = _random_pairs(n, rng.uniform(0.45, 0.75), rng)
    return build_graph(n, [(u, v, 0) for u, v in pairs])


def sample_structured(n: int, rng: random.Random, params: Params | None = None) -> ColoredGraph:
    """Rainbow ``K_n``, rainbow balanced biclique, or a perturbed rainbow ``K_n``."""
    r = rng.random()
    if r < 1 / 3:
        G = build_graph(n, [(u, v, i) for i, (u, v) in enumerate(itertools.combinations(range(n), 2))])
        return _shuffle_vertices(G, rng)
    if r < 2 / 3:
        return _shuffle_vertices(gen_rainbow_bipartite((n + 1) // 2, n // 2), rng)
    pairs = list(itertools.combinations(range(n), 2))
    colors = list(range(len(pairs)))
    for _ in range(rng.randint(1, max(1, n // 4))):
        i, j = rng.randrange(len(pairs)), rng.randrange(len(pairs))
        colors[i] = colors[j]
    return _shuffle_vertices(build_graph(n, [(u, v, c) for (u, v), c in zip(pairs, colors)]), rng)


# -- registry ---------------------------------------------------------------

CHECKS: dict[str, Check] = {
    c.id: c
    for c in [
        Check("T1", _hyp_t1, lambda G, p: has_rainbow_triangle(G), "all", (1, 5), (6, 9), sample_near_extremal),
        Check("T2", _hyp_t2, lambda G, p: membership_g0(G) is not None, "all", (1, 5), (6, 9), sample_near_extremal),
        Check(
            "T3",
            _hyp_t3,
            lambda G, p: membership_g1(G) is not None,
            "all",
            (3, 5),
            (6, 9),
            sample_near_extremal,
            notes=_notes_t3,
        ),
        Check("T4", _hyp_t4, _concl_t4, "all", (5, 5), (6, 9), sample_dense_colorful),
        Check(
            "T5",
            _hyp_t5,
            lambda G, p: find_rainbow_cycle(G, AtMost(4)) is not None,
            "all",
            (4, 5),
            (6, 9),
            sample_dense_colorful,
        ),
        Check("T6", _hyp_t6, _concl_c4s, None, None, (81, 81), sample_structured, "sample", structured=True),
        Check(
            "T7",
            _hyp_t7,
            _concl_t7,
            "all",
            (1, 5),
            (6, 9),
            sample_dense_colorful,
            "sample",
            notes=_notes_t7,
        ),
        Check("T8", _hyp_t8, _concl_t8, None, None, (132, 132), sample_structured, "sample", structured=True),
        Check("L_SAT", _always, _concl_sat, "all", (1, 4), (1, 30), sample_general),
        Check(
            "L_GALLAI_COLORS",
            _hyp_gallai,
            _concl_gallai,
            "complete",
            (1, 5),
            (6, 9),
            sample_small_palette_complete,
        ),
        Check(
            "L_RADEMACHER",
            _hyp_rademacher,
            _concl_rademacher,
            "uncolored",
            (1, 7),
            (8, 14),
            sample_rademacher,
            edge_gate=lambda n, e: e >= n * n // 4 + 1,
        ),
        Check("L_CKRY", _hyp_ckry, _concl_c4, "all", (1, 5), (6, 12), sample_bipartite, "sample"),
        Check("L_DISJ_C4", _hyp_disj, _concl_c4s, "all", (1, 5), (6, 12), sample_bipartite, "sample"),
        Check("L_FIVE", _hyp_five, _concl_five, "complete", (5, 5), (5, 9), sample_proper_complete, "sample"),
        Check("L_SPABIP", _always, _concl_spabip, "all", (1, 5), (1, 40), sample_general, "sample"),
        Check("P_DISJ_C4", _hyp_prop, _concl_prop, "all", (1, 5), (4, 12), sample_bipartite, "sample"),
    ]
}


def get_check(check: str | CheckId | Check) -> Check:
    if isinstance(check, Check):
        return check
    key = check.value if isinstance(check, CheckId) else str(check)
    try:
        return CHECKS[key]
    except KeyError:
        raise HarnessError(f"unknown check id {key!r}; known: {', '.join(CHECKS)}") from None


# -- reports ----------------------------------------------------------------


@dataclass
class CheckReport:
    id: str
    config: dict
    label: str
    instances: int = 0
    hypothesis_count: int = 0
    violation_count: int = 0
    inconclusive: int = 0
    violations: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)
    version: str = __version__
    guards: dict = field(default_factory=lambda: dict(GUARDS))
    elapsed_seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.violation_count == 0

    def to_dict(self, timing: bool = True) -> dict:
        d = asdict(self)
        if not timing:
            d.pop("elapsed_seconds")
        return d

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True, indent=2)

    def to_text(self, timing: bool = True) -> str:
        lines = [
            f"check {self.id}: {'PASS' if self.ok else 'FAIL'} [{self.label}]",
            f"  config: {json.dumps(self.config, sort_keys=True)}",
            f"  instances: {self.instances}",
            f"  hypothesis satisfied: {self.hypothesis_count}",
            f"  violations: {self.violation_count}",
            f"  inconclusive: {self.inconclusive}",
        ]
        for k, v in sorted(self.notes.items()):
            lines.append(f"  note {k}: {v}")
        for viol in self.violations:
            lines.append(f"  violation: {viol['reason']}: {json.dumps(viol['graph'], separators=(',', ':'))}")
        lines.append(f"  version: {self.version}")
        if timing:
            lines.append(f"  elapsed: {self.elapsed_seconds:.3f}s")
        return "\n".join(lines) + "\n"


@dataclass
class _Partial:
    instances: int = 0
    hypothesis_count: int = 0
    violation_count: int = 0
    inconclusive: int = 0
    violations: list = field(default_factory=list)
    notes: Counter = field(default_factory=Counter)


def _evaluate(check: Check, G: ColoredGraph, params: Params, out: _Partial) -> None:
    out.instances += 1
    if not check.hypothesis(G, params):
        return
    out.hypothesis_count += 1
    if check.notes is not None:
        out.notes.update(check.notes(G, params))
    verdict = check.conclusion(G, params)
    if verdict is None:
        out.inconclusive += 1
    elif not verdict:
        out.violation_count += 1
        if len(out.violations) < MAX_RECORDED_VIOLATIONS:
            out.violations.append({"graph": graph_to_obj(G), "reason": "hypothesis holds, conclusion fails"})


def _resolve(check: Check, config: CheckConfig) -> tuple[str, int, int]:
    mode = config.mode or check.default_mode
    if mode == "exhaustive":
        if check.domain is None:
            raise HarnessError(f"{check.id} has no exhaustive domain; use --mode sample")
        lo, hi = check.exhaustive_range
        n_min = lo if config.n_min is None else config.n_min
        n_max = hi if config.n_max is None else config.n_max
        limit = {"all": MAX_ALL_GRAPHS_N, "complete": MAX_COMPLETE_N, "uncolored": MAX_UNCOLORED_N}[check.domain]
        if n_max > limit:
            raise HarnessError(f"{check.id}: exhaustive {check.domain} domain is guarded to n <= {limit}")
    elif mode == "sample":
        lo, hi = check.sample_range
        n_min = lo if config.n_min is None else config.n_min
        n_max = hi if config.n_max is None else config.n_max
        if config.samples < 0:
            raise HarnessError("sample count must be non-negative")
    else:
        raise HarnessError(f"unknown mode {mode!r}")
    if n_min < 0 or n_min > n_max:
        raise HarnessError(f"bad n range {n_min}..{n_max}")
    return mode, n_min, n_max


_CHUNK = 1 << 16


def _units(check: Check, mode: str, n_min: int, n_max: int, config: CheckConfig) -> list[tuple]:
    if mode == "sample":
        step = 250
        return [("sample", s, min(s + step, config.samples)) for s in range(0, config.samples, step)]
    if check.domain == "all":
        return [("all", n, i) for n in range(n_min, n_max + 1) for i in range(len(list(enumerate_graphs(n))))]
    if check.domain == "complete":
        return [("complete", n) for n in range(n_min, n_max + 1)]
    units = []
    for n in range(n_min, n_max + 1):
        total = 1 << (n * (n - 1) // 2)
        units.extend(("uncolored", n, s, min(s + _CHUNK, total)) for s in range(0, total, _CHUNK))
    return units


def _instances(check: Check, unit: tuple, config: CheckConfig, n_min: int, n_max: int) -> Iterator[ColoredGraph]:
    kind = unit[0]
    if kind == "sample":
        span = n_max - n_min + 1
        for i in range(unit[1], unit[2]):
            n = n_min + i % span
            rng = random.Random(f"{config.seed}/{check.id}/{i}")
            yield check.sampler(n, rng, config.params)
    elif kind == "all":
        H = list(enumerate_graphs(unit[1]))[unit[2]]
        yield from enumerate_colorings(EnumSpec(H))
    elif kind == "complete":
        n = unit[1]
        K = build_graph(n, [(u, v, 0) for u, v in itertools.combinations(range(n), 2)])
        yield from enumerate_colorings(EnumSpec(K))


def _run_unit(args: tuple) -> _Partial:
    check, unit, config, n_min, n_max = args
    check = get_check(check)
    params = config.params
    out = _Partial()
    if unit[0] == "uncolored":
        _, n, start, stop = unit
        pairs = list(itertools.combinations(range(n), 2))
        for mask in range(start, stop):
            e = mask.bit_count()
            if check.edge_gate is not None and not check.edge_gate(n, e):
                out.instances += 1
                continue
            G = build_graph(n, [(u, v, 0) for i, (u, v) in enumerate(pairs) if mask >> i & 1])
            _evaluate(check, G, params, out)
        return out
    for G in _instances(check, unit, config, n_min, n_max):
        _evaluate(check, G, params, out)
    return out


def worker_count(config: CheckConfig) -> int:
    env = os.environ.get("RAINBOWLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise HarnessError(f"RAINBOWLAB_THREADS must be an integer, got {env!r}") from None
    return max(1, config.workers or 1)


def revalidate(check: Check, graph_obj: dict, params: Params) -> bool:
    """Fresh evaluation of hypothesis and not-conclusion on a serialized graph."""
    G = parse_graph(json.dumps(graph_obj), "json")
    return check.hypothesis(G, params) and check.conclusion(G, params) is False


def run_check(check: str | CheckId | Check, config: CheckConfig = CheckConfig()) -> CheckReport:
    """Evaluate one check over its exhaustive domain or over seeded samples.

    Work is split into units (one underlying graph, one sample block, one
    range of edge subsets); with several workers the units run in a process
    pool and are merged in unit order, so reports do not depend on the
    worker count.
    """
    start = time.perf_counter()
    chk = get_check(check)
    mode, n_min, n_max = _resolve(chk, config)
    if mode == "sample" and chk.sampler is None:
        raise HarnessError(f"{chk.id} has no sampler")
    units = _units(chk, mode, n_min, n_max, config)
    workers = worker_count(config)
    key = chk.id if chk.id in CHECKS and CHECKS[chk.id] is chk else chk
    jobs = [(key, u, config, n_min, n_max) for u in units]
    if workers > 1 and isinstance(key, str) and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_run_unit, jobs))
    else:
        partials = [_run_unit(j) for j in jobs]

    total = _Partial()
    for part in partials:
        total.instances += part.instances
        total.hypothesis_count += part.hypothesis_count
        total.violation_count += part.violation_count
        total.inconclusive += part.inconclusive
        total.notes.update(part.notes)
        room = MAX_RECORDED_VIOLATIONS - len(total.violations)
        total.violations.extend(part.violations[: max(0, room)])

    for viol in total.violations:
        if not revalidate(chk, viol["graph"], config.params):
            raise AssertionError(f"{chk.id}: recorded violation does not re-validate")

    if chk.structured:
        label = STRUCTURED_LABEL
    elif mode == "sample":
        label = "sample"
        if total.instances and total.hypothesis_count < SPARSE_RATE * total.instances:
            label = "sample, hypothesis-sparse"
    else:
        label = "exhaustive"
    echo = {
        "id": chk.id,
        "mode": mode,
        "n_min": n_min,
        "n_max": n_max,
        "samples": config.samples if mode == "sample" else None,
        "seed": config.seed,
        "k": config.k,
        "constant": config.constant,
    }
    return CheckReport(
        id=chk.id,
        config=echo,
        label=label,
        instances=total.instances,
        hypothesis_count=total.hypothesis_count,
        violation_count=total.violation_count,
        inconclusive=total.inconclusive,
        violations=total.violations,
        notes=dict(sorted(total.notes.items())),
        elapsed_seconds=round(time.perf_counter() - start, 6),
    )


# -- cross-checks used by acceptance ------------------------------------------


def exhaustive_colorings(n: int) -> Iterator[ColoredGraph]:
    """Every coloring of every underlying graph on ``n`` vertices (one graph per class)."""
    if n > MAX_ALL_GRAPHS_N:
        raise HarnessError(f"exhaustive enumeration is guarded to n <= {MAX_ALL_GRAPHS_N}")
    for H in enumerate_graphs(n):
        yield from enumerate_colorings(EnumSpec(H))


# -- extremal search ----------------------------------------------------------


@dataclass
class ExtremalReport:
    n: int
    k: int
    mode: str
    f: int | None
    witness: dict | None
    instances: int
    lower_bound: int
    lower_bound_witness: dict | None
    version: str = __version__

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_text(self) -> str:
        lines = [f"extremal search n={self.n} k={self.k} mode={self.mode}"]
        if self.mode == "exhaustive":
            lines.append(f"  empirical f: {self.f}")
            lines.append(f"  witness: {json.dumps(self.witness, separators=(',', ':'))}")
            lines.append(f"  instances: {self.instances}")
        lines.append(f"  family lower bound: f({self.k}) >= {self.lower_bound}")
        if self.lower_bound_witness is not None:
            lines.append(f"  lower-bound witness: {json.dumps(self.lower_bound_witness, separators=(',', ':'))}")
        return "\n".join(lines) + "\n"


def family_lower_bound(n: int, k: int, seed: int = 0) -> tuple[int, ColoredGraph | None]:
    """``f(k) >= k - 1`` from a member with ``k - 1`` rainbow triangles and
    ``e + c = n(n+1)/2 + k - 2``; the member is ``None`` when ``n < 3(k - 1)``."""
    if k < 1:
        raise HarnessError("k must be at least 1")
    if n < max(1, 3 * (k - 1)):
        return k - 1, None
    G = gen_from_tree(random_tree(n, k - 1, seed))
    assert count_rainbow_triangles(G) == k - 1 and G.e + G.c == _tri(n) + k - 2
    return k - 1, G


def search_extremal(n: int, k: int, mode: str = "exhaustive", seed: int = 0) -> ExtremalReport:
    """Least ``f`` such that every examined coloring with ``e + c >= n(n+1)/2 + f``
    has at least ``k`` rainbow triangles, plus a witness at ``f - 1``.

    ``mode="witness"`` skips the scan and only reports the family bound.
    """
    if k < 1:
        raise HarnessError("k must be at least 1")
    lb, lbw = family_lower_bound(n, k, seed)
    lbw_obj = None if lbw is None else graph_to_obj(lbw)
    if mode == "witness":
        return ExtremalReport(n, k, mode, None, None, 0, lb, lbw_obj)
    if mode != "exhaustive":
        raise HarnessError(f"unknown search mode {mode!r}")
    if n > MAX_ALL_GRAPHS_N:
        raise HarnessError(f"exhaustive search is guarded to n <= {MAX_ALL_GRAPHS_N}")
    best = None
    witness = None
    count = 0
    base = _tri(n)
    for G in exhaustive_colorings(n):
        count += 1
        s = G.e + G.c - base
        if (best is None or s > best) and count_rainbow_triangles(G) < k:
            best, witness = s, G
    f = None if best is None else best + 1
    return ExtremalReport(n, k, mode, f, None if witness is None else graph_to_obj(witness), count, lb, lbw_obj)


# -- counterexample minimization ---------------------------------------------


def _is_violation(check: Check, G: ColoredGraph, params: Params) -> bool:
    return check.hypothesis(G, params) and check.conclusion(G, params) is False


def _merge_colors(G: ColoredGraph, keep: int, drop: int) -> ColoredGraph:
    rows = tuple(tuple(keep if c == drop else c for c in r) for r in G.matrix)
    return ColoredGraph(G.n, rows)


def minimize_counterexample(G: ColoredGraph, check: str | CheckId | Check, params: Params = Params()) -> ColoredGraph:
    """Greedily delete vertices and merge color classes while the violation persists."""
    chk = get_check(check)
    if not _is_violation(chk, G, params):
        raise HarnessError(f"graph is not a violation of {chk.id}")
    changed = True
    while changed:
        changed = False
        for v in range(G.n):
            H = ColoredGraph(G.n - 1, tuple(tuple(r[:v] + r[v + 1 :]) for i, r in enumerate(G.matrix) if i != v))
            if _is_violation(chk, H, params):
                G, changed = H, True
                break
        if changed:
            continue
        for a, b in itertools.combinations(sorted(G.palette), 2):
            H = _merge_colors(G, a, b)
            if _is_violation(chk, H, params):
                G, changed = H, True
                break
    return G


# -- reduction self-test -------------------------------------------------------


def random_reduction_context(rng: random.Random, n_range: tuple[int, int] = (5, 14)):
    """A random host graph and anchor edge whose non-anchor edges often repeat anchor colors.

    Returns ``(G, ctx)``.
    """
    n = rng.randint(*n_range)
    pairs = _random_pairs(n, rng.uniform(0.4, 1.0), rng)
    if not pairs:
        pairs = [(0, 1)]
    palette = max(3, len(pairs))
    G = _colored(n, pairs, palette, rng)
    u, v = rng.choice(pairs)
    ctx = build_reduction(G, u, v)
    rows = [list(r) for r in G.matrix]
    group = ctx.s1 + ctx.s2
    for a, b in itertools.combinations(group, 2):
        if rows[a][b] == ABSENT:
            continue
        r = rng.random()
        if r < 0.45:
            c = ctx.anchor(b)
        elif r < 0.9:
            c = ctx.anchor(a)
        elif r < 0.95:
            c = ctx.uv_color
        else:
            c = rows[a][b]
        rows[a][b] = rows[b][a] = c
    G2 = ColoredGraph(n, tuple(map(tuple, rows)))
    return G2, build_reduction(G2, u, v)


@dataclass
class ReductionSelfTest:
    contexts: int = 0
    digraphs: int = 0
    short_cycles: int = 0
    two_cycles: int = 0
    lifted_cycles: int = 0
    lift_failures: int = 0
    context_failures: int = 0

    @property
    def ok(self) -> bool:
        return self.two_cycles == 0 and self.lift_failures == 0 and self.context_failures == 0


def reduction_selftest(samples: int, seed: int) -> ReductionSelfTest:
    """Build ``samples`` random reductions; check contexts, 2-cycle freedom and every lift."""
    out = ReductionSelfTest()
    for i in range(samples):
        rng = random.Random(f"{seed}/reduction/{i}")
        G, ctx = random_reduction_context(rng)
        out.contexts += 1
        if not ctx.validate():
            out.context_failures += 1
        D = build_cycle_digraph(ctx)
        if isinstance(D, ShortRainbowCycleFound):
            out.short_cycles += 1
            continue
        out.digraphs += 1
        if D.has_two_cycle():
            out.two_cycles += 1
        k = max(1, len(D.vertices) // 3)
        while k >= 1:
            pk = pack_directed_cycles(D, k)
            if pk.cycles is not None:
                try:
                    out.lifted_cycles += len(lift_cycles(ctx, pk.cycles))
                except AssertionError:
                    out.lift_failures += 1
                break
            k -= 1
    return out
