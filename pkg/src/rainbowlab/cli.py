"""Command-line entry point: ``rainbowlab <subcommand> ...``.

Exit codes: 0 on success, 1 when ``check`` finds violations, 2 on usage,
parse or guard errors.  The resolved configuration of every run is echoed
to stderr as one JSON line so stdout stays a clean artifact.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .constructive import find_disjoint_rainbow_cycles_heuristic
from .core import min_cn_union, saturated_degrees, stats
from .detect import count_rainbow_triangles, is_gallai
from .families import gen_from_tree, gen_rainbow_bipartite, random_tree, tree_to_dict
from .harness import CheckConfig, Params, get_check, minimize_counterexample, run_check, search_extremal
from .io import read_graph, serialize_graph


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rainbowlab", description="Rainbow subgraphs in edge-colored graphs.", allow_abbrev=False)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a family member", allow_abbrev=False)
    g.add_argument("--family", required=True, choices=["g0", "g1", "gk", "rainbow-bipartite"])
    g.add_argument("--n", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--a", type=int)
    g.add_argument("--b", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.add_argument("--tree-out")

    c = sub.add_parser("check", help="run a theorem or lemma check", allow_abbrev=False)
    c.add_argument("--id", required=True)
    c.add_argument("--n-min", type=int)
    c.add_argument("--n-max", type=int)
    c.add_argument("--mode", choices=["exhaustive", "sample"])
    c.add_argument("--samples", type=int, default=1000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--k", type=int, default=1)
    c.add_argument("--constant", type=int, choices=[64, 18], default=64)
    c.add_argument("--format", choices=["json", "text"], default="json")

    s = sub.add_parser("search", help="extremal search for the rainbow-triangle excess", allow_abbrev=False)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--mode", choices=["exhaustive", "witness"], default="exhaustive")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--format", choices=["json", "text"], default="json")

    r = sub.add_parser("reduce", help="look for k disjoint rainbow cycles", allow_abbrev=False)
    r.add_argument("--in", dest="path", required=True)
    r.add_argument("--k", type=int, default=1)
    r.add_argument("--constant", type=int, choices=[64, 18], default=64)

    t = sub.add_parser("stats", help="graph statistics", allow_abbrev=False)
    t.add_argument("--in", dest="path", required=True)

    m = sub.add_parser("minimize", help="shrink a recorded violation", allow_abbrev=False)
    m.add_argument("--in", dest="path", required=True)
    m.add_argument("--id", required=True)
    m.add_argument("--k", type=int, default=1)
    m.add_argument("--constant", type=int, choices=[64, 18], default=64)
    m.add_argument("--out")
    return p


def _emit(data: bytes | str, path: str | None, out) -> None:
    if isinstance(data, str):
        data = data.encode("utf-8")
    if path is None:
        out.write(data.decode("utf-8"))
        out.flush()
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _echo(config: dict, err) -> None:
    err.write("config: " + json.dumps(config, sort_keys=True) + "\n")


def _require(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command} --family {args.family}: missing {', '.join(missing)}")


def _cmd_gen(args, out, err) -> int:
    tree = None
    if args.family == "rainbow-bipartite":
        _require(args, "a", "b")
        if args.tree_out is not None:
            raise UsageError("--tree-out applies to g0, g1 and gk only")
        G = gen_rainbow_bipartite(args.a, args.b)
    else:
        _require(args, "n")
        k = {"g0": 0, "g1": 1}.get(args.family, args.k)
        if k is None:
            raise UsageError("gen --family gk: missing --k")
        tree = random_tree(args.n, k, args.seed)
        G = gen_from_tree(tree)
    _echo({"command": "gen", "family": args.family, "n": args.n, "k": args.k, "a": args.a, "b": args.b,
           "seed": args.seed, "out": args.out, "tree_out": args.tree_out}, err)
    if args.out is None:
        _emit(serialize_graph(G) + b"\n", None, out)
    else:
        _emit(serialize_graph(G, "text" if args.out.endswith((".txt", ".edges")) else "json"), args.out, out)
    if args.tree_out is not None:
        _emit(json.dumps(tree_to_dict(tree), sort_keys=True), args.tree_out, out)
    return 0


def _cmd_check(args, out, err) -> int:
    get_check(args.id)
    config = CheckConfig(args.n_min, args.n_max, args.mode, args.samples, args.seed, args.k, args.constant)
    report = run_check(args.id, config)
    _echo({"command": "check", "format": args.format, **report.config}, err)
    _emit(report.to_json() + "\n" if args.format == "json" else report.to_text(), None, out)
    return 0 if report.ok else 1


def _cmd_search(args, out, err) -> int:
    report = search_extremal(args.n, args.k, args.mode, args.seed)
    _echo({"command": "search", "n": args.n, "k": args.k, "mode": args.mode, "seed": args.seed}, err)
    _emit(report.to_json() + "\n" if args.format == "json" else report.to_text(), None, out)
    return 0


def _cmd_reduce(args, out, err) -> int:
    G = read_graph(args.path)
    if args.k < 1:
        raise UsageError("--k must be at least 1")
    res = find_disjoint_rainbow_cycles_heuristic(G, args.k, args.constant)
    _echo({"command": "reduce", "in": args.path, "k": args.k, "constant": args.constant}, err)
    _emit(_dump(res.to_dict()), None, out)
    return 0


def _cmd_stats(args, out, err) -> int:
    G = read_graph(args.path)
    st = stats(G)
    _echo({"command": "stats", "in": args.path}, err)
    _emit(
        _dump(
            {
                "n": G.n,
                "e": st.e,
                "c": st.c,
                "e_plus_c": st.e + st.c,
                "min_color_degree": st.min_color_degree,
                "degrees": list(st.degrees),
                "color_degrees": list(st.color_degrees),
                "saturated_degrees": list(saturated_degrees(G)),
                "min_cn_union": min_cn_union(G),
                "rainbow_triangles": count_rainbow_triangles(G),
                "complete": G.is_complete(),
                "gallai": is_gallai(G),
                "rainbow": G.is_rainbow(),
            }
        ),
        None,
        out,
    )
    return 0


def _cmd_minimize(args, out, err) -> int:
    check = get_check(args.id)
    G = read_graph(args.path)
    H = minimize_counterexample(G, check, Params(args.k, args.constant))
    _echo({"command": "minimize", "in": args.path, "id": check.id, "k": args.k, "constant": args.constant,
           "out": args.out}, err)
    if args.out is None:
        _emit(serialize_graph(H) + b"\n", None, out)
    else:
        _emit(serialize_graph(H, "text" if args.out.endswith((".txt", ".edges")) else "json"), args.out, out)
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "check": _cmd_check,
    "search": _cmd_search,
    "reduce": _cmd_reduce,
    "stats": _cmd_stats,
    "minimize": _cmd_minimize,
}


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = _parser().parse_args(argv)
        return _COMMANDS[args.command](args, out, err)
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    except (UsageError, ValueError, OSError) as exc:
        # parse, format, guard and unknown-id errors are all ValueErrors
        err.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
