import io
import json

import pytest

from rainbowlab.cli import main
from rainbowlab.core import build_graph
from rainbowlab.detect import count_rainbow_triangles
from rainbowlab.families import gen_from_tree, membership_g0, tree_from_dict
from rainbowlab.harness import CheckConfig, run_check
from rainbowlab.io import read_graph, write_graph


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_gen_g0_writes_file(tmp_path):
    path = tmp_path / "g.json"
    code, _, err = run("gen", "--family", "g0", "--n", "8", "--seed", "42", "--out", str(path))
    assert code == 0 and path.exists()
    G = read_graph(str(path))
    assert G.n == 8 and membership_g0(G) is not None
    assert '"seed": 42' in err


def test_gen_tree_out_regenerates_graph(tmp_path):
    g, t = tmp_path / "g.txt", tmp_path / "t.json"
    code, _, _ = run("gen", "--family", "gk", "--n", "9", "--k", "3", "--seed", "1", "--out", str(g), "--tree-out", str(t))
    assert code == 0
    G = read_graph(str(g))
    assert count_rainbow_triangles(G) == 3
    assert gen_from_tree(tree_from_dict(json.loads(t.read_text()))) == G


def test_gen_to_stdout_and_bipartite():
    code, out, _ = run("gen", "--family", "rainbow-bipartite", "--a", "2", "--b", "3")
    assert code == 0
    assert json.loads(out)["n"] == 5 and len(json.loads(out)["edges"]) == 6
    code, out, _ = run("gen", "--family", "g1", "--n", "5")
    assert code == 0 and count_rainbow_triangles(build_graph(5, json.loads(out)["edges"])) == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["gen", "--family", "g0"],
        ["gen", "--family", "gk", "--n", "5"],
        ["gen", "--family", "g1", "--n", "2"],
        ["gen", "--family", "rainbow-bipartite", "--a", "2"],
        ["gen", "--family", "rainbow-bipartite", "--a", "2", "--b", "2", "--tree-out", "x.json"],
        ["gen", "--family", "g9", "--n", "3"],
        ["check", "--id", "BOGUS"],
        ["check", "--id", "T1", "--bogus"],
        ["check", "--id", "T1", "--n-max", "6", "--mode", "exhaustive"],
        ["check", "--id", "T1", "--constant", "7"],
        ["search", "--n", "6", "--k", "1"],
        ["stats", "--in", "/nonexistent/graph.json"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors_exit_two(argv):
    code, _, err = run(*argv)
    assert code == 2 and "error" in err


def test_check_matches_library_report():
    code, out, err = run("check", "--id", "T1", "--n-max", "4", "--mode", "exhaustive", "--format", "json")
    assert code == 0
    report = json.loads(out)
    assert report["violation_count"] == 0
    expected = run_check("T1", CheckConfig(n_max=4, mode="exhaustive")).to_dict(timing=False)
    report.pop("elapsed_seconds")
    assert report == expected
    assert json.loads(err.split("config: ", 1)[1])["id"] == "T1"


def test_check_text_format():
    code, out, _ = run("check", "--id", "L_SAT", "--format", "text")
    assert code == 0 and out.startswith("check L_SAT: PASS [exhaustive]")


def test_identical_argv_identical_output():
    argv = ["check", "--id", "T7", "--samples", "300", "--seed", "9"]
    _, a, _ = run(*argv)
    _, b, _ = run(*argv)
    strip = lambda s: {k: v for k, v in json.loads(s).items() if k != "elapsed_seconds"}
    assert strip(a) == strip(b)
    g1 = run("gen", "--family", "gk", "--n", "7", "--k", "2", "--seed", "5")[1]
    g2 = run("gen", "--family", "gk", "--n", "7", "--k", "2", "--seed", "5")[1]
    assert g1 == g2


def test_search_command():
    code, out, _ = run("search", "--n", "4", "--k", "1")
    assert code == 0 and json.loads(out)["f"] == 0
    code, out, _ = run("search", "--n", "20", "--k", "2", "--mode", "witness", "--format", "text")
    assert code == 0 and "f(2) >= 1" in out


def test_stats_and_reduce(tmp_path):
    path = str(tmp_path / "k.json")
    write_graph(build_graph(3, [(0, 1, 0), (1, 2, 1), (0, 2, 2)]), path)
    code, out, _ = run("stats", "--in", path)
    stats = json.loads(out)
    assert code == 0 and stats["rainbow_triangles"] == 1 and stats["e_plus_c"] == 6
    code, out, _ = run("reduce", "--in", path, "--k", "1", "--constant", "18")
    res = json.loads(out)
    assert code == 0 and res["found"] and res["constant"] == 18


def test_reduce_reports_absent(tmp_path):
    path = str(tmp_path / "m.json")
    write_graph(build_graph(4, [(0, 1, 0), (1, 2, 0), (2, 3, 0), (0, 3, 0)]), path)
    code, out, _ = run("reduce", "--in", path)
    assert code == 0 and json.loads(out)["found"] is False


def test_minimize_non_violation_exits_two(tmp_path):
    path = str(tmp_path / "g.json")
    write_graph(build_graph(3, [(0, 1, 0), (1, 2, 1), (0, 2, 2)]), path)
    code, _, err = run("minimize", "--in", path, "--id", "T1")
    assert code == 2 and "not a violation" in err


def test_check_exit_one_on_violations(monkeypatch):
    from rainbowlab import harness

    fake = harness.Check("T1", lambda G, p: G.n >= 2, lambda G, p: False, "all", (1, 3))
    monkeypatch.setitem(harness.CHECKS, "T1", fake)
    code, out, _ = run("check", "--id", "T1")
    assert code == 1 and json.loads(out)["violation_count"] > 0


def test_version():
    code, out, _ = run("--version")
    assert code == 0
