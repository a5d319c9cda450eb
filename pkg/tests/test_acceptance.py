"""One test per acceptance criterion, each at its stated tolerance.

A PASS/FAIL line per criterion is printed in the terminal summary
(see conftest.py).
"""

import time

import networkx as nx
import pytest

import oracles
from graphtok import cli
from graphtok.analysis import SuiteConfig, run_verification_suite
from graphtok.graph import build_graph, complete_bipartite, complete_graph, cycle_graph, path_graph
from graphtok.planarity import is_planar


def _run(*groups):
    start = time.perf_counter()
    report = run_verification_suite(SuiteConfig(groups=groups))
    return report, time.perf_counter() - start


def _explain(report):
    return "; ".join(f"{c.name}: pass={c.passed} residual={c.residual:.3e} {c.detail}" for c in report.checks)


def test_criterion_1_gm_rw_certification():
    report, elapsed = _run("t4")
    assert [c.name for c in report.checks] == ["t4.rw_equality", "t4.planarity_flip"]
    assert report.overall, _explain(report)
    assert elapsed < 1.0


def test_criterion_2_twin_families():
    report, elapsed = _run("t1")
    assert report.overall, _explain(report)
    assert elapsed < 30.0


def test_criterion_3_twin_edge_lemma():
    report, _ = _run("lemma")
    (check,) = report.checks
    assert check.passed, _explain(report)
    assert check.detail["graphs"] == 200
    assert check.detail["twin_pairs"] > 0
    assert check.residual < 1e-7


def test_criterion_4_s5_gadget():
    report, _ = _run("t3")
    (check,) = report.checks
    assert check.passed, _explain(report)
    assert check.detail["instances"] == 800
    assert check.detail["disagreements"] == 0


def test_criterion_5_disjointness():
    report, _ = _run("t5")
    (check,) = report.checks
    assert check.passed, _explain(report)
    assert check.detail["instances"] == 256 + 3 * 500


def test_criterion_6_gradient_identity():
    report, _ = _run("t7")
    (check,) = report.checks
    assert check.passed, _explain(report)
    assert check.detail["identity_rel"] <= 1e-6
    assert check.detail["fd_max_error"] <= 1e-6


def test_criterion_7_rw_detector():
    report, _ = _run("rw")
    (check,) = report.checks
    assert check.passed, _explain(report)
    assert check.detail["runs"] == 500 * 6


def test_criterion_8_planarity_vs_kuratowski():
    mismatches = []
    count = 0
    for G in nx.graph_atlas_g()[1:]:
        if not nx.is_connected(G):
            continue
        n, edges = G.number_of_nodes(), list(G.edges())
        count += 1
        expected = not oracles.has_kuratowski_subdivision(n, edges)
        if is_planar(build_graph(n, edges)).planar != expected:
            mismatches.append(edges)
    assert count == 996
    assert not mismatches

    petersen = build_graph(10, nx.petersen_graph().edges())
    for g in (complete_graph(5), complete_bipartite(3, 3), petersen):
        assert not is_planar(g).planar
    trees = [build_graph(t.number_of_nodes(), t.edges()) for t in nx.nonisomorphic_trees(9)]
    planar = trees + [cycle_graph(n) for n in range(3, 12)] + [complete_graph(4), path_graph(15)]
    assert all(is_planar(g).planar for g in planar)


def _outputs(tmp_path, tag):
    d = tmp_path / tag
    d.mkdir()
    graph = d / "g.json"
    assert cli.main(["generate", "er", "--n", "9", "--p", "0.4", "--seed", "5", "--out", str(graph)]) == 0
    commands = [
        ["generate", "gm_pair", "--out", str(d / "gm.json")],
        ["generate", "bipartite_twin", "--n", "7", "--out", str(d / "bt.json")],
        ["generate", "clique_join_twin", "--n", "7", "--out", str(d / "cj.json")],
        ["generate", "s5_gadget", "--k", "3", "--seed", "2", "--out", str(d / "s5.json")],
        ["generate", "disjointness", "--n", "3", "--seed", "2", "--out", str(d / "dj.json")],
        ["generate", "bridge_pairs", "--n", "10", "--count", "4", "--seed", "3", "--out", str(d / "bp.json")],
        ["planarity", str(graph), "--out", str(d / "pl.json")],
        ["spectrum", str(graph), "--out", str(d / "sp.csv")],
        ["spectrum", str(graph), "--kind", "sym_normalized", "--out", str(d / "sps.csv")],
        ["verify", "--only", "t3", "t5", "--seed", "1", "--no-timings", "--out", str(d / "rep.json")],
    ]
    for fam in ("spectral", "rw", "adjacency", "adjacency_projected", "combined"):
        commands.append(["tokenize", str(graph), "--family", fam, "--seed", "4", "--out", str(d / f"tok_{fam}.csv")])
    for argv in commands:
        assert cli.main(argv) == 0, argv
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def test_criterion_9_cli_determinism(tmp_path):
    first = _outputs(tmp_path, "a")
    second = _outputs(tmp_path, "b")
    assert len(first) >= 20
    assert first.keys() == second.keys()
    differing = [name for name in first if first[name] != second[name]]
    assert not differing
