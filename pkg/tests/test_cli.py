from __future__ import annotations

import json
from pathlib import Path

import pytest

from sgpid.cli import EXIT_ERROR, EXIT_NOT_IDENTIFIED, EXIT_OK, main
from sgpid.corpus import load_corpus_graph
from sgpid.graph_core import graph_from_dict

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize(
    "name, argv",
    [
        ("frontdoor", ["--graph", "corpus:frontdoor", "--y", "Y2", "--do", "A2=1"]),
        ("elections", ["--graph", "corpus:elections_sg", "--y", "Y_l", "--do", "A_l=1"]),
        ("three_unit_policy", ["--graph", "corpus:three_unit", "--y", "Y2,Y3", "--policy", "corpus:three_unit_policies"]),
        ("elections_policy", ["--graph", "corpus:elections_sg", "--y", "Y_l", "--policy", "corpus:elections_policy"]),
    ],
)
def test_identify_reproduces_goldens(capsys, name, argv):
    code, out, _ = run(capsys, "identify", *argv)
    assert code == EXIT_OK
    assert out == (GOLDEN / f"{name}.txt").read_text(encoding="utf-8")


def test_latent_graph_is_projected_first(capsys):
    code, out, _ = run(capsys, "identify", "--graph", "corpus:elections_lv", "--y", "Y_l", "--do", "A_l=1")
    assert code == EXIT_OK and out == (GOLDEN / "elections.txt").read_text(encoding="utf-8")


def test_not_identified_exits_2_with_witness(capsys):
    code, out, _ = run(capsys, "identify", "--graph", "corpus:bow", "--y", "Y1", "--do", "A1=1")
    assert code == EXIT_NOT_IDENTIFIED and "{Y1}" in out
    code, out, _ = run(capsys, "identify", "--graph", "corpus:bow", "--y", "Y1", "--do", "A1=1", "--format", "json")
    doc = json.loads(out)
    assert code == EXIT_NOT_IDENTIFIED and doc["district"] == ["Y1"] and doc["verified"] is True


def test_json_and_latex_formats(capsys):
    code, out, _ = run(capsys, "identify", "--graph", "corpus:frontdoor", "--y", "Y2", "--do", "A2=1", "--format", "json")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["identified"] and doc["text"] + "\n" == (GOLDEN / "frontdoor.txt").read_text()
    code, out, _ = run(capsys, "identify", "--graph", "corpus:frontdoor", "--y", "Y2", "--do", "A2=1", "--format", "latex")
    assert code == EXIT_OK and out.startswith(r"\sum")


def test_constant_policy_file_with_node_algorithm(capsys):
    base = ["identify", "--graph", "corpus:frontdoor", "--y", "Y2"]
    code, out, _ = run(capsys, *base, "--policy", "corpus:frontdoor_do", "--algorithm", "id-admg")
    assert code == EXIT_OK and out == (GOLDEN / "frontdoor.txt").read_text(encoding="utf-8")
    code, _, err = run(capsys, "identify", "--graph", "corpus:elections_sg", "--y", "Y_l", "--policy", "corpus:elections_policy", "--algorithm", "id-sg")
    assert code == EXIT_ERROR and "not constant" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["identify", "--graph", "corpus:frontdoor", "--y", "Y2", "--do", "Y2=1"],
        ["identify", "--graph", "corpus:frontdoor", "--y", "Y2"],
        ["identify", "--graph", "corpus:frontdoor", "--y", "Y2", "--do", "A2=x"],
        ["identify", "--graph", "corpus:nosuch", "--y", "Y2", "--do", "A2=1"],
        ["identify", "--graph", "corpus:three_unit", "--y", "Y2", "--do", "A2=1", "--algorithm", "id-admg"],
        ["identify", "--graph", "corpus:frontdoor", "--y", "Y2", "--do", "A2=1", "--policy", "corpus:frontdoor_do"],
        ["identify", "--graph", "corpus:frontdoor"],
        ["bogus"],
    ],
)
def test_input_errors_exit_1(capsys, argv):
    with pytest.raises(SystemExit) as info:
        raise SystemExit(main(argv))
    assert info.value.code == EXIT_ERROR


@pytest.mark.parametrize("text", ["{not json", '{"vertices": ["A"], "edges": [["A", "->", "A"]]}', "[]"])
def test_malformed_graph_files_exit_1(capsys, tmp_path, text):
    bad = tmp_path / "g.json"
    bad.write_text(text, encoding="utf-8")
    code, _, err = run(capsys, "identify", "--graph", str(bad), "--y", "Y", "--do", "A=1")
    assert code == EXIT_ERROR and err.startswith("error:")


def test_intervene_writes_three_unit_post(capsys, tmp_path):
    code, out, _ = run(capsys, "intervene", "--graph", "corpus:three_unit", "--policy", "corpus:three_unit_policies")
    assert code == EXIT_OK and graph_from_dict(json.loads(out)) == load_corpus_graph("three_unit_post")
    target = tmp_path / "post.json"
    assert run(capsys, "intervene", "--graph", "corpus:three_unit", "--policy", "corpus:three_unit_policies", "--out", str(target))[0] == EXIT_OK
    assert graph_from_dict(json.loads(target.read_text())) == load_corpus_graph("three_unit_post")


def test_empty_policy_leaves_graph_unchanged(capsys, tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text("[]", encoding="utf-8")
    code, out, _ = run(capsys, "intervene", "--graph", "corpus:three_unit", "--policy", str(empty))
    assert code == EXIT_OK and graph_from_dict(json.loads(out)) == load_corpus_graph("three_unit")


def test_clause_a_violation_names_the_witness(capsys, tmp_path):
    # Y is a child of X, so it lies in the strict exterior of X
    graph = tmp_path / "g.json"
    graph.write_text(json.dumps({"vertices": ["X", "Y"], "edges": [{"tail": "X", "head": "Y", "kind": "directed"}]}))
    pol = tmp_path / "p.json"
    pol.write_text(json.dumps([{"target": "X", "inputs": ["Y"], "mechanism": {"kind": "param", "tag": "f_X"}}]))
    code, _, err = run(capsys, "intervene", "--graph", str(graph), "--policy", str(pol))
    assert code == EXIT_ERROR and "clause a" in err and "Y" in err and "malformed" not in err


def test_malformed_policy_entry_exits_1(capsys, tmp_path):
    pol = tmp_path / "p.json"
    pol.write_text(json.dumps([{"target": "A2", "inputs": [], "mechanism": {"kind": "param", "name": "f"}}]))
    code, _, err = run(capsys, "intervene", "--graph", "corpus:frontdoor", "--policy", str(pol))
    assert code == EXIT_ERROR and "malformed policy entry" in err


def test_simulate_is_deterministic(capsys, tmp_path):
    cfg = tmp_path / "sim.json"
    cfg.write_text(json.dumps({"network": {"n_units": 4, "density": 0.5}, "n_samples": 30, "sweeps": 5}))
    code, first, _ = run(capsys, "simulate", "--config", str(cfg), "--seed", "7")
    code2, second, _ = run(capsys, "simulate", "--config", str(cfg), "--seed", "7")
    assert code == code2 == EXIT_OK and first == second
    assert len(first.splitlines()) == 31
    assert run(capsys, "simulate", "--config", str(cfg), "--seed", "8")[1] != first
    out = tmp_path / "out"
    assert run(capsys, "simulate", "--config", str(cfg), "--seed", "7", "--out", str(out))[0] == EXIT_OK
    assert (out / "dataset.csv").read_text(encoding="utf-8").splitlines() == first.splitlines()


def test_config_errors_report_field_paths(capsys, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"network": {"generator": "lattice"}, "n_samples": -1}))
    code, _, err = run(capsys, "simulate", "--config", str(cfg))
    assert code == EXIT_ERROR and "network.generator" in err and "n_samples" in err
    cfg.write_text(json.dumps({"kind": "bias"}))
    code, _, err = run(capsys, "experiment", "policy", "--config", str(cfg))
    assert code == EXIT_ERROR and "bias" in err


def test_small_experiment_writes_outputs(capsys, tmp_path):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps({"densities": [0.5], "n_units": 4, "n_samples": 150, "n_bootstrap": 3, "sweeps": 5}))
    code, out, _ = run(capsys, "experiment", "policy", "--config", str(cfg), "--out", str(tmp_path / "res"))
    assert code == EXIT_OK and "increase" in out
    names = sorted(p.name for p in (tmp_path / "res").iterdir())
    assert names == ["policy_detail.json", "policy_plot.json", "policy_summary.csv"]
    plot = json.loads((tmp_path / "res" / "policy_plot.json").read_text())
    assert plot["series"]["erdos-renyi"]["x"] == [0.5]
