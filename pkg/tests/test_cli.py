import json
import subprocess
import sys

import pytest

from combdyn.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_perm_analyze(capsys):
    code, rep = run_json(capsys, "perm", "analyze", "--cycle", "1,2,3,4")
    assert code == 0
    assert rep["M"] == [[0, 0, 1], [1, 0, 1], [0, 1, 1]]
    assert rep["OM"] == [[0, 0, -1], [1, 0, -1], [0, 1, -1]]
    assert rep["traces_M"][0] == 1 and rep["traces_M"][1] == 3 and rep["traces_M"][3] == 11
    assert rep["nonrepetitive_closed_walks"][1] == 1 and rep["nonrepetitive_closed_walks"][3] == 2


def test_perm_analyze_dot(capsys):
    code, out, _ = run(capsys, "perm", "analyze", "--cycle", "1,2,3,4", "--dot")
    assert code == 0
    edges = [line.strip() for line in out.splitlines() if "->" in line]
    assert edges == ['E1 -> E2 [label="+"];', 'E2 -> E3 [label="+"];', 'E3 -> E1 [label="-"];',
                     'E3 -> E2 [label="-"];', 'E3 -> E3 [label="-"];']


@pytest.mark.parametrize("argv", [
    ["perm", "analyze", "--cycle", "1"],
    ["perm", "analyze", "--cycle", "1,x"],
    ["perm", "analyze", "--image", "1,1,2"],
    ["perm", "analyze"],
    ["verify", "bogus"],
    ["tree", "analyze", "/nonexistent/tree.json"],
    ["order", "cmp", "0", "3"],
])
def test_usage_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        sys.exit(main(argv))
    assert exc.value.code == 2


def test_pwl_periods(capsys):
    code, rep = run_json(capsys, "pwl", "periods", "--cycle", "1,2,3,4", "--upto", "6")
    assert code == 0 and rep["least_periods"] == [1, 2, 3, 4, 5, 6]
    assert rep["witnesses"]["1"]["point"] == "13/4"
    _, rep = run_json(capsys, "pwl", "periods", "--cycle", "1,2", "--upto", "4")
    assert rep["least_periods"] == [1, 2]
    _, rep = run_json(capsys, "pwl", "periods", "--image", "1,2,3", "--upto", "3")
    assert rep["least_periods"] == [1]


def test_cap_exit_3(capsys, monkeypatch):
    code, _, err = run(capsys, "pwl", "periods", "--cycle", "1,3,2,6,4,5", "--upto", "8", "--cap", "5")
    assert code == 3 and "cap" in err
    monkeypatch.setenv("COMBDYN_CAP", "5")
    code, _, _ = run(capsys, "perm", "walks", "--cycle", "1,3,2,6,4,5", "--length", "8")
    assert code == 3


def test_perm_walks(capsys):
    code, rep = run_json(capsys, "perm", "walks", "--cycle", "1,2,3,4", "--length", "5",
                         "--base", "3", "--nonrepetitive")
    assert code == 0
    assert "E3E1E2E3E2E3" in [w["walk"] for w in rep["walks"]]


def test_order_commands(capsys):
    assert run_json(capsys, "order", "cmp", "6", "3")[1]["relation"] == "6 ◁ 3"
    assert run_json(capsys, "order", "cmp", "3", "6")[1]["relation"] == "6 ◁ 3"
    assert run_json(capsys, "order", "cmp", "5", "5")[1]["relation"] == "5 = 5"
    rep = run_json(capsys, "order", "forced", "9", "--model", "tree", "--upto", "12")[1]
    assert rep["forced"] == [1, 2, 4, 8, 9, 10, 11, 12]
    assert run_json(capsys, "order", "remove-ones", "31")[1]["sequence"] == [30, 28, 24, 16, 0]


def test_tree_analyze(capsys):
    code, rep = run_json(capsys, "tree", "analyze", "fig10.json", "--walk-length", "6")
    assert code == 0 and rep["walk"]["status"] == "absent"
    assert rep["trace_OM"] == -1
    _, rep = run_json(capsys, "tree", "analyze", "fig10.json", "--walk-length", "8")
    assert rep["walk"]["status"] == "present" and rep["walk"]["witness"]["sign"] == -1


def test_tree_analyze_file(capsys, tmp_path):
    p = tmp_path / "t.json"
    p.write_text(json.dumps({"v": 3, "edges": [[1, 2], [2, 3]], "perm": [2, 3, 1]}), encoding="utf-8")
    code, rep = run_json(capsys, "tree", "analyze", str(p))
    assert code == 0 and rep["trace_OM"] == -1


def test_graph_analyze(capsys, tmp_path):
    p = tmp_path / "circle.json"
    p.write_text(json.dumps({"v": 4, "edges": [[1, 2], [2, 3], [3, 4], [4, 1]], "perm": "1,2,3,4",
                             "routes": [[2], [3], [4], [1]]}), encoding="utf-8")
    code, rep = run_json(capsys, "graph", "analyze", str(p))
    assert code == 0 and rep["trace_OM"] == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"v": 4, "edges": [[1, 2], [2, 3], [3, 4], [4, 1]], "perm": "1,2,3,4",
                               "routes": [[3], [3], [4], [1]]}), encoding="utf-8")
    code, _, err = run(capsys, "graph", "analyze", str(bad))
    assert code == 2 and "E1" in err


def test_export_dot(capsys):
    code, out, _ = run(capsys, "export", "dot", "--tree", "fig10.json")
    assert code == 0 and out.startswith("digraph markov {") and out.count("->") == 11
    code, out, _ = run(capsys, "export", "dot", "--image", "2,1")
    assert code == 0 and 'E1 -> E1 [label="-"];' in out


@pytest.mark.parametrize("argv", [
    ["verify", "trace", "--n-max", "6"],
    ["verify", "power", "--n-max", "5", "--upto", "6"],
    ["verify", "product", "--n-max", "4"],
    ["verify", "forcing", "--n-max", "6", "--upto", "8"],
    ["verify", "tree-trace", "--samples", "50", "--seed", "3"],
    ["verify", "walk-counts", "--n-max", "4", "--upto", "5"],
])
def test_verify_suites_pass(capsys, argv):
    code, rep = run_json(capsys, *argv)
    assert code == 0 and rep["status"] == "pass" and rep["checked"] > 0


def test_verify_reports_counterexample(capsys, monkeypatch):
    import combdyn.cli as cli

    monkeypatch.setattr(cli, "trace", lambda m: 0)
    code, rep = run_json(capsys, "verify", "trace", "--n-max", "3")
    assert code == 1 and rep["status"] == "fail" and "permutation" in rep["counterexample"]


def test_installed_script_is_deterministic():
    argv = [sys.executable, "-m", "combdyn.cli", "pwl", "periods", "--cycle", "1,3,2,5,4", "--upto", "7"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["least_periods"] == [1, 2, 3, 4, 5, 6, 7]
