import csv
import io
import json
import subprocess
import sys

import pytest

from subsetspace.cli import main


def run(argv, stdin="", monkeypatch=None, capsys=None):
    monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_list(monkeypatch, capsys):
    code, out, _ = run(["verify", "--list"], monkeypatch=monkeypatch, capsys=capsys)
    assert code == 0 and "r3-lipschitz" in out and "relations" in out


def test_verify_report(monkeypatch, capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 3, "dim": 2}))
    code, out, err = run(["verify", "relations", "--config", str(cfg), "--samples", "50"],
                         monkeypatch=monkeypatch, capsys=capsys)
    rep = json.loads(out)
    assert code == 0 and rep["suite"] == "relations" and rep["config"]["samples"] == 50
    assert "[PASS]" in err


def test_verify_bad_suite(monkeypatch, capsys):
    code, _, err = run(["verify", "nope"], monkeypatch=monkeypatch, capsys=capsys)
    assert code == 2 and "unknown suite" in err


def test_verify_bad_config(monkeypatch, capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"colour": "red"}))
    code, _, _ = run(["verify", "relations", "--config", str(cfg)], monkeypatch=monkeypatch, capsys=capsys)
    assert code == 2


@pytest.mark.parametrize("map_id, fset, expected", [
    ("r2", {"n": 2, "p": 2, "points": [[0.0], [1.0]]}, [[0.5]]),
    ("r3", {"n": 3, "p": 2, "points": [[0.0], [1.0], [2.0]]}, [[1.0]]),
    ("rn2", {"n": 4, "p": 2, "points": [[0.0], [0.05], [0.95], [1.0]]}, [[0.025], [0.975]]),
    ("selector", {"n": 2, "p": 2, "points": [[0.0], [1.0]]}, [[0.5]]),
])
def test_retract(map_id, fset, expected, monkeypatch, capsys):
    code, out, _ = run(["retract", map_id], json.dumps(fset), monkeypatch, capsys)
    got = json.loads(out)
    assert code == 0
    assert [v for row in got["points"] for v in row] == pytest.approx([v for row in expected for v in row], abs=1e-12)


def test_retract_flow(monkeypatch, capsys):
    fset = {"n": 2, "p": 2, "points": [[0.0], [1.0]]}
    code, out, _ = run(["retract", "flow"], json.dumps(fset), monkeypatch, capsys)
    assert code == 0 and json.loads(out)["points"][0][0] == pytest.approx(0.5, abs=1e-6)


def test_retract_bad_input(monkeypatch, capsys):
    code, _, _ = run(["retract", "r3"], "{not json", monkeypatch, capsys)
    assert code == 2
    code, _, _ = run(["retract", "r3"], json.dumps({"n": 4, "points": [[0], [1], [2], [3]]}),
                     monkeypatch, capsys)
    assert code == 2


def test_path(monkeypatch, capsys):
    body = {"x": {"n": 3, "points": [[0], [3], [5]]}, "y": {"n": 3, "points": [[-1], [1], [4]]}}
    code, out, _ = run(["path", "quasigeodesic"], json.dumps(body), monkeypatch, capsys)
    obj = json.loads(out)
    assert code == 0 and len(obj["legs"]) == 2
    assert obj["legs"][1]["start"]["points"] == [[0.0], [4.0]]
    code, out, _ = run(["path", "geodesic"], json.dumps(body), monkeypatch, capsys)
    assert json.loads(out)["n"] == 4


def test_flow_run_trace(monkeypatch, capsys, tmp_path):
    inp = tmp_path / "x.json"
    inp.write_text(json.dumps({"n": 3, "p": 2, "points": [[-1.0], [0.0], [1.0]]}))
    trace = tmp_path / "trace.csv"
    code, out, _ = run(["flow", "run", "--input", str(inp), "--trace", str(trace)],
                       monkeypatch=monkeypatch, capsys=capsys)
    res = json.loads(out)
    assert code == 0 and res["T"] == pytest.approx(0.5, abs=1e-6)
    rows = list(csv.reader(trace.open()))
    assert rows[0] == ["t", "delta", "u0_0", "u1_0", "u2_0"]
    assert len(rows) == res["steps"] + 2


def test_flow_run_random(monkeypatch, capsys):
    code, out, _ = run(["flow", "run", "--n", "4", "--dim", "2", "--p", "inf", "--seed", "3"],
                       monkeypatch=monkeypatch, capsys=capsys)
    res = json.loads(out)
    assert code == 0 and len(res["retract"]["points"]) <= 3 and res["input"]["p"] == "inf"


def test_flow_run_max_steps(monkeypatch, capsys):
    code, _, err = run(["flow", "run", "--max-steps", "3"], monkeypatch=monkeypatch, capsys=capsys)
    assert code == 2 and "no collision" in err


def test_estimate(monkeypatch, capsys, tmp_path):
    path = tmp_path / "r.csv"
    code, out, _ = run(["estimate", "identity", "--samples", "30", "--csv", str(path)],
                       monkeypatch=monkeypatch, capsys=capsys)
    obj = json.loads(out)
    assert code == 0 and obj["max_ratio"] == pytest.approx(1.0) and path.exists()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "subsetspace.cli", "verify", "--list"],
                          capture_output=True, text=True, check=True)
    assert "flow-closed-form" in proc.stdout
