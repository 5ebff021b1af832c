import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from grassmann_kernel.cli import main

MODELS = Path(__file__).resolve().parent.parent / "models"


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_split_model_exits_ok(capsys):
    code, out, _ = run(["run", str(MODELS / "two_charts.gk")], capsys)
    assert code == 0
    assert "batchelor" in out


def test_no_verdict_exits_one(capsys):
    code, out, _ = run(["run", str(MODELS / "nonsplit.gk")], capsys)
    assert code == 1
    assert "no certificate at d=4 D=6" in out


def test_parse_errors_exit_two_with_positions(capsys):
    code, _, err = run(["run", str(MODELS / "malformed.gk")], capsys)
    assert code == 2
    lines = err.strip().splitlines()
    assert lines[0].endswith("malformed.gk:2:10: E302 relation not parity-homogeneous")
    assert any(":3:15: E100" in line for line in lines)


def test_json_to_stdout(capsys):
    code, out, err = run(["run", str(MODELS / "nonsplit.gk"), "--json", "-"], capsys)
    assert "split:" in err
    payload = json.loads(out)
    assert payload[0] == {"D": 6, "d": 4, "query": "split", "status": "no-certificate",
                          "derivation": None, "checks": payload[0]["checks"]}


def test_json_file_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["run", str(MODELS / "two_charts.gk"), "--json", str(a), "--seed", "3"], capsys)
    run(["run", str(MODELS / "two_charts.gk"), "--json", str(b), "--seed", "3"], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_diagnostics_as_json(tmp_path, capsys):
    out = tmp_path / "diag.json"
    code, _, _ = run(["run", str(MODELS / "malformed.gk"), "--json", str(out)], capsys)
    assert code == 2
    diags = json.loads(out.read_text())["diagnostics"]
    assert diags[0]["code"] == "E302" and diags[0]["line"] == 2


def test_stdin(monkeypatch, capsys):
    monkeypatch.setattr(sys, "stdin", io.StringIO("ring p=1 q=2; relation x1^2 + t1*t2; reduce;"))
    code, out, _ = run(["run", "-"], capsys)
    assert code == 0 and "basis [1, x1]" in out


def test_max_degree_override(tmp_path, capsys):
    model = tmp_path / "m.gk"
    model.write_text("ring p=1 q=2; relation x1^2 + t1*t2; split;")
    code, out, _ = run(["run", str(model), "--max-degree", "6"], capsys)
    assert "D=6" in out


def test_missing_file(capsys):
    code, _, err = run(["run", "/nonexistent/model.gk"], capsys)
    assert code == 2 and "cannot read" in err


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["run"], ["run", "x", "--seed", "abc"]])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_negative_max_degree(capsys):
    code, _, _ = run(["run", str(MODELS / "nonsplit.gk"), "--max-degree", "-1"], capsys)
    assert code == 2


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "grassmann_kernel.cli", "run", str(MODELS / "two_charts.gk")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
