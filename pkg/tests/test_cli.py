import json
import subprocess
import sys

import pytest

from hyperlap import cli, fixtures, verify


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_kernel_row_matches_golden(capsys):
    code, out, _ = run(["kernel", "--space", "hn", "--n", "3", "--t", "1", "--r", "1"], capsys)
    assert code == 0
    header, row = out.strip().splitlines()
    assert header == "space,n,m,t,r,value"
    assert float(row.split(",")[-1]) == fixtures.get("golden")["value"]["K3(t=1,r=1)"]


def test_output_is_byte_identical(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert run(["green", "--n", "3,5", "--lam", "0,1", "--r", "0.5,2", "-o", str(p)], capsys)[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_json_format(capsys):
    code, out, _ = run(["volume", "--space", "hc", "--n", "2", "--r", "1", "--format", "json"], capsys)
    assert code == 0
    rows = json.loads(out)
    assert rows[0]["space"] == "hc" and rows[0]["value"] > 0


@pytest.mark.parametrize("argv", [
    ["kernel", "--space", "an", "--n", "1"],
    ["kernel", "--n", "x"],
    ["kernel", "--n", "3", "--t", "0"],
    ["green", "--n", "3", "--lam", "-5"],
    ["maximal", "--n", "4"],
    ["verify"],
    ["verify", "not-a-suite"],
    [],
])
def test_usage_errors_exit_one(argv, capsys):
    assert run(argv, capsys)[0] == 1


def test_config_validation(tmp_path, capsys):
    bad_key = tmp_path / "bad.json"
    bad_key.write_text(json.dumps({"command": "kernel", "bogus": 1}))
    assert run(["--config", str(bad_key)], capsys)[0] == 1
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert run(["kernel", "--config", str(broken)], capsys)[0] == 1
    wrong_type = tmp_path / "type.json"
    wrong_type.write_text(json.dumps({"command": "verify", "suite": "phi", "step": "small"}))
    assert run(["--config", str(wrong_type)], capsys)[0] == 1
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"command": "kernel", "n": 3, "t": [1.0], "r": [1.0]}))
    code, out, _ = run(["--config", str(good)], capsys)
    assert code == 0 and out.count("\n") == 2


def test_verify_list_and_alias(capsys):
    code, out, _ = run(["--list"], capsys)
    assert code == 0
    for name in verify.SUITES:
        assert name in out
    code, out, _ = run(["verify", "phi"], capsys)
    report = json.loads(out)
    assert code == 0 and report["pass"] and report["lemma"] == "phi-monotone"


def test_verify_failure_exits_two(tmp_path, capsys):
    cfg = tmp_path / "strict.json"
    # starting the limit check at s = 1e-3 leaves a deviation ~ s^2/12 above tol
    cfg.write_text(json.dumps({"command": "verify", "suite": "phi-monotone", "s_zero": 1e-3}))
    margins = tmp_path / "m.csv"
    code, out, _ = run(["--config", str(cfg), "--csv", str(margins)], capsys)
    assert code == 2
    assert json.loads(out)["pass"] is False
    assert margins.read_text().splitlines()[0].endswith("margin")


def test_maximal_summary(tmp_path, capsys):
    summary = tmp_path / "s.json"
    code, out, _ = run(["maximal", "--n", "2", "--p", "1.5,4", "--summary", str(summary)], capsys)
    assert code == 0
    data = json.loads(summary.read_text())
    assert data["p"]["1.5"]["below_budget"] is True
    assert len(out.strip().splitlines()) == 1 + 2 * 5


def test_suite_file_validation(tmp_path, capsys):
    f = tmp_path / "suite.json"
    f.write_text(json.dumps({"short": [1.0, 2.0]}))
    assert run(["maximal", "--suite", str(f)], capsys)[0] == 1


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "hyperlap.cli", "--list"], capture_output=True, text=True)
    assert out.returncode == 0 and "fbeta-quartic" in out.stdout


def test_verify_default_quartic_scan(capsys):
    code, out, _ = run(["verify", "lemma31"], capsys)
    assert code == 0 and json.loads(out)["pass"] is True


def test_malformed_config_message(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "verify", "suite": "phi", "unknown_knob": 3}))
    code, _, err = run(["--config", str(cfg)], capsys)
    assert code == 1 and "unknown_knob" in err
