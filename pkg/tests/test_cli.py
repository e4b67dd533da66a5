import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from carnot.cli import RunConfig, main
from carnot.io import ParseError, operator_to_dict

ROOT = Path(__file__).resolve().parent.parent
CONFIGS = ROOT / "configs"
GOLDEN = Path(__file__).resolve().parent / "golden"
REGEN = os.environ.get("CARNOT_REGEN_GOLDEN") == "1"

CASES = {
    "validate_heis": ["validate", "heis.json"],
    "bch_engel": ["bch", "engel.json", "--x", "1,0,0,0", "--y", "0,1,0,0"],
    "gbar_build_heis": ["gbar", "build", "heis.json"],
    "gbar_flatten_heis": ["gbar", "flatten", "heis.json", "--ell", "1,2,3", "--t", "3"],
    "op_example1_engel": ["op", "example1", "engel.json", "--s", "6"],
    "rep_criterion_heis": ["rep", "criterion", "heis.json", "--gamma", "3"],
    "index_fredholm_a2": ["index", "fredholm", "--builtin", "a2"],
    "osc_algebra_engel": ["osc", "algebra", "engel_frames.json", "--point", "1,2,3,4"],
    "pipeline_heis": ["pipeline", "heisenberg-demo.toml"],
}
EXIT = {"rep_criterion_heis": 2}


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def in_configs(monkeypatch):
    monkeypatch.chdir(CONFIGS)


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_reports(name, in_configs, capsys):
    code, out, _ = _run(CASES[name], capsys)
    assert code == EXIT.get(name, 0)
    path = GOLDEN / f"{name}.json"
    if REGEN:
        path.write_text(out)
    assert json.loads(out) == json.loads(path.read_text())
    assert out == path.read_text()


def test_reports_embed_schema_and_tolerances(in_configs, capsys):
    _, out, _ = _run(CASES["pipeline_heis"], capsys)
    rep = json.loads(out)
    assert rep["schema_version"] == 1
    assert rep["params"]["ladder"] == [8, 16, 32]
    assert rep["params"]["tol"] == 1e-6 and rep["params"]["rank_tol"] == 1e-8


def test_pipeline_is_byte_identical_across_processes():
    outs = []
    for threads in ("1", "4"):
        env = dict(os.environ, CARNOT_THREADS=threads)
        r = subprocess.run([sys.executable, "-m", "carnot.cli", "pipeline", "heisenberg-demo.toml"],
                           cwd=CONFIGS, capture_output=True, env=env, check=True)
        outs.append(r.stdout)
    assert outs[0] == outs[1]


def test_scan_exit_codes(in_configs, capsys):
    assert _run(["rep", "scan", "--operator", "gamma.json", "--gamma", "3", "--ladder", "8,16"], capsys)[0] == 2
    code, out, _ = _run(["rep", "scan", "--operator", "gamma.json", "--ladder", "8,16"], capsys)
    assert code == 0 and json.loads(out)["result"]["verdict"] == "satisfied"


def test_out_flag_writes_file(in_configs, capsys, tmp_path):
    target = tmp_path / "r.json"
    assert _run(["validate", "heis.json", "--out", str(target)], capsys)[0] == 0
    assert json.loads(target.read_text())["command"] == "validate"


def test_parse_error_exit(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dims": [2, 1], "brackets": [{"i": 0, "j": 1, "value": [{"k": 2, "coeff": "1/x"}]}]}))
    code, _, err = _run(["validate", str(bad)], capsys)
    assert code == 1
    assert str(bad) in err and "brackets[0].value[0].coeff" in err


def test_invalid_algebra_reports_violations(tmp_path, capsys):
    p = tmp_path / "j.json"
    p.write_text(json.dumps({"dims": [2, 1], "basis": ["X", "Y", "Z"],
                             "brackets": [{"i": "X", "j": "Y", "value": [{"k": "Y", "coeff": 1}]}]}))
    code, out, _ = _run(["validate", str(p)], capsys)
    # an algebra that fails validation is an input error, but the report still names the violation
    assert code == 1
    assert "grading" in out


def test_sharp_and_vanerp_commands(tmp_path, capsys):
    from carnot.cli import _vanerp_defaults

    D1, D2 = _vanerp_defaults()
    p1, p2 = tmp_path / "d1.json", tmp_path / "d2.json"
    p1.write_text(json.dumps(operator_to_dict(D1)))
    p2.write_text(json.dumps(operator_to_dict(D2)))
    code, out, _ = _run(["op", "sharp", str(p1), str(p2), "--c", "1"], capsys)
    assert code == 0 and json.loads(out)["command"] == "op sharp"
    code, out, _ = _run(["index", "vanerp", "--ladder", "8,12,16", "--decay-modes", "4,8,12",
                         "--decay-N", "32"], capsys)
    assert code in (0, 3)
    assert "decay" in json.loads(out)["result"]


@pytest.mark.parametrize("argv", [["index", "sf", "--seed", "3", "--dim", "6"], ["index", "winding", "--power", "-2"],
                                  ["dnc", "heis.json", "--t", "1/2"], ["op", "dirac", "heis.json", "--clifford", "pauli"]])
def test_misc_commands_succeed(argv, in_configs, capsys):
    assert _run(argv, capsys)[0] == 0


def test_run_config_rejects_unknown_fields(tmp_path):
    with pytest.raises(ParseError, match="colour"):
        RunConfig.from_dict({"command": "pipeline", "colour": "red"}, tmp_path / "c.toml")
    p = tmp_path / "c.toml"
    p.write_text('schema_version = 2\ncommand = "pipeline"\n')
    with pytest.raises(ParseError, match="schema_version"):
        RunConfig.load(p)


def test_usage_errors(capsys):
    assert _run(["index", "fredholm", "--builtin", "nope"], capsys)[0] == 1
