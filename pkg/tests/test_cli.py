import json
import subprocess
import sys

import pytest

from contractforge import config
from contractforge.cli import main
from contractforge.contract_io import save_contract
from contractforge.contracts import new_contract


@pytest.fixture
def contract_files(tmp_path):
    c1 = new_contract(["i"], ["o"], ["|i| <= 2"], ["o - i <= 0", "i - 2o <= 2"])
    c2 = new_contract(["o"], ["o_p"], ["o <= 0.2", "-o <= 1"], ["o_p - o <= 0"])
    c1n = new_contract(["i"], ["o"], ["|i| <= 2"], ["|o| <= 3"])
    paths = {}
    for name, c in (("c1", c1), ("c2", c2), ("c1n", c1n)):
        paths[name] = tmp_path / f"{name}.json"
        save_contract(c, paths[name])
    return paths


def test_compose_golden_block(contract_files, tmp_path, capsys):
    out = tmp_path / "sys.json"
    code = main(["compose", str(contract_files["c1"]), str(contract_files["c2"]), "-o", str(out)])
    assert code == 0
    text = capsys.readouterr().out
    assert "InVars: [i]" in text
    assert "OutVars:[o_p]" in text
    assert "i <= 0.2" in text
    assert "-0.5 i <= 0" in text
    assert "-i + o_p <= 0" in text
    data = json.loads(out.read_text())
    assert data["input_vars"] == ["i"]
    assert data["output_vars"] == ["o_p"]


def test_compose_incompatible_exit_code(contract_files, capsys):
    code = main(["compose", str(contract_files["c1n"]), str(contract_files["c2"])])
    assert code == 2
    err = capsys.readouterr().err
    assert err.startswith("Could not eliminate variables")


def test_bounds_infeasible_exit(tmp_path, capsys):
    bad = new_contract(["u"], ["x"], [], ["x <= 0", "-x <= -1"])
    path = tmp_path / "bad.json"
    save_contract(bad, path)
    code = main(["bounds", str(path), "--var", "x"])
    assert code == 1
    assert "infeasible region" in capsys.readouterr().err


def test_bounds_and_optimize(contract_files, tmp_path, capsys):
    sys_path = tmp_path / "sys.json"
    main(["compose", str(contract_files["c1"]), str(contract_files["c2"]), "-o", str(sys_path)])
    capsys.readouterr()

    assert main(["bounds", str(sys_path), "--var", "o_p"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["upper"] == pytest.approx(0.2, abs=1e-6)
    assert payload["lower"] == float("-inf")

    assert main(["optimize", str(sys_path), "--expr", "i", "--max"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["value"] == pytest.approx(0.2, abs=1e-6)


def test_refines_subcommand(contract_files, tmp_path, capsys):
    sys_path = tmp_path / "sys.json"
    main(["compose", str(contract_files["c1"]), str(contract_files["c2"]), "-o", str(sys_path)])
    weaker = new_contract(["i"], ["o_p"], ["i <= 0.1", "-i <= 0"], ["o_p - i <= 1"])
    weaker_path = tmp_path / "weaker.json"
    save_contract(weaker, weaker_path)
    capsys.readouterr()
    assert main(["refines", str(sys_path), str(weaker_path)]) == 0
    assert json.loads(capsys.readouterr().out)["refines"] is True


def test_quotient_and_merge_subcommands(tmp_path, capsys):
    top = new_contract(["i"], ["o_p"], ["|i| <= 1"], ["o_p - 2i = 1"])
    part = new_contract(["i"], ["o"], ["|i| <= 2"], ["o - 2i = 0"])
    f1, f2 = tmp_path / "top.json", tmp_path / "part.json"
    save_contract(top, f1)
    save_contract(part, f2)
    assert main(["quotient", str(f1), str(f2)]) == 0
    text = capsys.readouterr().out
    assert "|o| <= 2" in text
    assert "-o + o_p = 1" in text

    f3, f4 = tmp_path / "f.json", tmp_path / "p.json"
    save_contract(new_contract(["i"], ["o"], ["|i| <= 2"], ["o - 2i = 1"]), f3)
    save_contract(new_contract(["temp"], ["P"], ["temp <= 90"], ["P <= 2.1"]), f4)
    assert main(["merge", str(f3), str(f4)]) == 0
    text = capsys.readouterr().out
    assert "temp <= 90" in text and "P <= 2.1" in text


def test_parse_error_exit(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text(json.dumps({
        "input_vars": ["i"], "output_vars": ["o"],
        "assumptions": ["i <= ??"], "guarantees": [],
    }))
    other = tmp_path / "other.json"
    save_contract(new_contract(["o"], ["p"], [], []), other)
    assert main(["compose", str(path), str(other)]) == 1
    assert "error" in capsys.readouterr().err


def test_tolerance_env_override(contract_files, monkeypatch, capsys):
    monkeypatch.setenv(config.ENV_VAR, "1e-5")
    try:
        assert main(["compose", str(contract_files["c1"]), str(contract_files["c2"])]) == 0
        assert config.get_tolerance() == 1e-5
    finally:
        config.set_tolerance(config.DEFAULT_TOLERANCE)


def test_mission_sweep_golden_stability(tmp_path, capsys):
    cfg = {"sequence": ["DSN", "CHRG"], "n_scenarios": 3, "n_requirements": 3, "seed": 4}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    assert main(["mission", "sweep", str(cfg_path), "--out", str(tmp_path / "run1")]) == 0
    assert main(["mission", "sweep", str(cfg_path), "--out", str(tmp_path / "run2")]) == 0
    capsys.readouterr()
    a = (tmp_path / "run1" / "results.csv").read_bytes()
    b = (tmp_path / "run2" / "results.csv").read_bytes()
    assert a == b


def test_aircraft_explore_smoke(tmp_path, capsys):
    cfg = {"altitudes": [10], "thrusts": [10000], "mdot_in": [16, 32],
           "mdot_a": [0.4], "hx": "controlled"}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    assert main(["aircraft", "explore", str(cfg_path), "--out", str(tmp_path / "air")]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["instances"] == 2
    assert (tmp_path / "air" / "explore.csv").exists()


def test_aircraft_optimize_smoke(tmp_path, capsys):
    cfg = {"instance": {"alt": 10, "thrust": 10000, "mdot_in": 32, "mdot_a": 0.4,
                        "hx": "controlled"}, "max_iter": 5}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    assert main(["aircraft", "optimize", str(cfg_path), "--out", str(tmp_path / "opt.json")]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["final_cost"] <= payload["start_cost"]
    assert (tmp_path / "opt.json").exists()


def test_usage_error_exit_code():
    assert main(["no-such-command"]) == 1


def test_console_script_entry(contract_files, tmp_path):
    # one end-to-end subprocess check through the installed entry point
    result = subprocess.run(
        [sys.executable, "-m", "contractforge.cli", "compose",
         str(contract_files["c1"]), str(contract_files["c2"])],
        capture_output=True, text=True)
    assert result.returncode == 0
    assert "-i + o_p <= 0" in result.stdout
