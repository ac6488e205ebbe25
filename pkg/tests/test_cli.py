import json
import math

import pytest

from herzlab.cli import ConfigError, RunConfig, main


def _write(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def _report(out):
    return json.loads((out / "report.json").read_text())


def test_solve_constant_ode(tmp_path):
    out = tmp_path / "solve"
    cfg = {
        "command": "solve",
        "grid": {"dim": 1, "halfwidth": math.pi, "points_per_axis": 16},
        "params": {"p": 2, "q": 2, "alpha": 0, "s": 0, "beta": 2},
        "field": {"generator": "constant", "value": 1.0},
        "nonlinearity": {"name": "power", "mu": 2},
        "solver": {"T": 0.9, "steps": 512, "monitor_norm": False},
    }
    assert main(["--config", _write(tmp_path, cfg), "--output", str(out)]) == 0
    rep = _report(out)
    assert rep["status"] == "completed"
    assert abs(rep["result"]["final_norm"] - 10.0) / 10.0 <= 0.03
    assert (out / "trajectory.csv").exists()


def test_norm_of_zero_and_breakdown(tmp_path):
    out = tmp_path / "norm"
    cfg = {"command": "norm", "field": {"generator": "zero"}, "output_dir": str(out)}
    assert main(["--config", _write(tmp_path, cfg)]) == 0
    rep = _report(out)
    assert rep["result"]["ktl_norm"] == 0.0
    assert "k_min" in rep["config"]["params"] and "j_max" in rep["config"]
    assert (out / "breakdown.csv").exists()


def test_decompose_and_heat(tmp_path):
    out = tmp_path / "dec"
    cfg = {
        "command": "decompose",
        "grid": {"dim": 1, "halfwidth": 16.0, "points_per_axis": 256},
        "field": {"generator": "gaussian"},
        "output_dir": str(out),
    }
    assert main(["--config", _write(tmp_path, cfg)]) == 0
    assert _report(out)["result"]["reconstruction_rel_err"] <= 1e-10
    assert (out / "levels.csv").exists() and (out / "multipliers.csv").exists()
    out2 = tmp_path / "heat"
    cfg = {"command": "heat", "heat": {"times": [0, 0.1]}, "output_dir": str(out2)}
    assert main(["--config", _write(tmp_path, cfg, "h.json")]) == 0
    assert len((out2 / "heat.csv").read_text().splitlines()) == 3


def _hardy_cfg(out):
    return {
        "command": "verify",
        "check": {"name": "hardy_sequences", "lengths": [8, 16, 32], "a_values": [0.5], "q_values": [1], "trials": 10},
        "output_dir": str(out),
    }


def test_verify_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["--config", _write(tmp_path, _hardy_cfg(a), "a.json")])
    main(["--config", _write(tmp_path, _hardy_cfg(b), "b.json")])
    ra, rb = _report(a), _report(b)
    assert ra["result"] == rb["result"]
    assert ra["status"] in ("pass", "fail", "inconclusive")
    assert (a / "hardy_sequences_points.csv").exists()


def test_failing_check_exits_one(tmp_path):
    out = tmp_path / "f"
    cfg = _hardy_cfg(out)
    cfg["check"].update(a_values=[0.75], q_values=[0.5], lengths=[8, 16, 32, 64], trials=100)
    code = main(["--config", _write(tmp_path, cfg)])
    assert code == (0 if _report(out)["status"] == "pass" else 1)


def test_seed_override(tmp_path):
    out = tmp_path / "s"
    cfg = {"command": "norm", "field": {"generator": "random_band_weighted", "s": 0.5}, "output_dir": str(out)}
    path = _write(tmp_path, cfg)
    main(["--config", path, "--seed", "5"])
    r5 = _report(out)
    main(["--config", path, "--seed", "6"])
    r6 = _report(out)
    assert r5["config"]["seed"] == 5 and r6["config"]["seed"] == 6
    assert r5["result"]["ktl_norm"] != r6["result"]["ktl_norm"]


@pytest.mark.parametrize(
    "cfg",
    [
        {"command": "bogus"},
        {"command": "verify", "check": {"name": "nope"}},
        {"command": "norm", "unknown_key": 1},
        {"command": "norm", "params": {"p": 0}},
        {"command": "solve"},
    ],
)
def test_config_errors_exit_two(tmp_path, cfg):
    cfg = {**cfg, "output_dir": str(tmp_path / "o")}
    assert main(["--config", _write(tmp_path, cfg)]) == 2


def test_missing_file_exit_two(tmp_path):
    assert main(["--config", str(tmp_path / "missing.json")]) == 2


def test_runconfig_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"command": "norm", "colour": "red"})
