"""Scenario orchestration: configs, overrides, determinism, exit codes."""

import json
from pathlib import Path

import numpy as np
import pytest

from torusctl.cli import Scenario, apply_override, load_scenarios, main, run_scenario
from torusctl.errors import ConfigError


def _small_geometry():
    return {"dim": 2, "periods": [2 * np.pi, 2 * np.pi], "grid": [16, 16]}


def _read_json(path):
    return json.loads(Path(path).read_text())


def _strip_timestamp(path):
    data = _read_json(path)
    data.pop("created_at", None)
    return data


# -- scenario plumbing -------------------------------------------------------


def test_scenario_round_trip_identity():
    scenario = Scenario(
        kind="observability",
        seed=11,
        geometry=_small_geometry(),
        weight={"kind": "strip"},
        params={"lambda_max": 4.0},
    )
    again = Scenario.from_dict(scenario.to_dict())
    assert again == scenario
    assert Scenario.from_dict(again.to_dict()) == again


def test_unknown_parameter_rejected():
    with pytest.raises(ConfigError, match="unknown parameter"):
        Scenario(kind="observability", seed=1, params={"bogus": 1})


def test_missing_seed_rejected():
    with pytest.raises(ConfigError, match="seed"):
        Scenario.from_dict({"kind": "zygmund"})


def test_override_parsing():
    data = {"kind": "damp", "seed": 2}
    apply_override(data, "params.dt=0.25")
    apply_override(data, "weight.kind='disk'")
    apply_override(data, "name=trial")
    assert data["params"]["dt"] == 0.25
    assert data["weight"]["kind"] == "disk"
    assert data["name"] == "trial"
    with pytest.raises(ConfigError, match="key=value"):
        apply_override(data, "no_equals_sign")


def test_load_scenarios_from_toml(tmp_path):
    config = tmp_path / "s.toml"
    config.write_text(
        """
[[scenario]]
kind = "zygmund"
seed = 3
[scenario.params]
lambda_limit = 60

[[scenario]]
kind = "ingham"
seed = 4
"""
    )
    scenarios = load_scenarios(config)
    assert [s.kind for s in scenarios] == ["zygmund", "ingham"]
    assert scenarios[0].params["lambda_limit"] == 60


def test_toml_error_carries_position(tmp_path):
    config = tmp_path / "bad.toml"
    config.write_text("[scenario\nkind = 'x'")
    with pytest.raises(ConfigError, match="line"):
        load_scenarios(config)


# -- end-to-end runs ----------------------------------------------------------


def test_observability_run_and_determinism(tmp_path):
    scenario = Scenario(
        kind="observability",
        seed=7,
        geometry=_small_geometry(),
        params={"lambda_max": 4.0},
    )
    out1 = run_scenario(scenario, tmp_path / "a")
    out2 = run_scenario(scenario, tmp_path / "b")
    report = _read_json(out1 / "gramian.json")
    assert abs(report["observability_constant"] - 1.0) < 1e-9
    assert _strip_timestamp(out1 / "manifest.json") == _strip_timestamp(out2 / "manifest.json")
    assert (out1 / "gramian.json").read_text() == (out2 / "gramian.json").read_text()
    assert (out1 / "weight.tcf1").read_bytes() == (out2 / "weight.tcf1").read_bytes()


def test_zygmund_run_outputs_csv(tmp_path):
    scenario = Scenario(kind="zygmund", seed=5, params={"lambda_limit": 100, "trials": 5})
    out = run_scenario(scenario, tmp_path)
    lines = (out / "zygmund.csv").read_text().strip().splitlines()
    assert lines[0] == "lambda,circle_count,max_ratio"
    assert len(lines) > 1
    summary = _read_json(out / "zygmund.json")
    assert summary["within_bound"] is True


def test_damp_run(tmp_path):
    scenario = Scenario(
        kind="damp",
        seed=6,
        geometry=_small_geometry(),
        weight={"kind": "uniform"},
        params={"t_max": 1.0, "dt": 0.05, "state_lambda_max": 8.0},
    )
    out = run_scenario(scenario, tmp_path)
    decay = _read_json(out / "decay.json")
    assert abs(decay["rate"] - 1.0) < 1e-6  # uniform damping of strength 1
    header = (out / "decay.csv").read_text().splitlines()[0]
    assert header == "t,norm,energy_residual"


def test_control_run(tmp_path):
    scenario = Scenario(
        kind="control",
        seed=8,
        geometry=_small_geometry(),
        weight={"kind": "disk"},
        params={"lambda_max": 4.0, "nt": 64, "snapshots": 2},
    )
    out = run_scenario(scenario, tmp_path)
    control = _read_json(out / "control.json")
    assert control["forward_residual_subspace"] < 1e-6
    assert (out / "v0.tcf1").exists()
    lines = (out / "control.csv").read_text().splitlines()
    assert lines[0] == "t,u_norm,f_norm"
    assert len(lines) == 65  # one row per quadrature node
    values = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    assert np.all(np.isfinite(values)) and np.all(values[:, 1:] >= 0)


def test_density_and_directions_runs(tmp_path):
    density = run_scenario(
        Scenario(
            kind="density",
            seed=9,
            geometry=_small_geometry(),
            params={"tau": 0.5, "state_lambda_max": 8.0},
        ),
        tmp_path,
    )
    payload = _read_json(density / "density.json")
    assert payload["mass_identity_residual"] < 1e-10
    assert (density / "density.csv").read_text().splitlines()[0] == "x,y,density"

    directions = run_scenario(
        Scenario(
            kind="directions",
            seed=10,
            geometry=_small_geometry(),
            params={"state_lambda_max": 8.0, "m_max": 4},
        ),
        tmp_path,
    )
    rows = (directions / "directions.csv").read_text().splitlines()
    assert rows[0] == "p,q,mass"
    tails = (directions / "direction_tails.csv").read_text().splitlines()
    assert tails[0] == "m,tail_mass"


def test_ingham_run(tmp_path):
    scenario = Scenario(
        kind="ingham",
        seed=12,
        geometry=_small_geometry(),
        params={"lambda_cutoff": 20.0, "t_count": 5, "bound_lambda_cutoff": 5.0},
    )
    out = run_scenario(scenario, tmp_path)
    rows = (out / "ingham.csv").read_text().splitlines()
    assert rows[0] == "T,B"
    assert len(rows) == 6
    payload = _read_json(out / "ingham.json")
    assert payload["observability_bound"]["reciprocal_constant_lower_bound"] > 0


# -- entry point --------------------------------------------------------------


def test_main_run_exit_codes(tmp_path):
    config = tmp_path / "ok.toml"
    config.write_text(
        """
[scenario]
kind = "zygmund"
seed = 1
[scenario.params]
lambda_limit = 60
trials = 3
"""
    )
    assert main(["run", "--config", str(config), "--out", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "zygmund.csv").exists()


def test_main_config_error_exit_2(tmp_path):
    config = tmp_path / "bad.toml"
    config.write_text("[scenario]\nkind = 'nonsense'\nseed = 1\n")
    assert main(["run", "--config", str(config)]) == 2
    assert main(["run", "--config", str(tmp_path / "missing.toml")]) == 2


def test_main_numerical_failure_exit_3(tmp_path):
    config = tmp_path / "hard.toml"
    config.write_text(
        """
[scenario]
kind = "observability"
seed = 1
[scenario.geometry]
grid = [16, 16]
[scenario.weight]
kind = "disk"
[scenario.params]
lambda_max = 8.0
max_outer = 1
tol = 1e-14
"""
    )
    assert main(["run", "--config", str(config), "--out", str(tmp_path / "o")]) == 3


def test_main_sweep(tmp_path):
    config = tmp_path / "sweep.toml"
    config.write_text(
        """
[scenario]
kind = "observability"
seed = 2
[scenario.geometry]
grid = [16, 16]
[scenario.params]
lambda_values = [2.0, 4.0]
"""
    )
    out = tmp_path / "sweep_out"
    assert main(["sweep", "--config", str(config), "--out", str(out)]) == 0
    lines = (out / "ksweep.csv").read_text().splitlines()
    assert lines[0] == "lambda_max,dim,lambda_min,K,iters"
    assert len(lines) == 3


def test_main_parallel_scenarios(tmp_path):
    config = tmp_path / "multi.toml"
    config.write_text(
        """
[[scenario]]
kind = "zygmund"
seed = 1
name = "za"
[scenario.params]
lambda_limit = 60
trials = 2

[[scenario]]
kind = "zygmund"
seed = 2
name = "zb"
[scenario.params]
lambda_limit = 60
trials = 2
"""
    )
    out = tmp_path / "multi_out"
    assert main(["run", "--config", str(config), "--out", str(out), "--threads", "2"]) == 0
    assert (out / "za" / "zygmund.csv").exists()
    assert (out / "zb" / "zygmund.csv").exists()


def test_main_verify_runs_pytest(tmp_path):
    trivial = tmp_path / "test_trivial.py"
    trivial.write_text("def test_ok():\n    assert True\n")
    assert main(["verify", "--tests", str(trivial)]) == 0
    failing = tmp_path / "test_failing.py"
    failing.write_text("def test_no():\n    assert False\n")
    assert main(["verify", "--tests", str(failing)]) == 3
    assert main(["verify", "--tests", str(tmp_path / "nope.py")]) == 2


def test_explain_lists_defaults(capsys):
    assert main(["explain"]) == 0
    text = capsys.readouterr().out
    for kind in ("observability", "control", "damp", "zygmund", "ingham"):
        assert kind in text
    assert "fat_cantor" in text
