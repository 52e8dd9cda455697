import json

import numpy as np
import pytest

from cli.checks import OSC_EVOLUTION_RADIUS, REGISTRY, _with_example, select
from cli.commands import TRUNCATED_FLAG
from cli.main import EXIT_CHECKS_FAILED, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, main
from utils.config import EvolutionSettings, ScenarioConfig
from utils.datasets import read_dataset


def write_config(tmp_path, body: str) -> str:
    out = tmp_path / "out"
    text = body + f"""
[output]
potential = "{out / 'potential.csv'}"
propagator = "{out / 'propagator.csv'}"
evolve = "{out / 'evolve.csv'}"
evolve_summary = "{out / 'evolve_summary.json'}"
report = "{out / 'report.json'}"
"""
    path = tmp_path / "scenario.toml"
    path.write_text(text)
    return str(path)


def test_potential_is_reproducible(tmp_path):
    config = write_config(tmp_path, "[potential]\nx_min = -8.0\nx_max = 8.0\nn_points = 161\n")
    first, second = tmp_path / "first.csv", tmp_path / "second.csv"
    assert main(["potential", "--config", config, "--out", str(first)]) == EXIT_OK
    assert main(["potential", "--config", config, "--out", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    frame = read_dataset(str(first))
    assert list(frame.columns) == ["x", "re_v", "im_v"]
    assert len(frame) == 161
    assert frame["re_v"].iloc[-1] == pytest.approx(16.0 - 1.0, abs=1e-8)


def test_propagator_lattice(tmp_path):
    config = write_config(tmp_path, """
[lattice]
x = [-0.5, 0.0, 0.5]
y = [0.2, -0.4]
t = [0.7]

[methods]
propagator = ["ClosedForm", "SpectralSum"]
""")
    assert main(["propagator", "--config", config, "--threads", "2"]) == EXIT_OK
    frame = read_dataset(str(tmp_path / "out" / "propagator.csv"))
    assert len(frame) == 3 * 2 * 2
    assert list(frame.columns) == ["x", "y", "t", "method", "re_k", "im_k", "err_est", "flag"]
    ordered = frame.sort_values(["x", "y", "t", "method"], kind="mergesort").reset_index(drop=True)
    assert frame.equals(ordered)
    assert np.isfinite(frame["re_k"]).all()
    closed = frame[frame["method"] == "ClosedForm"]
    assert (closed["flag"] == "").all() and np.isfinite(closed["err_est"]).all()


def test_truncated_spectral_rows_are_flagged(tmp_path):
    config = write_config(tmp_path, """
[lattice]
x = [-0.3, 0.3]
y = [0.7]
t = [0.7]

[methods]
propagator = ["SpectralSum"]
spectral_terms = 16
""")
    assert main(["propagator", "--config", config]) == EXIT_OK
    frame = read_dataset(str(tmp_path / "out" / "propagator.csv"))
    assert (frame["flag"] == TRUNCATED_FLAG).all()
    assert frame["err_est"].isna().all()
    assert np.isfinite(frame["re_k"]).all() and np.isfinite(frame["im_k"]).all()


def test_propagator_flags_singular_points(tmp_path):
    config = write_config(tmp_path, """
[scenario]
example = "soliton"

[lattice]
x = [-0.5, 0.0, 0.5]
y = [0.1]
t = [0.0, 0.5]

[methods]
propagator = ["ClosedForm"]
""")
    assert main(["propagator", "--config", config]) == EXIT_OK
    frame = read_dataset(str(tmp_path / "out" / "propagator.csv"))
    flagged = frame[frame["t"] == 0.0]
    assert len(flagged) == 3
    assert (flagged["flag"] == "singular_time").all()
    assert flagged["re_k"].isna().all()
    assert (frame[frame["t"] == 0.5]["flag"] == "").all()


def test_evolve_methods_agree(tmp_path):
    config = write_config(tmp_path, """
[methods]
evolve = ["ClosedForm", "SpectralSum", "OracleCN"]

[evolution]
x_min = -12.0
x_max = 12.0
spacing = 0.2
t = 0.7
dt = 1e-3
cn_refine = 4
""")
    out = tmp_path / "custom" / "states.csv"
    assert main(["evolve", "--config", config, "--out", str(out)]) == EXIT_OK
    frame = read_dataset(str(out))
    assert len(frame) == 3 * 121
    assert set(frame["method"]) == {"ClosedForm", "SpectralSum", "OracleCN"}
    assert not (tmp_path / "out" / "evolve_summary.json").exists()
    summary = json.loads((tmp_path / "custom" / "states_summary.json").read_text())
    assert summary["max_pairwise_rel_l2"] < 1e-3
    assert len(summary["pairwise"]) == 3


def test_malformed_config_writes_nothing(tmp_path):
    path = tmp_path / "broken.toml"
    path.write_text("[scenario\nexample = 1\n")
    out = tmp_path / "potential.csv"
    assert main(["potential", "--config", str(path), "--out", str(out)]) == EXIT_CONFIG
    assert not out.exists()


def test_numerical_errors_exit_nonzero(tmp_path):
    config = write_config(tmp_path, "[oscillator]\nc_re = 2.0\nc_im = 0.0\n")
    assert main(["potential", "--config", config]) == EXIT_NUMERICAL
    assert not (tmp_path / "out" / "potential.csv").exists()


def test_verify_subset(tmp_path):
    config = write_config(tmp_path, "")
    assert main(["verify", "--config", config, "--pattern", "specfun.*", "--seed", "11"]) == EXIT_OK
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["all_pass"] and report["seed"] == 11
    assert {check["name"] for check in report["checks"]} == {c.name for c in select("specfun.*")}
    assert all(set(check) >= {"name", "metric", "tolerance", "pass", "seconds"} for check in report["checks"])


def test_verify_fails_on_tightened_tolerance(tmp_path):
    config = write_config(tmp_path, '[verify]\ntolerances = { "model.green_jump" = 1e-20 }\n')
    assert main(["verify", "--config", config, "--pattern", "model.green_jump"]) == EXIT_CHECKS_FAILED
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert not report["all_pass"]
    assert report["checks"][0]["tolerance"] == 1e-20


def test_check_names_are_unique():
    names = [c.name for c in REGISTRY]
    assert len(names) == len(set(names))
    assert len(select("oracle.*")) == 6


def test_cn_checks_pass_on_defaults(tmp_path):
    config = write_config(tmp_path, "")
    assert main(["verify", "--config", config, "--pattern", "oracle.cn_[ct]*"]) == EXIT_OK
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert {check["name"] for check in report["checks"]} == {"oracle.cn_coefficient_moduli", "oracle.cn_time_order"}
    assert report["all_pass"]


def test_three_way_domain_covers_packet_tails():
    narrow = ScenarioConfig(evolution=EvolutionSettings(x_min=-10.0, x_max=10.0))
    widened = _with_example(narrow, "oscillator").evolution
    assert (widened.x_min, widened.x_max) == (-OSC_EVOLUTION_RADIUS, OSC_EVOLUTION_RADIUS)
    assert ScenarioConfig().evolution.x_max >= OSC_EVOLUTION_RADIUS
