import json
import os

import numpy as np
import pandas as pd
import pytest

from utils.config import ScenarioConfig, load_config, parse_config
from utils.datasets import PROPAGATOR_COLUMNS, complex_columns, read_dataset, write_dataset, write_json
from utils.errors import ConfigError
from utils.report import VerificationReport, config_digest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SCENARIOS = os.path.join(ROOT, "data", "scenarios")


# ### configuration


def test_defaults_without_a_file():
    cfg = load_config()
    assert cfg == ScenarioConfig()
    assert cfg.oscillator.C == 2j
    assert cfg.quadrature.abs_tol == 1e-10


@pytest.mark.parametrize("name", ["oscillator.toml", "soliton.toml"])
def test_shipped_scenarios_load(name):
    cfg = load_config(os.path.join(SCENARIOS, name))
    assert cfg.example == name.split(".")[0]
    assert all(method in ("TheoremQuad", "ClosedForm", "SpectralSum") for method in cfg.methods.propagator)


def test_sections_and_overrides():
    document = {
        "scenario": {"example": "soliton", "threads": 2},
        "soliton": {"a": 1, "b": 3},
        "lattice": {"x": [0, 1], "y": [0.5], "t": [0.2]},
        "quadrature": {"truncation_radius": 20},
        "verify": {"tolerances": {"kernel.symmetry": 1e-9}},
    }
    cfg = parse_config(document, {"threads": 8, "seed": None, "pattern": "kernel.*"})
    assert cfg.threads == 8 and cfg.seed == ScenarioConfig().seed
    assert cfg.soliton.a == 1.0 and isinstance(cfg.soliton.a, float)
    assert cfg.lattice.x == (0.0, 1.0)
    assert cfg.quadrature.truncation_radius == 20.0
    assert cfg.verify.pattern == "kernel.*"
    assert cfg.verify.tolerances == {"kernel.symmetry": 1e-9}


@pytest.mark.parametrize(
    "document, field",
    [
        ({"scenario": {"example": "kepler"}}, "scenario.example"),
        ({"scenario": {"colour": 1}}, "scenario.colour"),
        ({"oscillator": {"c_im": "two"}}, "oscillator.c_im"),
        ({"methods": {"propagator": ["Euler"]}}, "methods.propagator"),
        ({"lattice": {"x": 1.0}}, "lattice.x"),
        ({"quadrature": {"abs_tol": -1.0}}, "quadrature"),
        ({"plots": {}}, "plots"),
    ],
)
def test_invalid_documents_name_the_field(document, field):
    with pytest.raises(ConfigError) as info:
        parse_config(document)
    assert info.value.field == field
    assert f"field '{field}'" in str(info.value)


def test_malformed_toml_reports_the_line(tmp_path):
    path = tmp_path / "broken.toml"
    path.write_text('[scenario]\nexample = "oscillator"\nthreads = \n')
    with pytest.raises(ConfigError) as info:
        load_config(str(path))
    assert info.value.line == 3


def test_missing_file():
    with pytest.raises(ConfigError, match="not found"):
        load_config("/nonexistent/scenario.toml")


def test_digest_ignores_key_order():
    cfg = ScenarioConfig().to_dict()
    shuffled = dict(reversed(list(cfg.items())))
    assert config_digest(cfg) == config_digest(shuffled)
    assert config_digest(cfg) != config_digest({**cfg, "seed": 1})


# ### datasets


def test_dataset_round_trip_is_exact(tmp_path):
    rng = np.random.default_rng(3)
    values = rng.normal(size=6) * 10.0 ** rng.integers(-12, 12, 6) + 1j * rng.normal(size=6) / 3.0
    frame = pd.DataFrame({
        "x": np.linspace(-1, 1, 6) / 3.0,
        "y": 0.1,
        "t": 0.7,
        "method": "ClosedForm",
        **complex_columns(values, "k"),
        "err_est": 1e-11,
        "flag": "",
    })
    frame.loc[2, ["re_k", "im_k", "err_est"]] = np.nan
    frame.loc[2, "flag"] = "singular_time"
    path = tmp_path / "propagator.csv"
    write_dataset(frame, str(path), PROPAGATOR_COLUMNS)
    reloaded = read_dataset(str(path))
    pd.testing.assert_frame_equal(reloaded, frame.loc[:, list(PROPAGATOR_COLUMNS)], check_exact=True)
    assert os.listdir(tmp_path) == ["propagator.csv"]


def test_write_dataset_requires_columns(tmp_path):
    with pytest.raises(ValueError, match="missing columns"):
        write_dataset(pd.DataFrame({"x": [1.0]}), str(tmp_path / "p.csv"), ("x", "re_v", "im_v"))
    assert not os.listdir(tmp_path)


def test_write_json_creates_directories(tmp_path):
    path = tmp_path / "nested" / "summary.json"
    write_json({"all_pass": True}, str(path))
    assert json.loads(path.read_text()) == {"all_pass": True}


# ### reports


def test_verification_report_document():
    report = VerificationReport("1.0.0", ScenarioConfig().to_dict(), seed=5)
    report.record("a.first", 1e-9, 1e-6, True, 0.01)
    report.record("a.second", float("nan"), 1e-6, False, 0.02, "ValueError: boom")
    document = report.to_document()
    assert not report.all_pass
    assert report.summary() == {"total": 2, "passed": 1, "failed": 1}
    assert [failure.name for failure in report.failures()] == ["a.second"]
    assert set(document) == {"version", "config_digest", "seed", "all_pass", "checks"}
    first, second = document["checks"]
    assert first == {"name": "a.first", "metric": 1e-9, "tolerance": 1e-6, "pass": True, "seconds": 0.01}
    assert second["metric"] == "nan" and second["detail"] == "ValueError: boom"
    json.dumps(document)
