import json
import tempfile
import unittest
from pathlib import Path

import pytest

from src.config.config import (
    CONFIGS,
    ExperimentConfigLoader,
    SettingsLoader,
    ToleranceConfig,
    parse_experiment,
    preset_path,
)
from src.core.operators import KernelSpec
from src.core.young import Power


def test_parse_minimal_experiment():
    config = parse_experiment({"properties": ["HOLDER_BALL"]})
    assert config.name == "experiment"
    assert config.window.levels == [64, 128, 256]
    assert config.kernel is None
    assert config.tolerances.stability == pytest.approx(0.05)


def test_parse_full_experiment():
    config = parse_experiment(
        {
            "name": "full",
            "properties": ["COMM_BOUND_CZ"],
            "window": {"n": 1, "L": 2.0, "levels": [32, 64]},
            "young": {"Phi": {"family": "Power", "params": {"p": 3.0}}},
            "growth": {"vp": {"family": "PowerNeg", "params": {"lam": 1.0}}},
            "kernel": {"kind": "Hilbert"},
            "operator": "commT",
            "bank": {"seed": 9, "fields": [{"family": "Indicator", "params": {"radius": 1.0}}]},
            "balls": {"stride": 2},
            "tolerances": {"stability": 0.2},
            "params": {"holder_pairs": 3},
        }
    )
    assert config.young["Phi"].to_dict() == Power(3.0).to_dict()
    assert config.kernel == KernelSpec("Hilbert")
    assert config.seed == 9
    assert len(config.bank.fields) == 1
    assert config.balls.stride == 2
    assert config.tolerances.stability == pytest.approx(0.2)
    assert config.params == {"holder_pairs": 3}


@pytest.mark.parametrize(
    "data, message",
    [
        ({}, "lists no properties"),
        ({"properties": "HOLDER_BALL"}, "lists no properties"),
        ({"properties": ["X"], "window": {"levels": [48]}}, "powers of two"),
        ({"properties": ["X"], "window": {"levels": [128, 64]}}, "ascending"),
        ({"properties": ["X"], "kernel": {"kind": "Riesz", "j": 1}}, "needs n=2"),
        ({"properties": ["X"], "operator": "Fourier"}, "Unknown operator"),
        ({"properties": ["X"], "young": {"Chi": {"family": "Power", "params": {"p": 2}}}}, "Unknown Young function slot"),
        ({"properties": ["X"], "growth": {"nu": {"family": "Constant", "params": {"c": 1}}}}, "Unknown growth function slot"),
        ({"properties": ["X"], "balls": {"stride": 3}}, "stride"),
        ({"properties": ["X"], "bank": {"fields": []}}, "empty"),
        ({"properties": ["X"], "tolerances": {"wobble": 1.0}}, "Unknown tolerance"),
    ],
)
def test_parse_experiment_rejects(data, message):
    with pytest.raises(ValueError, match=message):
        parse_experiment(data)


def test_parse_experiment_rejects_non_mapping():
    with pytest.raises(ValueError, match="mapping"):
        parse_experiment(["HOLDER_BALL"])


def test_with_seed_leaves_original_untouched():
    config = parse_experiment({"properties": ["HOLDER_BALL"]})
    reseeded = config.with_seed(42)
    assert reseeded.seed == 42
    assert config.seed == 0


def test_to_dict_reparses():
    config = CONFIGS.load(str(preset_path("chanillo")))
    again = parse_experiment(config.to_dict())
    assert again.to_dict() == config.to_dict()


@pytest.mark.parametrize("name", ["morrey-bmo", "chanillo", "smoke-2d.json"])
def test_presets_load(name):
    config = ExperimentConfigLoader().load(str(preset_path(name)))
    assert config.properties


def test_preset_missing():
    with pytest.raises(FileNotFoundError):
        preset_path("nope")


class TestExperimentConfigLoader(unittest.TestCase):
    def test_missing_file(self):
        with self.assertRaises(FileNotFoundError):
            ExperimentConfigLoader().load("/nonexistent/experiment.json")

    def test_name_defaults_to_file_stem(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "sweep.yaml"
            path.write_text("properties: [HOLDER_BALL]\nwindow:\n  levels: [32]\n")
            loader = ExperimentConfigLoader()
            config = loader.load(str(path))
            self.assertEqual(config.name, "sweep")
            self.assertIs(loader.load(str(path)), config)

    def test_json_config(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "run.json"
            path.write_text(json.dumps({"name": "named", "properties": ["L2_BOUND"]}))
            self.assertEqual(ExperimentConfigLoader().load(str(path)).name, "named")


class TestSettingsLoader(unittest.TestCase):
    def test_defaults_shipped(self):
        settings = SettingsLoader()
        self.assertEqual(settings.get("constants", "eta"), 2.0)
        self.assertEqual(settings.get("grids", "r_exponents"), [-20, 20])
        self.assertIsNone(settings.get("constants", "missing"))

    def test_missing_settings_file(self):
        with self.assertRaises(FileNotFoundError):
            SettingsLoader("/nonexistent/defaults.yaml").section("grids")

    def test_tolerance_overrides(self):
        tolerances = ToleranceConfig.from_settings({"cap": 10})
        self.assertEqual(tolerances.cap, 10.0)
        self.assertEqual(tolerances.commutator_stability, 0.10)
