import json
import math
import unittest
from unittest import mock

import numpy as np
import pytest

from src.config.config import parse_experiment
from src.core.fields import Indicator, PowerSingular, RandomStep, SampledField, Window, ball_family, zero_field
from src.core.growth import PowerNeg, PowerPos
from src.core.quadrature import NonConvergenceError
from src.core.reports import PropertyReport
from src.core.young import Power
from src.harness import CATALOG, exit_code, run_experiment, run_property
from src.harness.bank import build_bank, default_b_specs, entry_name
from src.harness.base import PROPERTY_REGISTRY, CheckOutcome, PropertyContext, Worst, get_property
from src.harness.catalog import in_catalog_order, validate_names
from src.harness.commutator_checks import decay_rungs, mean_decay_ratio, spot_skipped
from src.harness.empirical import NormSpec, empirical_norm
from src.harness.engine import VERDICTS, relative_change, witness_id
from src.harness.operator_checks import dyadic_modular_constant, modular_constant


def make_config(properties, levels=(64,), **extra):
    return parse_experiment({"name": "t", "properties": list(properties), "window": {"levels": list(levels)}, **extra})


def test_worst_maps_nan_to_infinity():
    worst = Worst()
    worst.update(1.0, {"a": 1})
    worst.update(math.nan, {"a": 2})
    assert math.isinf(worst.value)
    assert worst.witness == {"a": 2}


def test_worst_update_array_keeps_argmax():
    worst = Worst()
    worst.update_array(np.array([0.5, 3.0, 1.0]), lambda i: {"i": i})
    assert worst.value == 3.0
    assert worst.witness == {"i": 1}
    assert not worst.outcome(2.0).holds


def test_empty_worst_reports_zero():
    outcome = Worst().outcome(1.0)
    assert outcome.holds
    assert outcome.worst_ratio == 0.0


class TestEmpiricalNorm(unittest.TestCase):
    def setUp(self):
        self.window = Window(1, 4.0, 32)
        self.balls = ball_family(self.window)
        self.bank = build_bank(self.window, [Indicator(1.0), RandomStep(3)])
        self.norm = NormSpec("om", Power(2.0), PowerNeg(1.0))

    def test_identity_has_norm_one(self):
        report = empirical_norm(lambda f: f, self.bank, self.norm, self.norm, self.balls)
        self.assertAlmostEqual(report.ratio, 1.0)
        self.assertEqual(set(report.ratios), {entry.name for entry in self.bank})

    def test_scaling_by_two(self):
        report = empirical_norm(lambda f: f * 2.0, self.bank, self.norm, self.norm, self.balls)
        self.assertAlmostEqual(report.ratio, 2.0)

    def test_empty_bank(self):
        with self.assertRaises(ValueError):
            empirical_norm(lambda f: f, [], self.norm, self.norm, self.balls)

    def test_bad_norm_kind(self):
        with self.assertRaises(ValueError):
            NormSpec("sobolev", Power(2.0), PowerNeg(1.0))

    def test_om_needs_young_function(self):
        with self.assertRaises(ValueError):
            NormSpec("om")


def test_entry_names_are_readable():
    assert entry_name(Indicator(1.0)).startswith("Indicator(")


def test_default_b_bank_follows_psi_exponent():
    specs = default_b_specs(PowerPos(0.25))
    assert specs[-1].to_dict()["params"]["beta"] == 0.25


def test_dyadic_modular_constant():
    assert dyadic_modular_constant(2.0, 1) == pytest.approx(2056.0)


def test_modular_constant_closed_form():
    magnitude = np.array([1.0, 1.0])
    assert modular_constant(Power(2.0), magnitude, 2.0) == 1.0
    assert modular_constant(Power(2.0), magnitude, 8.0) == pytest.approx(2.0)


def test_relative_change():
    assert relative_change(2.0, 2.0) == 0.0
    assert relative_change(1.0, 2.0) == pytest.approx(0.5)
    assert math.isinf(relative_change(1.0, math.inf))


def test_witness_id_prefers_field():
    assert witness_id({"field": "Indicator(radius=1.0)", "N": 64}) == "Indicator(radius=1.0)"
    assert witness_id(None) == ""
    assert witness_id({"N": 64}) == ""


def test_catalog_matches_registry():
    assert set(CATALOG) == set(PROPERTY_REGISTRY)
    assert len(CATALOG) == len(set(CATALOG))


def test_catalog_order():
    assert in_catalog_order(["L2_BOUND", "HOLDER_BALL"]) == ["HOLDER_BALL", "L2_BOUND"]


def test_validate_names_rejects_unknown():
    with pytest.raises(ValueError, match="Unknown property"):
        validate_names(["HOLDER_BALL", "NOPE"])


def test_get_property_unknown():
    with pytest.raises(ValueError):
        get_property("NOPE")


def test_inverse_sandwich_passes_once():
    report = run_property("INVERSE_SANDWICH", make_config(["INVERSE_SANDWICH"], levels=(64, 128)))
    assert report.verdict == "pass"
    # grid-independent identities run at the first level only
    assert set(report.trend) <= {64}


def test_holder_ball_passes():
    config = make_config(["HOLDER_BALL"], params={"holder_pairs": 2})
    report = run_property("HOLDER_BALL", config)
    assert report.verdict == "pass"
    assert report.worst_ratio <= 2.0 * (1 + 1e-9)


class TestVerdicts(unittest.TestCase):
    def setUp(self):
        self.config = make_config(["L2_BOUND"], levels=(64, 128))
        self.check = PROPERTY_REGISTRY["L2_BOUND"]

    def test_drifting_constant_is_unstable(self):
        outcomes = [CheckOutcome(True, 1.0, {"kernel": "H"}), CheckOutcome(True, 2.0, {"kernel": "H"})]
        with mock.patch.object(self.check, "check", side_effect=outcomes):
            report = run_property("L2_BOUND", self.config)
        self.assertEqual(report.verdict, "unstable")
        self.assertIn(report.verdict, VERDICTS)
        self.assertEqual(report.witness["N"], 128)
        self.assertIn("stability", report.details)

    def test_settled_constant_passes(self):
        outcomes = [CheckOutcome(True, 1.0, {"kernel": "H"}), CheckOutcome(True, 1.01, {"kernel": "H"})]
        with mock.patch.object(self.check, "check", side_effect=outcomes):
            report = run_property("L2_BOUND", self.config)
        self.assertEqual(report.verdict, "pass")
        self.assertEqual(report.worst_ratio, 1.01)

    def test_failure_stops_refinement(self):
        outcomes = [CheckOutcome(False, 5.0, {"field": "f"})]
        with mock.patch.object(self.check, "check", side_effect=outcomes) as check:
            report = run_property("L2_BOUND", self.config)
        self.assertEqual(check.call_count, 1)
        self.assertEqual(report.verdict, "fail")
        self.assertEqual(report.witness, {"field": "f", "N": 64})

    def test_non_convergence_is_an_error(self):
        with mock.patch.object(self.check, "check", side_effect=NonConvergenceError("diverges")):
            report = run_property("L2_BOUND", self.config)
        self.assertEqual(report.verdict, "error")
        self.assertEqual(report.witness, {"N": 64})
        self.assertIn("diverges", report.details["error"])

    def test_every_refined_property_must_settle(self):
        outcomes = [CheckOutcome(True, 0.5, {"field": "f"}), CheckOutcome(True, 1.0, {"field": "f"})]
        with mock.patch.object(PROPERTY_REGISTRY["HOLDER_BALL"], "check", side_effect=outcomes):
            report = run_property("HOLDER_BALL", make_config(["HOLDER_BALL"], levels=(64, 128)))
        self.assertEqual(report.verdict, "unstable")

    def test_round_off_ratios_count_as_settled(self):
        outcomes = [CheckOutcome(True, 0.0, {"kernel": "H"}), CheckOutcome(True, 1e-12, {"kernel": "H"})]
        with mock.patch.object(self.check, "check", side_effect=outcomes):
            report = run_property("L2_BOUND", self.config)
        self.assertEqual(report.verdict, "pass")
        self.assertEqual(report.details["stability"]["change"], 0.0)

    def test_identity_checks_skip_stability(self):
        outcomes = [CheckOutcome(True, 1e-12, {"b": "b"}), CheckOutcome(True, 5e-11, {"b": "b"})]
        with mock.patch.object(PROPERTY_REGISTRY["TWO_BALL"], "check", side_effect=outcomes):
            report = run_property("TWO_BALL", make_config(["TWO_BALL"], levels=(64, 128)))
        self.assertEqual(report.verdict, "pass")
        self.assertNotIn("stability", report.details)


@pytest.mark.parametrize(
    "verdicts, code",
    [
        (["pass"], 0),
        (["pass", "unstable"], 2),
        (["error", "pass"], 2),
        (["unstable", "fail"], 3),
    ],
)
def test_exit_code(verdicts, code):
    reports = [PropertyReport("X", v, 1.0, None, {64: 1.0}) for v in verdicts]
    assert exit_code(reports) == code


def test_run_experiment_writes_reports(tmp_path):
    config = make_config(["INVERSE_SANDWICH"])
    reports = run_experiment(config, tmp_path)
    assert [r.name for r in reports] == ["INVERSE_SANDWICH"]

    data = json.loads((tmp_path / "t.json").read_text())
    assert data["config"]["name"] == "t"
    assert data["reports"][0]["verdict"] == "pass"
    assert "seconds" not in data["reports"][0]

    header = (tmp_path / "t.csv").read_text().splitlines()[0]
    assert header == "property,N,pass,worst_ratio,witness_id,seconds"


def test_run_experiment_is_deterministic(tmp_path):
    config = make_config(["INVERSE_SANDWICH"])
    run_experiment(config, tmp_path / "a")
    run_experiment(config, tmp_path / "b")
    assert (tmp_path / "a" / "t.json").read_bytes() == (tmp_path / "b" / "t.json").read_bytes()


def test_run_experiment_rejects_unknown_property():
    with pytest.raises(ValueError):
        run_experiment(make_config(["NOPE"]))


def test_mean_decay_ratio_needs_falling_means():
    window = Window(1, 4.0, 64)
    rungs = decay_rungs(Indicator(1.0).sample(window), 1.0, ball_family(window).radii)
    assert rungs.tolist() == [2.0, 4.0]
    assert mean_decay_ratio(SampledField(window, np.ones(window.shape)), rungs) == 1.0
    assert mean_decay_ratio(Indicator(1.0).sample(window), rungs) == pytest.approx(0.5)
    assert mean_decay_ratio(zero_field(window), rungs) == 0.0


HILBERT_BANK = {
    "fields": [{"family": "Indicator", "params": {"radius": 1.0}}],
    "b_fields": [{"family": "Ramp", "params": {"radius": 2.0}}],
}


def test_mean_vanish_on_hilbert_commutator():
    config = make_config(["MEAN_VANISH"], levels=(64, 128), kernel={"kind": "Hilbert"}, bank=HILBERT_BANK)
    report = run_property("MEAN_VANISH", config)
    assert report.verdict == "pass"
    # [x, H]χ is 2/π on |x| < 2 and falls off beyond, so the mean at r = L is about 0.84 of the peak
    assert 0.75 < report.worst_ratio < 0.9
    assert report.details["levels"][64]["measured"] == [entry_name(Indicator(1.0))]


def test_mean_vanish_fails_when_means_do_not_fall():
    config = make_config(["MEAN_VANISH"], kernel={"kind": "Hilbert"}, bank=HILBERT_BANK)
    flat = SampledField(config.window.window(64), np.ones(64))
    with mock.patch("src.harness.commutator_checks.apply_stencil", return_value=flat):
        report = run_property("MEAN_VANISH", config)
    assert report.verdict == "fail"
    assert report.worst_ratio == 1.0


def test_sharp_morrey_uses_fields_with_sigma_zero():
    bank = {
        "fields": [
            {"family": "Indicator", "params": {"radius": 1.0}},
            {"family": "PowerSingular", "params": {"beta": 0.5}},
        ]
    }
    report = run_property("SHARP_MORREY", make_config(["SHARP_MORREY"], bank=bank))
    assert report.verdict == "pass"
    level = report.details["levels"][64]
    assert level["sigma_zero"] == [entry_name(Indicator(1.0))]
    assert level["skipped"] == [entry_name(PowerSingular(0.5))]


def test_dyadic_modular_constants():
    report = run_property("DYADIC_MODULAR", make_config(["DYADIC_MODULAR"]))
    assert report.verdict == "pass"
    constants = report.details["levels"][64]["constants"]
    assert constants == {str(p): dyadic_modular_constant(p, 1) for p in (1.5, 2.0, 3.0)}


@pytest.mark.parametrize("name", ["MR_POINTWISE", "MR_BOUNDED"])
def test_fractional_maximal_triple(name):
    config = make_config([name], params={"maximal_triples": [[2.0, 4.0, 1.0]]})
    report = run_property(name, config)
    assert report.verdict == "pass"
    assert 0.0 < report.worst_ratio < math.inf


def test_john_nirenberg_ratio_in_range():
    report = run_property("JN_EQUIV", make_config(["JN_EQUIV"]))
    assert report.verdict == "pass"
    level = report.details["levels"][64]
    assert 1.0 - 1e-9 <= level["min_ratio"] <= level["max_ratio"] <= 8.0


class TestSpotChecks(unittest.TestCase):
    def test_coarse_run_notes_skipped_spot_check(self):
        ctx = PropertyContext(make_config(["COMM_BOUND_CZ"]), 64)
        with self.assertLogs("src.harness.commutator_checks", level="WARNING"):
            note = spot_skipped(ctx, "[b,H]χ")
        self.assertEqual(note["N"], 64)

    def test_only_the_finest_level_notes_it(self):
        ctx = PropertyContext(make_config(["COMM_BOUND_CZ"], levels=(64, 128)), 64)
        self.assertIsNone(spot_skipped(ctx, "[b,H]χ"))


FULL_CATALOG = {
    "young": {
        "Phi": {"family": "Power", "params": {"p": 2.0}},
        "Psi": {"family": "Power", "params": {"p": 4.0}},
        "Theta": {"family": "Power", "params": {"p": 4.0}},
        "Phi0": {"family": "Power", "params": {"p": 4.0}},
    },
    "growth": {
        "vp": {"family": "PowerNeg", "params": {"lam": 1.0}},
        "psi": {"family": "Constant", "params": {"c": 1.0}},
        "rho": {"family": "PowerPos", "params": {"alpha": 0.25}},
        "theta": {"family": "PowerNeg", "params": {"lam": 1.0}},
    },
    "kernel": {"kind": "Hilbert"},
    "params": {"holder_pairs": 4, "goodlambda_fields": 10},
}


@pytest.mark.parametrize("name", CATALOG)
def test_every_property_runs_at_64(name):
    report = run_property(name, make_config([name], **FULL_CATALOG))
    assert report.name == name
    assert report.verdict in VERDICTS
    assert set(report.trend) <= {64}
