import math

import pytest

from src.core.growth import (
    Constant,
    PowerNeg,
    PowerPos,
    Tabulated,
    check_decay_integral,
    check_pairing,
    check_rho_admissible,
    classify_growth,
    decay_integral,
    eval_growth,
    growth_from_dict,
    rho_star,
    window_integral,
)
from src.core.quadrature import NonConvergenceError
from src.core.young import Power


def test_power_neg_values():
    assert PowerNeg(1.0)(2.0) == pytest.approx(0.5)
    assert eval_growth(PowerNeg(2.0, 3.0), 2.0) == pytest.approx(0.75)


def test_growth_rejects_nonpositive_radius():
    with pytest.raises(ValueError, match="r > 0"):
        PowerNeg(1.0)(0.0)


def test_rho_star_power():
    # ∫_0^4 t^{1/2}/t dt = 2·4^{1/2}
    assert rho_star(PowerPos(0.5), 4.0) == pytest.approx(4.0)


def test_rho_star_at_zero():
    assert rho_star(PowerPos(0.5), 0.0) == 0.0


def test_decay_integral_power_neg():
    assert decay_integral(PowerNeg(1.0), 2.0) == pytest.approx(0.5)


def test_decay_integral_diverges_for_increasing_power():
    with pytest.raises(NonConvergenceError):
        decay_integral(PowerPos(1.0), 1.0)


def test_window_integral_constant_is_log():
    assert window_integral(Constant(1.0), 1.0, math.e) == pytest.approx(1.0)


def test_check_decay_integral_power_neg():
    report = check_decay_integral(PowerNeg(2.0))
    assert report.holds
    assert report.best_constant == pytest.approx(0.5)


def test_cz_pairing_square_bmo():
    report = check_pairing("CZ", Power(2.0), Power(2.0), vp=PowerNeg(1.0), psi=Constant(1.0))
    assert report.holds
    assert report.best_constant == pytest.approx(1.0)


def test_maximal_pairing_balanced_exponents():
    report = check_pairing("MAXIMAL", Power(2.0), Power(4.0), vp=PowerNeg(1.0), rho=PowerPos(0.25))
    assert report.holds
    assert report.best_constant == pytest.approx(1.0)


def test_pairing_missing_argument():
    with pytest.raises(ValueError, match="requires psi"):
        check_pairing("CZ", Power(2.0), Power(2.0), vp=PowerNeg(1.0))


def test_pairing_unknown_kind():
    with pytest.raises(ValueError, match="Unknown pairing kind"):
        check_pairing("BOGUS", Power(2.0), vp=PowerNeg(1.0))


def test_growth_from_dict_round_trip():
    g = PowerNeg(0.5, 2.0)
    assert growth_from_dict(g.to_dict()) == g


def test_growth_from_dict_unknown_family():
    with pytest.raises(ValueError, match="Unknown growth family"):
        growth_from_dict({"family": "Wiggle"})


def test_tabulated_interpolates_power_laws_exactly():
    g = Tabulated.from_function(lambda r: 1.0 / r, [0.5, 1.0, 2.0, 4.0])
    assert g(1.5) == pytest.approx(1.0 / 1.5)
    assert growth_from_dict(g.to_dict())(3.0) == pytest.approx(1.0 / 3.0)


def test_classify_negative_power():
    report = classify_growth(PowerNeg(1.0), 1)
    assert report.in_Gdec.holds
    assert report.doubling.holds
    assert report.doubling.constant == pytest.approx(2.0)
    assert report.almost_decreasing.constant == 1.0
    assert not report.in_Ginc.holds


def test_rho_admissible_for_positive_power():
    reports = check_rho_admissible(PowerPos(0.5), 1, 0.25)
    assert set(reports) == {"int_rho", "sup_rho", "rho_rn", "rho_conti"}
    assert reports["int_rho"].best_constant == pytest.approx(2.0)
    assert reports["int_rho"].holds
    assert reports["rho_rn"].holds


def test_rho_admissible_rejects_eps_outside_range():
    with pytest.raises(ValueError, match="eps"):
        check_rho_admissible(PowerPos(0.5), 1, 1.5)
