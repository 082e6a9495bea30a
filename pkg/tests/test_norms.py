import math

import numpy as np
import pytest

from src.core.fields import Ball, Indicator, Ramp, RandomStep, SampledField, Window, ball_family, zero_field
from src.core.growth import Constant, PowerNeg
from src.core.norms import ball_norm, campanato_norm, campanato_p, modular, om_norm, sigma_limit
from src.core.young import Power, PowerLog


@pytest.fixture
def window():
    return Window(1, 4.0, 64)


@pytest.fixture
def balls(window):
    return ball_family(window)


def test_ball_norm_of_scaled_indicator(window):
    # ‖c·χ_B‖ over B equals c/Φ⁻¹(φ(r)) = 3·√r at r = 1
    B = Ball((0.0,), 1.0)
    f = Indicator(1.0).sample(window) * 3.0
    assert ball_norm(f, Power(2.0), PowerNeg(1.0), B).value == pytest.approx(3.0)


def test_ball_norm_bisection_matches_modular(window):
    B = Ball((0.5,), 2.0)
    f = RandomStep(1).sample(window)
    phi = PowerLog(2.0, 1.0)
    result = ball_norm(f, phi, PowerNeg(1.0), B)
    assert result.bisection_iterations > 0
    assert modular(f, phi, PowerNeg(1.0), B, result.value) <= 1.0 + 1e-9
    assert modular(f, phi, PowerNeg(1.0), B, 0.99 * result.value) > 1.0


def test_modular_rejects_nonpositive_lambda(window):
    with pytest.raises(ValueError, match="lambda must be positive"):
        modular(zero_field(window), Power(2.0), PowerNeg(1.0), Ball((0.0,), 1.0), 0.0)


def test_om_norm_of_zero_field(window, balls):
    assert om_norm(zero_field(window), Power(2.0), PowerNeg(1.0), balls).value == 0.0


def test_om_norm_is_homogeneous(window, balls):
    f = RandomStep(3).sample(window)
    base = om_norm(f, Power(2.0), PowerNeg(1.0), balls).value
    assert om_norm(f * -2.5, Power(2.0), PowerNeg(1.0), balls).value == pytest.approx(2.5 * base)


def test_om_norm_reports_attaining_ball(window, balls):
    result = om_norm(Indicator(1.0).sample(window), Power(2.0), PowerNeg(1.0), balls)
    assert result.attaining_ball is not None
    assert result.value > 0


def test_campanato_bounded_by_twice_om(window, balls):
    # ‖f_B‖ <= ‖f‖ on each ball by Jensen, then the triangle inequality
    f = Ramp(2.0).sample(window)
    campanato = campanato_norm(f, Power(2.0), PowerNeg(1.0), balls).value
    assert 0 < campanato <= 2.0 * om_norm(f, Power(2.0), PowerNeg(1.0), balls).value


def test_campanato_p_of_zero_field(window, balls):
    assert campanato_p(zero_field(window), 1.0, Constant(1.0), balls).value == 0.0


def test_campanato_p_rejects_small_exponent(window, balls):
    with pytest.raises(ValueError, match="Campanato exponent"):
        campanato_p(zero_field(window), 0.5, Constant(1.0), balls)


def test_sigma_limit_compact_field(window):
    result = sigma_limit(Indicator(1.0).sample(window), ball_family(window).radii, compact=True)
    assert result.value == 0.0
    assert result.converged
    assert result.radii[-1] == window.L
    # past the support the means fall like |B|^{-1}
    assert result.rate == pytest.approx(-1.0)


def test_sigma_limit_non_decaying_field_does_not_converge(window):
    ones = SampledField(window, np.ones(window.shape))
    result = sigma_limit(ones, ball_family(window).radii, compact=True)
    assert not result.converged
    assert result.value == pytest.approx(1.0)
    assert result.rate == pytest.approx(0.0)


def test_sigma_limit_compact_needs_rungs_inside_window(window):
    with pytest.raises(ValueError, match="inside the window"):
        sigma_limit(Indicator(1.0).sample(window), [4.0, 8.0, 16.0], compact=True)


def test_sigma_limit_needs_two_rungs(window):
    with pytest.raises(ValueError, match="at least two rungs"):
        sigma_limit(zero_field(window), [1.0])


def test_chi_norm_lower_bound_on_family(window, balls):
    # the family contains B, so the sup-norm is at least the ball norm
    B = balls.ball(3, np.array([32]))
    f = np.where(np.abs(window.axis() - B.center[0]) < B.radius, 1.0, 0.0)
    field = Indicator(B.radius, B.center).sample(window)
    assert np.array_equal(field.flat(), f)
    value = om_norm(field, Power(2.0), PowerNeg(1.0), balls).value
    assert value >= 1.0 / math.sqrt(1.0 / B.radius) * (1 - 1e-12)
