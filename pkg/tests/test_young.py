import math

import numpy as np
import pytest

from src.core.young import (
    ExpMinusOne,
    LinearCap,
    PiecewiseLinearConvex,
    Power,
    PowerLog,
    Scaled,
    check_delta2,
    check_nabla2,
    complementary,
    eval_young,
    inverse_young,
    power_compose,
    young_from_dict,
)


def test_power_evaluate_and_inverse():
    phi = Power(2.0)
    assert phi.evaluate(np.array([0.0, 1.0, 3.0])).tolist() == [0.0, 1.0, 9.0]
    assert inverse_young(phi, 9.0) == pytest.approx(3.0)


def test_power_rejects_exponent_below_one():
    with pytest.raises(ValueError, match="Power exponent must be >= 1"):
        Power(0.5)


def test_negative_argument_rejected():
    with pytest.raises(ValueError):
        Power(2.0).evaluate(-1.0)


def test_linear_cap_is_infinite_beyond_one():
    phi = LinearCap()
    assert math.isinf(phi.evaluate(np.array([2.0]))[0])
    assert inverse_young(phi, 5.0) == 1.0


def test_exp_minus_one_inverse():
    assert inverse_young(ExpMinusOne(), math.e - 1.0) == pytest.approx(1.0)


def test_bisected_inverse_matches_power_log():
    phi = PowerLog(2.0, 1.0)
    t = 3.0
    u = float(phi.evaluate(np.array([t]))[0])
    assert inverse_young(phi, u) == pytest.approx(t, rel=1e-8)


def test_complementary_of_square_is_quarter_square():
    conj = complementary(Power(2.0))
    assert float(conj.evaluate(np.array([2.0]))[0]) == pytest.approx(1.0)


def test_complementary_of_cube():
    conj = complementary(Power(3.0))
    assert float(conj.evaluate(np.array([1.0]))[0]) == pytest.approx(2.0 * 3.0**-1.5)


def test_complementary_of_scaled_power():
    conj = complementary(Scaled(Power(2.0), 0.5))
    # Φ(t) = t²/4 has Φ̃(t) = t²
    assert float(conj.evaluate(np.array([3.0]))[0]) == pytest.approx(9.0)


def test_young_from_dict_round_trip_nested_scaled():
    phi = Scaled(Scaled(Power(3.0), 2.0), 0.25)
    assert young_from_dict(phi.to_dict()).to_dict() == phi.to_dict()


def test_young_from_dict_piecewise_linear():
    phi = PiecewiseLinearConvex(((0.0, 0.0), (1.0, 0.0), (2.0, 3.0)))
    again = young_from_dict(phi.to_dict())
    t = np.array([0.5, 1.5, 4.0])
    assert np.allclose(again.evaluate(t), phi.evaluate(t))


def test_young_from_dict_unknown_family():
    with pytest.raises(ValueError, match="Unknown Young family"):
        young_from_dict({"family": "Cosh"})


def test_young_from_dict_missing_parameter():
    with pytest.raises(ValueError, match="Missing parameter"):
        young_from_dict({"family": "Power", "params": {}})


def test_delta2_power():
    report = check_delta2(Power(2.0))
    assert report.holds
    assert report.best_constant == pytest.approx(4.0)


def test_delta2_fails_for_exponential():
    assert not check_delta2(ExpMinusOne()).holds


@pytest.mark.parametrize("phi, expected", [(Power(2.0), True), (Power(1.0), False)])
def test_nabla2(phi, expected):
    assert check_nabla2(phi).holds is expected


def test_power_compose_homogeneous():
    composed = power_compose(Power(4.0), 0.5)
    assert float(composed.evaluate(np.array([3.0]))[0]) == pytest.approx(9.0)


def test_power_compose_rejects_non_young_result():
    with pytest.raises(ValueError):
        power_compose(Power(1.5), 0.5)


def test_power_compose_theta_one_is_identity():
    phi = PowerLog(2.0, 1.0)
    assert power_compose(phi, 1.0) is phi


def test_eval_young_scalar_and_extended():
    assert eval_young(Power(2.0), 3.0) == 9.0
    assert eval_young(LinearCap(), 0.5) == 0.5
    assert math.isinf(eval_young(LinearCap(), 2.0))
    assert eval_young(PiecewiseLinearConvex(((0.0, 0.0), (1.0, 0.0), (2.0, 3.0))), 1.5) == pytest.approx(1.5)


def test_power_log_hull_is_exact_for_convex_profile():
    # t²·log(e + t) is already convex, so the minorant reproduces it at the nodes
    assert PowerLog(2.0, 1.0).equivalence_constant == pytest.approx(1.0, abs=1e-6)
