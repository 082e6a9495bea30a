import math

import numpy as np
import pytest

from src.core.fields import Ball, Constant, Indicator, Ramp, RandomStep, Window, ball_family, dyadic_family
from src.core.growth import Constant as ConstantGrowth
from src.core.growth import PowerNeg, PowerPos
from src.core.operators import (
    KernelSpec,
    apply_operator,
    check_standard_kernel,
    commutator,
    cz_apply,
    dyadic_maximal,
    dyadic_sharp,
    frac_integral,
    frac_maximal,
    hilbert_stencil,
    hl_maximal,
    kernel_from_dict,
    l2_bound,
    sharp_maximal,
    tail_bound_check,
    two_ball_commutator,
)
from src.core.young import Power


@pytest.fixture
def window():
    return Window(1, 4.0, 64)


def test_hilbert_stencil_is_odd(window):
    stencil = hilbert_stencil(window)
    assert np.allclose(stencil[::-1], -stencil)
    assert stencil[window.N - 1] == 0.0


def test_hilbert_commutator_with_linear_b():
    # [x, H]χ_[-1,1] = (1/π)∫_{-1}^{1} dy = 2/π
    w = Window(1, 4.0, 256)
    b = Ramp(2.0 * w.L).sample(w)
    f = Indicator(1.0).sample(w)
    out = commutator("CZ", b, f, KernelSpec("Hilbert")).field.flat()
    far = np.abs(w.axis()) >= 2.0
    assert np.max(np.abs(out[far] - 2.0 / math.pi)) < 1e-3


def test_fractional_integral_closed_form():
    # I_ρχ_[-1,1](x) = ((|x|+1)^α − (|x|−1)^α)/α for ρ = r^α, |x| > 1
    w = Window(1, 4.0, 256)
    alpha = 0.25
    out = frac_integral(Indicator(1.0).sample(w), PowerPos(alpha)).field.flat()
    x = np.abs(w.axis())
    far = x >= 2.0
    expected = ((x[far] + 1.0) ** alpha - (x[far] - 1.0) ** alpha) / alpha
    assert np.allclose(out[far], expected, rtol=0, atol=1e-9)


def test_commutator_with_constant_b_vanishes(window):
    b = Constant(2.0).sample(window)
    f = RandomStep(0).sample(window)
    out = commutator("CZ", b, f, KernelSpec("Hilbert")).field
    assert np.all(out.values == 0.0)


def test_commutator_kind_must_match_operator(window):
    f = RandomStep(0).sample(window)
    with pytest.raises(ValueError, match="KernelSpec"):
        commutator("CZ", f, f, PowerPos(0.5))


def test_two_ball_representation_matches_direct(window):
    b = Ramp(2.0).sample(window)
    f = RandomStep(2).sample(window)
    kernel = KernelSpec("Hilbert")
    direct = commutator("CZ", b, f, kernel).field.flat()
    split = two_ball_commutator(b, f, kernel, Ball((0.5,), 1.0)).flat()
    assert np.allclose(split, direct, rtol=0, atol=1e-10)


def test_maximal_dominates_field(window):
    f = RandomStep(4).sample(window)
    balls = ball_family(window)
    assert np.all(hl_maximal(f, balls).flat() >= np.abs(f.flat()) - 1e-12)


def test_frac_maximal_with_unit_weight_is_hl_maximal(window):
    f = RandomStep(4).sample(window)
    balls = ball_family(window)
    weighted = frac_maximal(f, ConstantGrowth(1.0), balls).flat()
    assert np.allclose(weighted, hl_maximal(f, balls).flat())


def test_cz_apply_is_linear(window):
    f = RandomStep(3).sample(window)
    kernel = KernelSpec("Hilbert")
    once = cz_apply(f, kernel).field.flat()
    twice = cz_apply(f * 2.0, kernel).field.flat()
    assert np.allclose(twice, 2.0 * once, rtol=0, atol=1e-12)
    assert np.all(cz_apply(Constant(0.0).sample(window), kernel).field.values == 0.0)


def test_tail_bound_is_finite(window):
    f = Indicator(3.0).sample(window)
    report = tail_bound_check(
        f, Ball((0.0,), 0.5), Power(2.0), PowerNeg(1.0), ball_family(window), kernel=KernelSpec("Hilbert")
    )
    assert report.holds
    assert 0.0 < report.best_constant < math.inf
    assert report.details["start_radius"] == 1.0


def test_tail_bound_needs_one_operator(window):
    f = Indicator(1.0).sample(window)
    with pytest.raises(ValueError, match="exactly one"):
        tail_bound_check(f, Ball((0.0,), 0.5), Power(2.0), PowerNeg(1.0), ball_family(window))


def test_sharp_maximal_of_zero_is_zero(window):
    f = Constant(0.0).sample(window)
    assert np.all(sharp_maximal(f, ball_family(window)).values == 0.0)


def test_dyadic_maximal_dominates_on_cube(window):
    f = RandomStep(5).sample(window)
    family = dyadic_family(window, 4)
    md = family.restrict(dyadic_maximal(f, family))
    ms = family.restrict(dyadic_sharp(f, family))
    assert np.all(md >= np.abs(family.restrict(f)) - 1e-12)
    assert np.all(ms >= 0)


def test_apply_operator_scale(window):
    f = RandomStep(1).sample(window)
    out = apply_operator("scale", f, c=2.0).field
    assert np.array_equal(out.values, 2.0 * f.values)


def test_apply_operator_needs_balls(window):
    with pytest.raises(ValueError, match="needs balls"):
        apply_operator("M", RandomStep(1).sample(window))


def test_apply_operator_unknown(window):
    with pytest.raises(ValueError, match="Unknown operator"):
        apply_operator("Fourier", RandomStep(1).sample(window))


def test_kernel_dimension_check(window):
    with pytest.raises(ValueError):
        commutator("CZ", RandomStep(1).sample(window), RandomStep(2).sample(window), KernelSpec("Riesz", 1))


def test_kernel_from_dict_defaults():
    kernel = kernel_from_dict({"kind": "Riesz", "j": 2})
    assert kernel.dimension == 2
    assert kernel.j == 2


def test_unknown_kernel_kind():
    with pytest.raises(ValueError, match="Unknown kernel kind"):
        KernelSpec("Beurling")


def test_l2_bound_near_one(window):
    # the Hilbert transform is an isometry on L²
    sigma = l2_bound(window, KernelSpec("Hilbert"))
    assert 0.5 < sigma < 1.5


@pytest.mark.parametrize("kernel", [KernelSpec("Hilbert"), KernelSpec("Riesz", 2)])
def test_standard_kernel_smoothness(kernel):
    report = check_standard_kernel(kernel, sample_triples=500)
    assert report.holds
    assert math.isfinite(report.best_constant)
    assert report.details["dini"]["log_dini"]["holds"]
