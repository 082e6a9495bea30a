import numpy as np
import pytest

from src.core.fields import (
    Affine,
    Ball,
    BallPolicy,
    Constant,
    Indicator,
    PowerSingular,
    RandomStep,
    SampledField,
    Window,
    ball_family,
    ball_mask,
    ball_masks,
    ball_mean,
    cell_centers,
    cube_masks,
    dyadic_family,
    field_from_dict,
    lattice_count,
    read_field,
    support_radius,
    write_field,
)


def test_window_geometry():
    w = Window(1, 4.0, 64)
    assert w.h == pytest.approx(0.125)
    assert w.axis()[0] == pytest.approx(-4.0 + 0.0625)
    assert w.points().shape == (64, 1)


@pytest.mark.parametrize("n, N", [(3, 64), (1, 48), (1, 4)])
def test_window_validation(n, N):
    with pytest.raises(ValueError):
        Window(n, 4.0, N)


def test_lattice_count_one_dimension():
    assert lattice_count(np.array([0.0]), 2.0) == 3
    assert lattice_count(np.array([0.5]), 1.0) == 2


def test_lattice_count_disk():
    # i² + j² < 4 keeps exactly the 3x3 block around the origin
    assert lattice_count(np.array([0.0, 0.0]), 2.0) == 9


def test_ball_family_ladder_extends_beyond_window():
    w = Window(1, 4.0, 16)
    balls = ball_family(w)
    assert balls.radii[0] == pytest.approx(w.h)
    assert len(balls.rungs) == 4 + 3 + 1
    assert balls.radii[-1] > 2 * w.L


def test_ball_family_stride_must_divide():
    with pytest.raises(ValueError, match="Stride"):
        ball_family(Window(1, 4.0, 16), BallPolicy(stride=3))


def test_sampled_field_rejects_nan():
    w = Window(1, 4.0, 8)
    with pytest.raises(ValueError, match="finite"):
        SampledField(w, np.full(8, np.nan))


def test_indicator_cell_count():
    f = Indicator(1.0).sample(Window(1, 4.0, 64))
    assert f.flat().sum() == 16


def test_ball_mean_counts_cells_outside_window():
    w = Window(1, 4.0, 64)
    f = Constant(2.0).sample(w)
    assert ball_mean(f, Ball((0.0,), 1.0)) == pytest.approx(2.0)
    # half of this ball lies beyond the edge, where the field is zero
    assert ball_mean(f, Ball((4.0,), 1.0)) == pytest.approx(1.0)


def test_compact_flags():
    assert Indicator(1.0).compact
    assert RandomStep(0).compact
    assert not PowerSingular(0.25).compact
    assert Affine(((1.0, Indicator(1.0)),)).compact
    assert not Affine(((1.0, PowerSingular(0.25)),)).compact


def test_random_step_is_deterministic():
    w = Window(1, 4.0, 64)
    a = RandomStep(7).sample(w)
    b = RandomStep(7).sample(w)
    assert np.array_equal(a.values, b.values)


def test_field_from_dict_unknown_family():
    with pytest.raises(ValueError):
        field_from_dict({"family": "Sawtooth"})


def test_binary_field_file(tmp_path):
    w = Window(2, 2.0, 8)
    f = SampledField(w, np.arange(64, dtype=float))
    path = tmp_path / "f.bin"
    write_field(path, f)
    g = read_field(path)
    assert g.window == w
    assert np.array_equal(g.values, f.values)


def test_csv_field_file(tmp_path):
    w = Window(1, 4.0, 16)
    f = Indicator(1.0).sample(w)
    path = tmp_path / "f.csv"
    write_field(path, f)
    g = read_field(path)
    assert g.window.N == 16
    assert g.window.L == pytest.approx(4.0)
    assert np.allclose(g.values, f.values)


def test_read_missing_field(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_field(tmp_path / "missing.bin")


def test_dyadic_family_restrict_and_means():
    w = Window(1, 4.0, 16)
    family = dyadic_family(w, 2)
    f = SampledField(w, np.arange(16, dtype=float))
    local = family.restrict(f)
    means = family.level_means(local, 1)
    assert means[0] == pytest.approx(local[: local.size // 2].mean())


def test_ball_masks_agree_with_single_ball():
    w = Window(2, 2.0, 8)
    balls = ball_family(w)
    masks = ball_masks(balls, 2)
    assert masks.shape == (64, 64)
    for i in (0, 27, 63):
        expected = ball_mask(w, balls.ball(2, balls.center_indices[i])).ravel()
        assert np.array_equal(masks[i], expected)


def test_ball_masks_rejects_unknown_rung():
    with pytest.raises(ValueError, match="Rung"):
        ball_masks(ball_family(Window(1, 4.0, 16)), 40)


def test_cube_masks_label_halves():
    family = dyadic_family(Window(1, 4.0, 16), 2)
    assert cube_masks(family, 1).tolist() == [0] * 8 + [1] * 8
    assert cube_masks(family, 0).max() == 0


def test_cell_centers_match_axis():
    w = Window(2, 2.0, 8)
    centers = cell_centers(w)
    assert centers.shape == (8, 8, 2)
    assert np.allclose(centers[3, 5], [w.axis()[3], w.axis()[5]])


def test_support_radius():
    window = Window(1, 4.0, 64)
    assert support_radius(Indicator(1.0).sample(window)) == pytest.approx(1.0 - window.h / 2)
    assert support_radius(Constant(0.0).sample(window)) == 0.0
    assert support_radius(Constant(1.0).sample(window)) == pytest.approx(window.L - window.h / 2)
