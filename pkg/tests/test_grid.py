import numpy as np
import pytest

from opsurrogate.grid import (
    BOX2D,
    TORUS1D,
    GridFunction,
    ShapeError,
    from_callable,
    inner_product,
    interpolate,
    norm,
    quadrature_weights,
    subsample,
)


def test_inner_product_of_ones_is_domain_measure():
    for n in (3, 17, 33):
        u = GridFunction(BOX2D, n, np.ones(n * n))
        assert inner_product(u, u) == pytest.approx(1.0, abs=1e-14)


def test_torus_trig_quadrature_is_exact():
    u = from_callable(TORUS1D, 64, lambda s: np.sin(2 * np.pi * s))
    assert inner_product(u, u) == pytest.approx(0.5, abs=1e-13)


def test_box_sine_product_near_quarter():
    u = from_callable(BOX2D, 129, lambda s1, s2: np.sin(np.pi * s1) * np.sin(np.pi * s2))
    assert inner_product(u, u) == pytest.approx(0.25, abs=1e-3)


def test_quadrature_weights_sum_to_one():
    assert quadrature_weights(BOX2D, 17).sum() == pytest.approx(1.0, abs=1e-14)
    assert quadrature_weights(TORUS1D, 64).sum() == pytest.approx(1.0, abs=1e-14)


def test_box_weight_pattern():
    n = 5
    w = quadrature_weights(BOX2D, n).reshape(n, n)
    h2 = (1.0 / (n - 1)) ** 2
    assert w[2, 2] == pytest.approx(h2)
    assert w[0, 2] == pytest.approx(h2 / 2)
    assert w[0, 0] == pytest.approx(h2 / 4)


def test_inner_product_positive_definite():
    rng = np.random.default_rng(0)
    u = GridFunction(BOX2D, 9, rng.standard_normal(81))
    assert inner_product(u, u) > 0
    z = GridFunction(BOX2D, 9, np.zeros(81))
    assert inner_product(z, z) == 0.0


def test_inner_product_rejects_mismatched_grids():
    u = GridFunction(BOX2D, 5, np.zeros(25))
    v = GridFunction(BOX2D, 9, np.zeros(81))
    with pytest.raises(ShapeError):
        inner_product(u, v)
    w = GridFunction(TORUS1D, 25, np.zeros(25))
    with pytest.raises(ShapeError):
        inner_product(u, w)


def test_gridfunction_rejects_bad_values():
    with pytest.raises(ShapeError):
        GridFunction(BOX2D, 5, np.zeros(24))
    vals = np.zeros(25)
    vals[3] = np.nan
    with pytest.raises(ShapeError):
        GridFunction(BOX2D, 5, vals)


def test_subsample_1d_pattern():
    u = GridFunction(TORUS1D, 5, np.array([0.0, 1, 2, 3, 4]))
    # torus: n divisible by stride, so test the box pattern instead
    ub = GridFunction(BOX2D, 5, np.arange(25.0))
    # keep rows/cols 0,2,4
    v = subsample(ub, 2)
    assert v.n == 3
    assert np.array_equal(v.values.reshape(3, 3)[:, 0], [0.0, 10.0, 20.0])


def test_subsample_resolutions():
    u = GridFunction(BOX2D, 421, np.zeros(421 * 421))
    assert subsample(u, 2).n == 211
    ut = GridFunction(TORUS1D, 4096, np.arange(4096.0))
    v = subsample(ut, 4)
    assert v.n == 1024
    assert np.array_equal(v.values, np.arange(4096.0)[::4])


def test_subsample_divisibility_errors():
    u = GridFunction(BOX2D, 6, np.zeros(36))
    with pytest.raises(ShapeError):
        subsample(u, 2)
    ut = GridFunction(TORUS1D, 10, np.zeros(10))
    with pytest.raises(ShapeError):
        subsample(ut, 3)


def test_interpolate_reproduces_constants_and_linears():
    c = GridFunction(BOX2D, 9, np.full(81, 3.25))
    v = interpolate(c, 33)
    assert np.max(np.abs(v.values - 3.25)) == 0.0

    ramp = from_callable(BOX2D, 9, lambda s1, s2: s1)
    fine = interpolate(ramp, 17)
    exact = from_callable(BOX2D, 17, lambda s1, s2: s1)
    assert np.max(np.abs(fine.values - exact.values)) < 1e-12


def test_interpolate_sine_accuracy():
    u = from_callable(BOX2D, 33, lambda s1, s2: np.sin(np.pi * s1) * np.sin(np.pi * s2))
    fine = interpolate(u, 65)
    exact = from_callable(BOX2D, 65, lambda s1, s2: np.sin(np.pi * s1) * np.sin(np.pi * s2))
    assert np.max(np.abs(fine.values - exact.values)) < 1e-4


def test_interpolate_periodic_on_torus():
    u = from_callable(TORUS1D, 32, lambda s: np.sin(2 * np.pi * s))
    fine = interpolate(u, 128)
    exact = from_callable(TORUS1D, 128, lambda s: np.sin(2 * np.pi * s))
    assert np.max(np.abs(fine.values - exact.values)) < 1e-4


def test_interpolate_then_subsample_recovers_source():
    rng = np.random.default_rng(7)
    u = GridFunction(BOX2D, 9, rng.standard_normal(81))
    back = subsample(interpolate(u, 17), 2)
    assert np.max(np.abs(back.values - u.values)) < 1e-14

    ut = GridFunction(TORUS1D, 16, rng.standard_normal(16))
    backt = subsample(interpolate(ut, 64), 4)
    assert np.max(np.abs(backt.values - ut.values)) < 1e-14


def test_norm_triangle_inequality():
    rng = np.random.default_rng(11)
    for _ in range(20):
        a = GridFunction(BOX2D, 9, rng.standard_normal(81))
        b = GridFunction(BOX2D, 9, rng.standard_normal(81))
        s = GridFunction(BOX2D, 9, a.values + b.values)
        assert norm(s) <= norm(a) + norm(b) + 1e-12
