import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.numerics.spectral_core import (GridSpec, Profile, ilw_symbol, full_ilw_symbol, frac_lap_symbol,
                                        ilw_operator, frac_laplacian, constant_multiplier, FourierMultiplier,
                                        apply_multiplier, quadratic_form, cross_form, invert_shifted, lp_norm, inner,
                                        spectral_derivative, shift_profile, spectral_interpolate, multiplier_matrix,
                                        inverse_kernel_matrix, kernel_positivity, project_parity, SMALL_X,
                                        KERNEL_SHIFTS)


def test_grid_rejects_bad_sizes():
    with pytest.raises(ValueError):
        GridSpec(10.0, 255)
    with pytest.raises(ValueError):
        GridSpec(-1.0, 256)
    with pytest.raises(ValueError):
        GridSpec(10.0, 2)


def test_grid_layout(small_grid):
    assert small_grid.t[0] == -small_grid.L
    assert np.isclose(small_grid.t[-1] + small_grid.h, small_grid.L)
    assert small_grid.tau.size == small_grid.N // 2 + 1
    assert np.isclose(small_grid.tau[-1], np.pi / small_grid.h)
    assert np.allclose(small_grid.t[small_grid.reflection][1:], -small_grid.t[1:])
    assert GridSpec.from_record(small_grid.to_record()) == small_grid


@given(st.floats(min_value=-60.0, max_value=60.0, allow_nan=False))
def test_ilw_symbol_even_and_nonnegative(tau):
    assert ilw_symbol(tau) == ilw_symbol(-tau)
    assert ilw_symbol(tau) >= 0.0


def test_ilw_symbol_branches():
    assert ilw_symbol(0.0) == 0.0
    tau0 = 2.0 * SMALL_X / np.pi
    assert abs(ilw_symbol(tau0 * (1 - 1e-9)) - ilw_symbol(tau0 * (1 + 1e-9))) < 1e-14
    assert abs(ilw_symbol(100.0) - (100.0 - 2.0 / np.pi)) < 1e-12
    assert abs(ilw_symbol(1.0) - (1.0 / np.tanh(np.pi / 2) - 2.0 / np.pi)) < 1e-14
    tau = np.linspace(0.0, 5.0, 11)
    assert np.allclose(full_ilw_symbol(tau), ilw_symbol(tau) + 2.0 / np.pi, rtol=0, atol=1e-15)


def test_frac_symbol():
    assert frac_lap_symbol(1.0, 3.0) == 9.0
    assert frac_lap_symbol(0.5, -4.0) == 4.0
    with pytest.raises(ValueError):
        frac_lap_symbol(1.5, 1.0)
    with pytest.raises(ValueError):
        frac_laplacian(0.0)


def test_odd_symbol_rejected(small_grid):
    with pytest.raises(ValueError):
        FourierMultiplier(lambda tau: tau, "odd").sampled(small_grid)


def test_profile_parity_and_readonly(sech):
    with pytest.raises(ValueError):
        Profile(sech.grid, sech.values, "odd")
    with pytest.raises(ValueError):
        sech.values[0] = 1.0
    assert sech.parity_defect() < 1e-15
    assert Profile.from_record(sech.to_record()).values.tolist() == sech.values.tolist()


def test_profile_arithmetic(sech):
    doubled = sech + sech
    assert doubled.parity == "even"
    assert np.allclose((doubled - sech).values, sech.values)
    assert sech.scaled(3.0).max_abs() == pytest.approx(3.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=-3.0, max_value=3.0), st.floats(min_value=0.5, max_value=3.0))
def test_parseval(small_grid, center, width):
    u = Profile.from_function(small_grid, lambda t: np.exp(-((t - center) / width) ** 2))
    direct = small_grid.h * np.sum(u.values ** 2)
    assert quadratic_form(constant_multiplier(1.0), u) == pytest.approx(direct, rel=1e-12)
    assert inner(u, u) == pytest.approx(direct, rel=1e-14)


def test_known_forms(sech):
    assert quadratic_form(frac_laplacian(1.0), sech) == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert quadratic_form(ilw_operator(), sech) == pytest.approx(np.pi / 2 - 4.0 / np.pi, abs=1e-12)
    assert lp_norm(sech, 3) ** 3 == pytest.approx(np.pi / 2, abs=1e-12)
    assert lp_norm(sech, 2) ** 2 == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(ValueError):
        lp_norm(sech, 0.5)


def test_cross_form_symmetric(grid, sech):
    v = Profile.from_function(grid, lambda t: np.exp(-(t - 1.0) ** 2))
    m = ilw_operator()
    assert cross_form(m, sech, v) == pytest.approx(cross_form(m, v, sech), rel=1e-13)


def test_apply_and_invert(sech):
    m = ilw_operator()
    forward = apply_multiplier(m.plus(0.5), sech)
    assert forward.parity == "even"
    back = invert_shifted(m, 0.5, forward)
    assert np.max(np.abs(back.values - sech.values)) < 1e-13
    with pytest.raises(ValueError):
        invert_shifted(m, -1.0, sech)


def test_derivative_shift_interpolate(sech):
    t = sech.grid.t
    d = spectral_derivative(sech)
    assert d.parity == "odd"
    assert np.max(np.abs(d.values + np.tanh(t) / np.cosh(t))) < 1e-10
    moved = shift_profile(sech, 1.5)
    assert np.max(np.abs(moved.values - 1.0 / np.cosh(t - 1.5))) < 1e-10
    points = np.array([0.37, -5.1, 12.345])
    assert np.max(np.abs(spectral_interpolate(sech, points) - 1.0 / np.cosh(points))) < 1e-10
    outside = spectral_interpolate(sech, [sech.grid.L + 1.0], outside=0.0)
    assert outside[0] == 0.0


def test_dense_matrices_match_fft(small_grid):
    u = Profile.from_function(small_grid, lambda t: np.exp(-t ** 2) * (1 + 0.2 * t))
    m = ilw_operator()
    M = multiplier_matrix(m, small_grid)
    assert np.max(np.abs(M - M.T)) == 0.0
    assert np.max(np.abs(M @ u.values - apply_multiplier(m, u).values)) < 1e-10
    K = inverse_kernel_matrix(m, 0.7, small_grid)
    assert np.max(np.abs(K @ (M @ u.values + 0.7 * u.values) - u.values)) < 1e-10


@pytest.mark.parametrize("mu", KERNEL_SHIFTS)
def test_kernel_positivity(grid, mu):
    report = kernel_positivity(ilw_operator(), mu, grid)
    assert report["near_positive"]
    assert report["min_ratio"] >= -1e-6
    assert report["floor_ok"]


def test_kernel_shifts_include_one():
    assert KERNEL_SHIFTS == pytest.approx((0.1, 2.0 / np.pi, 1.0))


def test_project_parity(small_grid):
    values = np.exp(-(small_grid.t - 1.0) ** 2)
    even = project_parity(values, small_grid, "even")
    odd = project_parity(values, small_grid, "odd")
    assert np.allclose(even + odd, values)
    Profile(small_grid, even, "even")
    Profile(small_grid, odd, "odd")


@settings(max_examples=20, deadline=None)
@given(st.floats(min_value=0.1, max_value=1.0), st.floats(min_value=-3.0, max_value=3.0))
def test_multipliers_commute(small_grid, s, center):
    u = Profile.from_function(small_grid, lambda t: np.exp(-(t - center) ** 2))
    m1, m2 = ilw_operator(), frac_laplacian(s)
    one = apply_multiplier(m2, apply_multiplier(m1, u)).values
    two = apply_multiplier(m1, apply_multiplier(m2, u)).values
    assert np.max(np.abs(one - two)) <= 1e-12 * np.max(np.abs(one))
