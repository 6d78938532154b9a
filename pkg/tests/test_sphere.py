import numpy as np
import pytest
from hypothesis import given, assume, settings, strategies as st

from src.numerics import sphere

coords = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)
points = st.tuples(coords, coords, coords)
far = st.tuples(*[st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)] * 3)


def test_sphere_point_checks():
    p = sphere.SpherePoint((0.0, 0.0, 0.0, 1.0))
    assert p.chord2(sphere.SpherePoint((0.0, 0.0, 0.0, -1.0))) == 4.0
    with pytest.raises(ValueError):
        sphere.SpherePoint((1.0, 1.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        sphere.SpherePoint((1.0, 0.0, 0.0))


def test_stereographic_poles():
    assert sphere.stereographic(np.zeros(3)).omega == (0.0, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        sphere.stereographic(np.zeros(2))


@settings(max_examples=200)
@given(far)
def test_stereographic_lands_on_sphere(x):
    omega = sphere.stereographic_array(np.array(x))
    assert abs(np.linalg.norm(omega) - 1.0) <= 1e-12


@settings(max_examples=200)
@given(points, points)
def test_conformal_identity(x, y):
    x, y = np.array(x), np.array(y)
    assume(np.linalg.norm(x - y) > 0.1)
    lhs, rhs = sphere.conformal_identity_check(x, y)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_conformal_identity_rejects_equal_points():
    with pytest.raises(ValueError):
        sphere.conformal_identity_check(np.ones(3), np.ones(3))


def test_conformal_sweep():
    report = sphere.conformal_sweep(1000, seed=0)
    assert report["pairs"] == 1000
    assert report["max_rel_gap"] <= 1e-12
    assert report["max_norm_defect"] <= 1e-12


def test_jacobian():
    assert sphere.jacobian(np.zeros(3)) == 8.0
    assert sphere.jacobian_integral() == pytest.approx(2.0 * np.pi ** 2, rel=1e-10)


def test_chebyshev_u():
    x = np.linspace(-0.9, 0.9, 7)
    gamma = np.arccos(x)
    for l in range(6):
        assert np.allclose(sphere.chebyshev_u(l, x), np.sin((l + 1) * gamma) / np.sin(gamma), atol=1e-12)


@pytest.mark.parametrize("l", range(11))
def test_funk_hecke(l):
    assert abs(sphere.funk_hecke_eigenvalue(l) - 1.0 / (l + 1)) <= 1e-12


def test_funk_hecke_rejects_bad_degree():
    with pytest.raises(ValueError):
        sphere.funk_hecke_eigenvalue(-1)
    with pytest.raises(ValueError):
        sphere.funk_hecke_eigenvalue(1.5)
    with pytest.raises(ValueError):
        sphere.funk_hecke_eigenvalue(2, sphere.ZonalSpec("riesz"))


def test_hilbert_schmidt_partial_sums():
    sums = sphere.hilbert_schmidt_partial(10)
    assert len(sums) == 11
    assert np.allclose(np.diff(sums), 1.0)
    assert sums[0] == pytest.approx(1.0, abs=1e-12)


def test_bs_radial_spectrum():
    values, parities = sphere.bs_radial_eigenvalues(6, with_parity=True)
    assert np.allclose(values, [1.0 / (l + 1) for l in range(6)], atol=1e-3)
    assert parities == [(-1) ** l for l in range(6)]
    assert sphere.bs_radial_eigenvalues(2) == values[:2]
    with pytest.raises(ValueError):
        sphere.bs_radial_eigenvalues(13)


def test_kernel_transport():
    report = sphere.kernel_transport_check()
    assert report["max_rel_error"] <= 1e-10
    assert report["r_min"] >= 0.05 and report["r_max"] <= 20.0
    for key in ("at_1", "at_e"):
        lhs, rhs = report[key]
        assert abs(lhs - rhs) <= 1e-10
    assert report["at_1"][1] == 0.0


@pytest.mark.parametrize("l, dim", [(0, 1), (1, 4), (3, 16)])
def test_harmonic_dim(l, dim):
    assert sphere.harmonic_dim(l) == dim


def test_stereographic_equator_and_far_field():
    assert np.allclose(sphere.stereographic(np.array([1.0, 0.0, 0.0])).omega, (1.0, 0.0, 0.0, 0.0), atol=1e-15)
    far_point = sphere.stereographic(np.array([1e3, 0.0, 0.0])).omega
    assert abs(far_point[3] + 1.0) <= 2e-6
    assert sphere.jacobian(np.array([0.0, 1.0, 0.0])) == pytest.approx(1.0, rel=1e-15)


def test_second_bs_eigenvalue_is_one_half():
    values = sphere.bs_radial_eigenvalues(2)
    assert abs(2.0 * values[1] - 1.0) <= 2e-3
