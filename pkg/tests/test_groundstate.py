import numpy as np
import pytest

from src.numerics.spectral_core import Profile, ilw_operator, frac_laplacian
from src.numerics.groundstate import (SolveParams, petviashvili, residual, weak_residual, pointwise_power,
                                      dealiased_power, gaussian_profile, center_of_mass, recenter)
from src.numerics.functionals import ilw_soliton
from src.numerics import groundstate


def test_ilw_groundstate_is_sech(grid, sech):
    result = petviashvili(ilw_operator(), 2.0 / np.pi, 1, gaussian_profile(grid))
    assert result.converged
    assert result.residual_sup <= 1e-10
    assert np.max(np.abs(result.Q.values - sech.values)) <= 1e-6
    assert result.Q.parity == "even"
    assert abs(result.factor - 1.0) <= 1e-8


def test_ilw_groundstate_general_shift(grid):
    result = petviashvili(ilw_operator(), 1.0, 1, gaussian_profile(grid, width=2.0))
    assert result.converged
    assert np.max(np.abs(result.Q.values - ilw_soliton(1.0, grid).values)) <= 1e-6


@pytest.mark.parametrize("alpha", [1, 2])
def test_local_groundstate(grid, alpha):
    result = petviashvili(frac_laplacian(1.0), 1.0, alpha, gaussian_profile(grid))
    amp = ((alpha + 2.0) / 2.0) ** (1.0 / alpha)
    exact = amp / np.cosh(0.5 * alpha * grid.t) ** (2.0 / alpha)
    assert result.converged
    assert np.max(np.abs(result.Q.values - exact)) <= 1e-6


def test_translated_start_recenters(grid, sech):
    init = gaussian_profile(grid, center=2.0)
    assert init.parity is None
    result = petviashvili(ilw_operator(), 2.0 / np.pi, 1, init, SolveParams(symmetrize_every=0))
    assert result.Q.parity is None
    assert center_of_mass(result.Q) == pytest.approx(2.0, abs=1e-6)
    assert np.max(np.abs(recenter(result.Q).values - sech.values)) <= 1e-6


def test_petviashvili_rejects_bad_input(grid):
    with pytest.raises(ValueError):
        petviashvili(ilw_operator(), 2.0 / np.pi, -1, gaussian_profile(grid))
    with pytest.raises(ValueError):
        petviashvili(ilw_operator(), -1.0, 1, gaussian_profile(grid))
    with pytest.raises(ValueError):
        petviashvili(ilw_operator(), 1.0, 1, Profile(grid, np.zeros(grid.N)))


def test_params_validation():
    with pytest.raises(ValueError):
        SolveParams(max_iters=0).validate()
    with pytest.raises(ValueError):
        SolveParams(residual_tol=0.0).validate()
    with pytest.raises(ValueError):
        SolveParams(petviashvili_gamma=0.5).validate()
    assert SolveParams().to_record()["dealias"] is True


def test_non_convergence_is_flagged(grid):
    result = petviashvili(ilw_operator(), 2.0 / np.pi, 1, gaussian_profile(grid), SolveParams(max_iters=3))
    assert not result.converged
    assert result.iterations == 3
    record = result.to_record("profile.csv")
    assert record["converged"] is False
    assert record["profile_ref"] == "profile.csv"


def test_residuals_of_sech(sech):
    assert residual(ilw_operator(), 2.0 / np.pi, 1, sech) < 1e-12
    phi = gaussian_profile(sech.grid, center=0.5, width=1.3)
    assert abs(weak_residual(ilw_operator(), 2.0 / np.pi, 1, sech, phi)) < 1e-12
    assert residual(ilw_operator(), 1.0, 1, sech) > 1e-2


def test_powers(small_grid):
    values = np.exp(-small_grid.t ** 2)
    assert np.max(np.abs(dealiased_power(values, 2) - values ** 2)) < 1e-13
    assert np.max(np.abs(dealiased_power(values, 3) - values ** 3)) < 1e-13
    assert np.all(pointwise_power(np.array([-1.0, 4.0]), 0.5) == np.array([0.0, 2.0]))
    assert np.all(pointwise_power(np.array([-2.0]), 2) == np.array([4.0]))


def _scripted(values):
    values = iter(values)
    return lambda *args: next(values)


def test_non_convergence_returns_best_iterate(small_grid, monkeypatch):
    init = gaussian_profile(small_grid)
    monkeypatch.setattr(groundstate, "residual", _scripted([3.0, 1.0]))
    second = petviashvili(ilw_operator(), 2.0 / np.pi, 1, init, SolveParams(max_iters=2))
    monkeypatch.setattr(groundstate, "residual", _scripted([3.0, 1.0, 2.0]))
    result = petviashvili(ilw_operator(), 2.0 / np.pi, 1, init, SolveParams(max_iters=3))
    assert not result.converged
    assert result.iterations == 3
    assert result.residual_sup == 1.0
    assert result.factor == second.factor
    assert np.array_equal(result.Q.values, second.Q.values)
