import logging
from collections import namedtuple
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from src.numerics.spectral_core import (GridSpec, Profile, ilw_operator, frac_laplacian, quadratic_form,
                                        lp_norm)
from src.numerics.groundstate import residual

logger = logging.getLogger(__file__)

THETA_SERIES = 0.05
COT_SERIES = 1e-3
QUAD_WINDOW = 40.0
QUAD_TAIL_TOL = 1e-10

QuadratureResult = namedtuple("QuadratureResult", ["value", "abs_error", "tail_bound", "converged"])


@dataclass(frozen=True)
class QuotientSpec:
    kind: str
    s: float = None
    alpha: float = None
    theta: float = None

    def __post_init__(self):
        if self.kind == "gagliardo_nirenberg":
            check_gn_window(self.s, self.alpha)
        elif self.kind == "katosob_radial":
            _check_theta(self.theta)
        elif self.kind != "ilw":
            raise ValueError("Unknown quotient kind {}".format(self.kind))

    @property
    def theta_e(self):
        return self.alpha / (2.0 * self.s * (self.alpha + 2.0))

    def evaluate(self, u):
        if self.kind == "gagliardo_nirenberg":
            return gn_quotient(self.s, self.alpha, u)
        if self.kind == "ilw":
            return ilw_quotient(u)
        return katosob_radial_quotient(self.theta, u)

    def sharp_value(self):
        if self.kind == "ilw":
            return sharp_constant_katosob(0.5 * np.pi)
        if self.kind == "katosob_radial":
            return sharp_constant_katosob(self.theta)
        return None


def check_gn_window(s, alpha):
    if not 0 < s <= 1:
        raise ValueError("s must lie in (0, 1], got {}".format(s))
    if not alpha > 0:
        raise ValueError("alpha must be positive, got {}".format(alpha))
    if s < 0.5 and not alpha < 4.0 * s / (1.0 - 2.0 * s):
        raise ValueError("alpha = {} is outside the subcritical window 4s/(1-2s) = {:.6g} for s = {}".format(
            alpha, 4.0 * s / (1.0 - 2.0 * s), s))


def _nonzero(u):
    if not np.any(u.values):
        raise ValueError("Quotient undefined for the zero profile")


def gn_quotient(s, alpha, u):
    quot = QuotientSpec("gagliardo_nirenberg", s=s, alpha=alpha)
    _nonzero(u)
    theta = quot.theta_e
    kinetic = quadratic_form(frac_laplacian(s), u)
    mass = lp_norm(u, 2) ** 2
    return float(kinetic ** (theta / 2.0) * mass ** ((1.0 - theta) / 2.0) / lp_norm(u, alpha + 2))


def ilw_quotient(phi):
    _nonzero(phi)
    return (quadratic_form(ilw_operator(), phi) + 2.0 / np.pi * lp_norm(phi, 2) ** 2) / lp_norm(phi, 3) ** 2


def one_minus_theta_cot(theta):
    if theta < COT_SERIES:
        return theta ** 2 / 3.0 + theta ** 4 / 45.0
    return 1.0 - theta / np.tan(theta)


def _check_theta(theta):
    if not 0 < theta < np.pi:
        raise ValueError("theta must lie in (0, pi), got {}".format(theta))


def ilw_shift(theta):
    """mu(theta) = (2/pi)(1 - theta cot theta), increasing from 0 to infinity on (0, pi)."""
    _check_theta(theta)
    return 2.0 / np.pi * one_minus_theta_cot(theta)


def theta_for_shift(mu):
    if not mu > 0:
        raise ValueError("The shift mu must be positive, got {}".format(mu))
    lo, hi = 1e-12, np.pi - 1e-12
    while ilw_shift(hi) < mu:
        hi = 0.5 * (hi + np.pi)
        if np.pi - hi < 1e-300:
            raise ValueError("Shift {} too large to invert".format(mu))
    return float(optimize.brentq(lambda th: ilw_shift(th) - mu, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps))


def katosob_radial_quotient(theta, phi):
    _check_theta(theta)
    _nonzero(phi)
    return (quadratic_form(ilw_operator(), phi) + ilw_shift(theta) * lp_norm(phi, 2) ** 2) / lp_norm(phi, 3) ** 2


def _katosob_bracket(theta):
    """theta(2 + cos 2theta) - (3/2) sin 2theta, ~ (4/15) theta^5 near zero."""
    if theta < THETA_SERIES:
        return 4.0 / 15.0 * theta ** 5 - 16.0 / 315.0 * theta ** 7 + 4.0 / 945.0 * theta ** 9
    return theta * (2.0 + np.cos(2.0 * theta)) - 1.5 * np.sin(2.0 * theta)


def sharp_constant_katosob(theta):
    _check_theta(theta)
    return float((2.0 * theta / (np.pi * np.sin(theta))) ** (2.0 / 3.0) * _katosob_bracket(theta) ** (1.0 / 3.0))


def sharp_constant_katosob_3d(theta):
    _check_theta(theta)
    return float((4.0 * theta / (np.sqrt(np.pi) * np.sin(theta))) ** (2.0 / 3.0)
                 * _katosob_bracket(theta) ** (1.0 / 3.0))


def profile_h(t):
    t = np.abs(np.asarray(t, dtype=float))
    e = np.exp(-t)
    return 2.0 * e / (1.0 + e * e)


def profile_h_theta(theta, t):
    _check_theta(theta)
    t = np.asarray(t, dtype=float)
    with np.errstate(over="ignore"):
        return 2.0 * theta / np.pi * np.sin(theta) / (np.cosh(2.0 * theta * t / np.pi) + np.cos(theta))


def profile_H(r):
    r = np.asarray(r, dtype=float)
    return 1.0 / (1.0 + r * r)


def profile_H_theta(theta, r):
    _check_theta(theta)
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("H_theta is defined for r > 0 only")
    a = 2.0 * theta / np.pi
    return 1.0 / (r * (r ** a + r ** (-a) + 2.0 * np.cos(theta)))


def sech_profile(grid):
    return Profile.from_function(grid, profile_h, "even")


def h_theta_profile(theta, grid):
    return Profile.from_function(grid, lambda t: profile_h_theta(theta, t), "even")


def ilw_soliton(mu, grid):
    """Positive even solution of T Q + mu Q = Q^2, mu > 0, in closed form."""
    return h_theta_profile(theta_for_shift(mu), grid)


def euler_lagrange_residual_h_theta(theta, grid=None):
    grid = grid or GridSpec()
    return residual(ilw_operator(), ilw_shift(theta), 1, h_theta_profile(theta, grid))


def I_theta_closed(theta):
    return sharp_constant_katosob(theta)


def I_theta_quadrature(theta, full_output=False):
    """Sharp constant as the cube root of the integral of h_theta^3.

    h_theta solves T h + mu h = h^2, so the numerator of its quotient is that
    same integral. The integral is taken in x = a t, a = 2theta/pi, on [0, 40]
    with an exponential bound for the rest.
    """
    _check_theta(theta)
    a = 2.0 * theta / np.pi
    c = np.cos(theta)
    value, abs_error = integrate.quad(lambda x: 1.0 / (np.cosh(x) + c) ** 3, 0.0, QUAD_WINDOW,
                                      epsabs=0.0, epsrel=1e-13, limit=400)
    # cosh x + c >= e^x/4 beyond the window
    tail = 64.0 / 3.0 * np.exp(-3.0 * QUAD_WINDOW)
    converged = tail <= QUAD_TAIL_TOL and abs_error <= 1e-10 * abs(value)
    if not converged:
        logger.warning("I_theta quadrature flag at theta = {}: error {:.3e}, tail {:.3e}".format(
            theta, abs_error, tail))
    amp = a * np.sin(theta)
    cube = 2.0 * amp ** 3 * value / a
    quotient = cube ** (1.0 / 3.0)
    result = QuadratureResult(float(quotient), float(abs_error), float(tail), bool(converged))
    if full_output:
        return result
    return result.value


def random_gaussians(grid, n, seed=0):
    rng = np.random.default_rng(seed)
    profiles = []
    for _ in range(n):
        amp = rng.uniform(0.5, 2.0)
        center = rng.uniform(-5.0, 5.0)
        width = rng.uniform(0.6, 3.0)
        profiles.append(Profile.from_function(grid, lambda t: amp * np.exp(-((t - center) / width) ** 2)))
    return profiles


def theta_sweep_row(theta, grid=None):
    quad = I_theta_quadrature(theta, full_output=True)
    return {
        "theta": float(theta),
        "closed": sharp_constant_katosob(theta),
        "quadrature": quad.value,
        "quadrature_converged": quad.converged,
        "el_residual": euler_lagrange_residual_h_theta(theta, grid),
    }
