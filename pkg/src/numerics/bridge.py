"""Radial bridge between profiles on the line and radial functions on R^3.

A profile phi(t) is lifted to psi(r) = phi(ln r) / r. Under this map the
quadratic form of sqrt(-Delta) on radial functions becomes 4 pi (phi, (T + 2/pi) phi),
|x|^{-1} weights become plain L^2 and the L^3 norm is preserved up to 4 pi.
"""
import logging

import numpy as np
from scipy import fft as sp_fft
from scipy import integrate

from src.numerics.spectral_core import (GridSpec, Profile, full_ilw_operator, full_ilw_symbol, quadratic_form,
                                        lp_norm, spectral_derivative, spectral_interpolate)
from src.numerics.functionals import one_minus_theta_cot
from src.numerics.groundstate import residual

logger = logging.getLogger(__file__)

BRIDGE_GRID = GridSpec(20 * np.pi, 1024)
SINH_BAND = 4
SINH_CHUNK = 256
BAND_FLAG = 0.1
HANKEL_EDGE_TOL = 1e-8
HANKEL_K_FACTOR = 4.0
HANKEL_SUPPORT_TOL = 1e-12
HANKEL_TAIL_FLAG = 1e-6
IDENTITY_TOL = 1e-10


class RadialProfile3D:
    """psi(r) = phi(ln r) / r for a profile phi on the line."""

    def __init__(self, partner):
        self.partner = partner

    @property
    def grid(self):
        return self.partner.grid

    @property
    def radii(self):
        return np.exp(self.grid.t)

    def samples(self):
        """(r_j, psi(r_j)) with r_j = exp(t_j)."""
        r = self.radii
        return r, self.partner.values / r

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0):
            raise ValueError("Radial profile is evaluated at r > 0 only")
        return spectral_interpolate(self.partner, np.log(r), outside=0.0) / r


def lift(phi):
    return RadialProfile3D(phi)


def form_via_symbol(phi):
    """(psi, sqrt(-Delta) psi) = 4 pi (phi, (T + 2/pi) phi)."""
    return 4.0 * np.pi * quadratic_form(full_ilw_operator(), phi)


def form_via_sinh(phi, full_output=False):
    """2 times the double integral of |phi(t) - phi(u)|^2 / sinh^2(t - u), plus 8 ||phi||^2.

    Near the diagonal the integrand is evaluated as the squared divided
    difference times ((t-u)/sinh(t-u))^2, with phi' on the diagonal itself.
    """
    grid = phi.grid
    t, v = grid.t, phi.values
    dv = spectral_derivative(phi).values
    band_width = SINH_BAND * grid.h
    total, band_total = 0.0, 0.0
    for start in range(0, grid.N, SINH_CHUNK):
        rows = slice(start, start + SINH_CHUNK)
        d = t[rows, None] - t[None, :]
        diag = d == 0
        safe = np.where(diag, 1.0, d)
        quotient = np.where(diag, dv[rows, None], (v[rows, None] - v[None, :]) / safe)
        ratio = np.where(diag, 1.0, safe / np.sinh(safe))
        integrand = (quotient * ratio) ** 2
        total += float(np.sum(integrand))
        band_total += float(np.sum(integrand[np.abs(d) < band_width]))
    double = total * grid.h ** 2
    value = 2.0 * double + 8.0 * lp_norm(phi, 2) ** 2
    band_fraction = 2.0 * band_total * grid.h ** 2 / value if value else 0.0
    flagged = band_fraction > BAND_FLAG
    if flagged:
        logger.warning("Diagonal band carries {:.1%} of the sinh form".format(band_fraction))
    if full_output:
        return value, {"band_fraction": band_fraction, "flagged": flagged, "double_integral": double}
    return value


def form_via_hankel(phi, full_output=False):
    """(psi, sqrt(-Delta) psi) = 4 pi integral of k^4 |psi_hat(k)|^2 dk/k over k > 0.

    psi_hat is the radial Fourier transform, computed with the FFTLog Hankel
    transform of order 1/2 on the log-uniform radii r_j = exp(t_j).
    """
    grid = phi.grid
    t = grid.t
    a = phi.values * np.exp(0.5 * t)
    edge = max(abs(a[0]), abs(a[-1])) / max(np.max(np.abs(a)), 1e-300)
    if edge > HANKEL_EDGE_TOL:
        raise ValueError("Profile does not decay fast enough for the Hankel route (edge ratio {:.3e})".format(edge))
    dln = grid.h
    offset = sp_fft.fhtoffset(dln, mu=0.5)
    transformed = sp_fft.fht(a, dln, mu=0.5, offset=offset)
    ln_rc = t[0] + 0.5 * (grid.N - 1) * dln
    k = np.exp(offset - ln_rc + (np.arange(grid.N) - 0.5 * (grid.N - 1)) * dln)
    # psi_hat(k) = k^{-3/2} times the order 1/2 transform of phi(ln r) r^{1/2}
    psi_hat = transformed / k ** 1.5
    # above k_cut the samples are roundoff amplified by k
    support = t[np.abs(phi.values) >= HANKEL_SUPPORT_TOL * phi.max_abs()]
    k_cut = max(HANKEL_K_FACTOR * grid.tau[-1], np.exp(2.0 - support[0]))
    keep = k <= k_cut
    integrand = (k ** 4 * psi_hat ** 2)[keep]
    value = 4.0 * np.pi * dln * float(np.sum(integrand))
    tail = 4.0 * np.pi * float(max(integrand[0], integrand[-1]))
    flagged = tail > HANKEL_TAIL_FLAG * abs(value)
    if flagged:
        logger.warning("Hankel tail bound {:.3e} exceeds {:g} of the form".format(tail, HANKEL_TAIL_FLAG))
    if full_output:
        return value, {"tail_bound": tail, "flagged": flagged, "k_min": float(k[0]), "k_max": float(k[keep][-1])}
    return value


FORM_ROUTES = {"symbol": form_via_symbol, "sinh": form_via_sinh, "hankel": form_via_hankel}


def gr_identity_check(tau):
    """Both sides of integral sin^2(tau t/2)/sinh^2 t dt = (pi tau/2) coth(pi tau/2) - 1."""
    tau = float(tau)

    def integrand(t):
        if abs(t) < 1e-8:
            return 0.25 * tau * tau
        return np.sin(0.5 * tau * t) ** 2 / np.sinh(t) ** 2

    half, _ = integrate.quad(integrand, 0.0, 50.0, epsabs=1e-15, epsrel=1e-13, limit=400)
    closed = 0.5 * np.pi * full_ilw_symbol(tau) - 1.0
    return 2.0 * half, float(closed)


def angular_reduction_check(r, s):
    """2 pi integral over [-1, 1] of (r^2 - 2 r s t + s^2)^{-2} dt against 4 pi / (r^2 - s^2)^2."""
    if r <= 0 or s <= 0:
        raise ValueError("Radii must be positive")
    if abs(r - s) < 1e-6:
        raise ValueError("Radii too close: |r - s| = {:.3e}".format(abs(r - s)))
    value, _ = integrate.quad(lambda t: (r * r - 2.0 * r * s * t + s * s) ** -2, -1.0, 1.0,
                              epsabs=0.0, epsrel=1e-13, limit=400)
    return 2.0 * np.pi * value, 4.0 * np.pi / (r * r - s * s) ** 2


def weight_maps(phi):
    """||psi||_3^3 and (psi, |x|^{-1} psi) by radial quadrature in r against their 1D images."""
    r, psi = lift(phi).samples()
    h = phi.grid.h
    cube = 4.0 * np.pi * h * float(np.sum(r ** 3 * np.abs(psi) ** 3))
    hardy = 4.0 * np.pi * h * float(np.sum(r ** 2 * psi ** 2))
    cube_target = 4.0 * np.pi * lp_norm(phi, 3) ** 3
    hardy_target = 4.0 * np.pi * lp_norm(phi, 2) ** 2
    gap = max(abs(cube - cube_target) / cube_target, abs(hardy - hardy_target) / hardy_target)
    violation = gap > IDENTITY_TOL
    if violation:
        logger.warning("Weight map identity off by {:.3e}".format(gap))
    return {"l3_cubed": cube, "l3_cubed_target": cube_target, "hardy": hardy, "hardy_target": hardy_target,
            "rel_gap": gap, "violation": violation}


def h1_analogue_check(phi, margin=0.1):
    """Dirichlet energy of r^{-1/2} phi(ln r) against 4 pi (||phi'||^2 + ||phi||^2 / 4)."""
    grid = phi.grid
    outer = np.abs(grid.t) > (1.0 - margin) * grid.L
    if np.max(np.abs(phi.values[outer])) > 1e-14 * phi.max_abs():
        raise ValueError("Profile must vanish near the edges of the box")
    g = Profile(grid, np.exp(-0.5 * grid.t) * phi.values)
    dg = spectral_derivative(g).values
    lhs = 4.0 * np.pi * grid.h * float(np.sum(np.exp(grid.t) * dg ** 2))
    rhs = 4.0 * np.pi * (lp_norm(spectral_derivative(phi), 2) ** 2 + 0.25 * lp_norm(phi, 2) ** 2)
    return lhs, rhs


def l3_norm_3d(phi):
    return (4.0 * np.pi * lp_norm(phi, 3) ** 3) ** (1.0 / 3.0)


def sobolev_quotient(phi, route="symbol"):
    if route not in FORM_ROUTES:
        raise ValueError("Unknown route {}".format(route))
    return FORM_ROUTES[route](phi) / l3_norm_3d(phi) ** 2


def kato_remainder(phi):
    """(psi, sqrt(-Delta) psi) - (2/pi)(psi, |x|^{-1} psi) = 4 pi (phi, T phi)."""
    return form_via_symbol(phi) - 8.0 * lp_norm(phi, 2) ** 2


def katosob_3d_quotient(theta, phi):
    if not 0 < theta < np.pi:
        raise ValueError("theta must lie in (0, pi), got {}".format(theta))
    hardy = 4.0 * np.pi * lp_norm(phi, 2) ** 2
    numerator = form_via_symbol(phi) - 2.0 / np.pi * (1.0 - one_minus_theta_cot(theta)) * hardy
    return numerator / l3_norm_3d(phi) ** 2


def equation_transport_residual(Q):
    """sup |(T + 2/pi)Q - Q^2|; r^{-2} times it is the residual of sqrt(-Delta)R - R^2 at R = lift(Q)."""
    return residual(full_ilw_operator(), 0.0, 1, Q)


def three_way_forms(phi):
    forms = {"symbol": form_via_symbol(phi)}
    forms["sinh"], sinh_info = form_via_sinh(phi, full_output=True)
    forms["hankel"], hankel_info = form_via_hankel(phi, full_output=True)
    forms["band_fraction"] = sinh_info["band_fraction"]
    forms["hankel_tail"] = hankel_info["tail_bound"]
    return forms


def suite_profiles(grid=None):
    """Smooth test profiles whose lifts decay fast enough for every route."""
    grid = grid or BRIDGE_GRID
    sech = lambda t: 1.0 / np.cosh(t)
    funcs = {
        "sech": sech,
        "sech_shifted": lambda t: sech(t - 1.0),
        "sech_narrow": lambda t: 1.5 * sech(2.0 * t),
        "sech_squared": lambda t: sech(t) ** 2,
        "sech_tilted": lambda t: sech(t) * (1.0 + 0.3 * np.tanh(t)),
        "gauss": lambda t: np.exp(-t ** 2),
        "gauss_wide": lambda t: np.exp(-t ** 2 / 9.0),
        "gauss_shifted": lambda t: 0.7 * np.exp(-(t + 2.0) ** 2 / 2.0),
        "gauss_odd": lambda t: t * np.exp(-t ** 2),
        "gauss_wave": lambda t: np.exp(-t ** 2 / 4.0) * np.cos(2.0 * t),
    }
    return {name: Profile.from_function(grid, f) for name, f in funcs.items()}
