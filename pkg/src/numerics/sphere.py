import logging
from dataclasses import dataclass

import numpy as np
from scipy import integrate, linalg

from src.numerics.spectral_core import full_ilw_operator
from src.numerics.functionals import profile_h
from src.numerics.bridge import BRIDGE_GRID

logger = logging.getLogger(__file__)

UNIT_TOL = 1e-12
BS_MAX_MODES = 12
FH_NODES = 2000


@dataclass(frozen=True)
class SpherePoint:
    """A point of S^3 in R^4."""
    omega: tuple

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        if omega.shape != (4,):
            raise ValueError("A point of S^3 has 4 coordinates")
        if abs(np.linalg.norm(omega) - 1.0) > UNIT_TOL:
            raise ValueError("Point is off the unit sphere by {:.3e}".format(abs(np.linalg.norm(omega) - 1.0)))
        object.__setattr__(self, "omega", tuple(float(x) for x in omega))

    def as_array(self):
        return np.array(self.omega)

    def chord2(self, other):
        return float(np.sum((self.as_array() - other.as_array()) ** 2))


@dataclass(frozen=True)
class ZonalSpec:
    """Zonal kernel k(cos gamma) on S^3, stored through its Funk-Hecke weight 4 pi k sin^2 gamma.

    The default is the Birman-Schwinger kernel (2 pi^2)^{-1} |omega - eta|^{-2}, whose
    weight reduces to (2/pi) cos^2(gamma/2).
    """
    name: str = "bs"

    def weight(self, gamma):
        if self.name != "bs":
            raise ValueError("Unknown zonal kernel {}".format(self.name))
        return 2.0 / np.pi * np.cos(0.5 * gamma) ** 2


def stereographic_array(xs):
    xs = np.asarray(xs, dtype=float)
    r2 = np.sum(xs * xs, axis=-1, keepdims=True)
    return np.concatenate([2.0 * xs, 1.0 - r2], axis=-1) / (1.0 + r2)


def stereographic(x):
    x = np.asarray(x, dtype=float)
    if x.shape != (3,):
        raise ValueError("stereographic expects a point of R^3")
    return SpherePoint(tuple(stereographic_array(x)))


def jacobian(x):
    x = np.asarray(x, dtype=float)
    return (2.0 / (1.0 + np.sum(x * x, axis=-1))) ** 3


def jacobian_integral():
    """Integral of the stereographic Jacobian over R^3, the volume 2 pi^2 of S^3."""
    value, _ = integrate.quad(lambda r: 4.0 * np.pi * r * r * (2.0 / (1.0 + r * r)) ** 3, 0.0, np.inf,
                              epsabs=0.0, epsrel=1e-13, limit=200)
    return value


def conformal_identity_check(x, y):
    """|S(x) - S(y)|^2 against J(x)^{1/3} |x - y|^2 J(y)^{1/3}."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.array_equal(x, y):
        raise ValueError("conformal identity needs x != y")
    wx, wy = stereographic_array(x), stereographic_array(y)
    lhs = float(np.sum((wx - wy) ** 2))
    rhs = float(np.cbrt(jacobian(x)) * np.sum((x - y) ** 2) * np.cbrt(jacobian(y)))
    return lhs, rhs


def conformal_sweep(n=1000, seed=0, scale=3.0):
    """Largest relative gap of the conformal identity and of |S(x)| = 1 over random pairs."""
    rng = np.random.default_rng(seed)
    xs = rng.normal(scale=scale, size=(n, 3))
    ys = rng.normal(scale=scale, size=(n, 3))
    worst_gap, worst_norm = 0.0, 0.0
    for x, y in zip(xs, ys):
        lhs, rhs = conformal_identity_check(x, y)
        worst_gap = max(worst_gap, abs(lhs - rhs) / rhs)
        worst_norm = max(worst_norm, abs(np.linalg.norm(stereographic_array(x)) - 1.0))
    return {"pairs": n, "max_rel_gap": worst_gap, "max_norm_defect": worst_norm}


def chebyshev_u(l, x):
    """U_l(x) by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    prev, cur = np.ones_like(x), 2.0 * x
    if l == 0:
        return prev
    for _ in range(l - 1):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur


def funk_hecke_eigenvalue(l, kernel=None, n_nodes=FH_NODES):
    """(l+1)^{-1} times the integral over [0, pi] of the kernel weight times U_l(cos gamma)."""
    if int(l) != l or l < 0:
        raise ValueError("Harmonic degree must be a non-negative integer, got {}".format(l))
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    gamma = 0.5 * np.pi * (nodes + 1.0)
    kernel = kernel or ZonalSpec()
    integral = 0.5 * np.pi * np.sum(weights * kernel.weight(gamma) * chebyshev_u(int(l), np.cos(gamma)))
    return float(integral / (l + 1))


def harmonic_dim(l):
    if int(l) != l or l < 0:
        raise ValueError("Harmonic degree must be a non-negative integer, got {}".format(l))
    return int((l + 1) ** 2)


def hilbert_schmidt_partial(l_max):
    """Partial sums of dim(l) * eigenvalue(l)^2, l = 0..l_max."""
    sums, total = [], 0.0
    for l in range(l_max + 1):
        total += harmonic_dim(l) * funk_hecke_eigenvalue(l) ** 2
        sums.append(total)
    return sums


def bs_matrix(grid=None):
    """h^{1/2} (T + 2/pi)^{-1} h^{1/2} on the grid."""
    grid = grid or BRIDGE_GRID
    column = np.fft.irfft(1.0 / full_ilw_operator().sampled(grid), n=grid.N)
    weight = np.sqrt(profile_h(grid.t))
    matrix = weight[:, None] * linalg.circulant(column) * weight[None, :]
    return 0.5 * (matrix + matrix.T)


def bs_radial_eigenvalues(n_top, grid=None, with_parity=False):
    """Largest n_top eigenvalues of the radial Birman-Schwinger operator, descending."""
    if int(n_top) != n_top or not 1 <= n_top <= BS_MAX_MODES:
        raise ValueError("n_top must be an integer in [1, {}], got {}".format(BS_MAX_MODES, n_top))
    grid = grid or BRIDGE_GRID
    values, vectors = linalg.eigh(bs_matrix(grid))
    order = np.argsort(values)[::-1][:int(n_top)]
    eigenvalues = [float(values[i]) for i in order]
    if not with_parity:
        return eigenvalues
    parities = [int(np.sign(vectors[:, i] @ vectors[grid.reflection, i])) for i in order]
    return eigenvalues, parities


def kernel_transport_check(grid=None, r_min=0.05, r_max=20.0):
    """d/dr(r R(r)) against Q'(ln r) / r for R = lift(sech), Q' = -sech tanh.

    dR/dr comes from a complex step, R(z) = 1 / (z cosh(log z)).
    """
    grid = grid or BRIDGE_GRID
    r = np.exp(grid.t)
    r = r[(r >= r_min) & (r <= r_max)]
    step = 1e-30
    z = r + 1j * step
    R = 1.0 / (r * np.cosh(np.log(r)))
    dR = np.imag(1.0 / (z * np.cosh(np.log(z)))) / step
    lhs = R + r * dR
    t = np.log(r)
    rhs = -np.tanh(t) / np.cosh(t) / r
    error = float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs)))
    return {"points": int(r.size), "max_rel_error": error, "r_min": float(r[0]), "r_max": float(r[-1]),
            "at_1": _transport_sides(1.0), "at_e": _transport_sides(np.e)}


def _transport_sides(r):
    step = 1e-30
    z = r + 1j * step
    dR = np.imag(1.0 / (z * np.cosh(np.log(z)))) / step
    lhs = 1.0 / (r * np.cosh(np.log(r))) + r * dR
    t = np.log(r)
    return float(lhs), float(-np.tanh(t) / np.cosh(t) / r)
