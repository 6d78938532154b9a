import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import linalg

logger = logging.getLogger(__file__)

DEFAULT_L = 20 * np.pi
DEFAULT_N = 2048
LARGE_L = 200.0
LARGE_N = 8192
SMALL_X = 1e-4
PARITY_TOL = 1e-12
EVEN_TOL = 1e-12
PARITIES = (None, "even", "odd")
# relative floor of far kernel entries, measured -4.6e-7 at mu = 1 on the default grid
KERNEL_FLOOR = 1e-6
KERNEL_SHIFTS = (0.1, 2.0 / np.pi, 1.0)


@dataclass(frozen=True)
class GridSpec:
    """Periodic grid t_j = -L + j*h, j = 0..N-1, h = 2L/N, on [-L, L)."""
    L: float = DEFAULT_L
    N: int = DEFAULT_N

    def __post_init__(self):
        if not np.isfinite(self.L) or self.L <= 0:
            raise ValueError("Half width L must be positive, got {}".format(self.L))
        if int(self.N) != self.N or self.N < 4 or self.N % 2:
            raise ValueError("Number of points N must be an even integer >= 4, got {}".format(self.N))
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "N", int(self.N))

    @property
    def h(self):
        return 2.0 * self.L / self.N

    @property
    def dtau(self):
        return np.pi / self.L

    @cached_property
    def t(self):
        t = -self.L + self.h * np.arange(self.N)
        t.setflags(write=False)
        return t

    @cached_property
    def tau(self):
        """Frequencies in rfft order, k = 0..N/2; the last one is the Nyquist mode."""
        tau = self.dtau * np.arange(self.N // 2 + 1)
        tau.setflags(write=False)
        return tau

    @cached_property
    def tau_full(self):
        """All N frequencies -N/2..N/2-1."""
        tau = self.dtau * np.arange(-self.N // 2, self.N // 2)
        tau.setflags(write=False)
        return tau

    @cached_property
    def reflection(self):
        """Index map of t -> -t (j -> N - j mod N)."""
        idx = (-np.arange(self.N)) % self.N
        idx.setflags(write=False)
        return idx

    @cached_property
    def rfft_weights(self):
        """Multiplicity of each rfft mode in the full spectrum."""
        w = np.full(self.N // 2 + 1, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        w.setflags(write=False)
        return w

    def to_record(self):
        return {"L": self.L, "N": self.N}

    @classmethod
    def from_record(cls, record):
        return cls(L=record["L"], N=record["N"])


def _check_parity(values, grid, parity):
    if parity is None:
        return
    if parity not in PARITIES:
        raise ValueError("Unknown parity tag {}".format(parity))
    scale = np.max(np.abs(values))
    if scale == 0:
        return
    sign = 1.0 if parity == "even" else -1.0
    defect = np.max(np.abs(values - sign * values[grid.reflection])) / scale
    if defect > PARITY_TOL:
        raise ValueError("Profile tagged {} has parity defect {:.3e}".format(parity, defect))


def project_parity(values, grid, parity):
    if parity is None:
        return values
    sign = 1.0 if parity == "even" else -1.0
    return 0.5 * (values + sign * values[grid.reflection])


class Profile:
    """Real samples of a function on a GridSpec, optionally tagged even or odd."""

    def __init__(self, grid, values, parity=None):
        values = np.array(values, dtype=float)
        if values.shape != (grid.N,):
            raise ValueError("Profile needs {} samples, got shape {}".format(grid.N, values.shape))
        if not np.all(np.isfinite(values)):
            raise ValueError("Profile samples must be finite")
        _check_parity(values, grid, parity)
        values.setflags(write=False)
        self.grid = grid
        self.values = values
        self.parity = parity

    @classmethod
    def from_function(cls, grid, func, parity=None):
        values = np.asarray(func(np.asarray(grid.t)), dtype=float)
        return cls(grid, project_parity(values, grid, parity), parity)

    def with_values(self, values, parity="keep"):
        parity = self.parity if parity == "keep" else parity
        return Profile(self.grid, project_parity(np.asarray(values, dtype=float), self.grid, parity), parity)

    def scaled(self, factor):
        return self.with_values(factor * self.values)

    def __add__(self, other):
        _same_grid(self, other)
        parity = self.parity if self.parity == other.parity else None
        return Profile(self.grid, self.values + other.values, parity)

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def max_abs(self):
        return float(np.max(np.abs(self.values)))

    def parity_defect(self, parity="even"):
        scale = self.max_abs()
        if scale == 0:
            return 0.0
        sign = 1.0 if parity == "even" else -1.0
        return float(np.max(np.abs(self.values - sign * self.values[self.grid.reflection])) / scale)

    def symmetrized(self):
        return Profile(self.grid, project_parity(self.values, self.grid, "even"), "even")

    def to_record(self):
        return {"grid": self.grid.to_record(), "parity": self.parity, "values": self.values.tolist()}

    @classmethod
    def from_record(cls, record):
        return cls(GridSpec.from_record(record["grid"]), record["values"], record.get("parity"))

    def to_rows(self):
        return [(float(t), float(v)) for t, v in zip(self.grid.t, self.values)]

    def __repr__(self):
        return "Profile(L={}, N={}, parity={}, max={:.6g})".format(self.grid.L, self.grid.N, self.parity,
                                                                   self.max_abs())


def _same_grid(*profiles):
    grid = profiles[0].grid
    for u in profiles[1:]:
        if u.grid != grid:
            raise ValueError("Grid mismatch: {} vs {}".format(grid, u.grid))
    return grid


def ilw_symbol(tau):
    """tau*coth(pi*tau/2) - 2/pi, with a Taylor branch near tau = 0."""
    tau = np.abs(np.asarray(tau, dtype=float))
    x = 0.5 * np.pi * tau
    out = np.empty_like(x)
    small = x < SMALL_X
    xs = x[small]
    # x coth x - 1 = x^2/3 + O(x^4)
    out[small] = (2.0 / np.pi) * xs * xs / 3.0
    xl = x[~small]
    with np.errstate(over="ignore"):
        coth = 1.0 + 2.0 / np.expm1(2.0 * xl)
    out[~small] = tau[~small] * coth - 2.0 / np.pi
    out = np.maximum(out, 0.0)
    if out.ndim == 0:
        return float(out)
    return out


def full_ilw_symbol(tau):
    return ilw_symbol(tau) + 2.0 / np.pi


def frac_lap_symbol(s, tau):
    if not 0 < s <= 1:
        raise ValueError("Fractional order s must lie in (0, 1], got {}".format(s))
    out = np.abs(np.asarray(tau, dtype=float)) ** (2.0 * s)
    if out.ndim == 0:
        return float(out)
    return out


class FourierMultiplier:
    """Real even symbol m(tau) acting as u -> F^{-1}[m * F u]."""

    def __init__(self, symbol, label, params=None):
        self.symbol = symbol
        self.label = label
        self.params = dict(params or {})

    def __call__(self, tau):
        return self.symbol(tau)

    def sampled(self, grid):
        """Symbol on the rfft frequencies of grid; the Nyquist mode takes m(+tau_{N/2})."""
        plus = np.asarray(self.symbol(grid.tau_full), dtype=float)
        minus = np.asarray(self.symbol(-grid.tau_full), dtype=float)
        if not np.all(np.isfinite(plus)):
            raise ValueError("Symbol {} is not finite on the grid".format(self.label))
        scale = max(1.0, float(np.max(np.abs(plus))))
        if np.max(np.abs(plus - minus)) > EVEN_TOL * scale:
            raise ValueError("Symbol {} is not even".format(self.label))
        return np.asarray(self.symbol(grid.tau), dtype=float)

    def plus(self, mu):
        params = dict(self.params)
        params["shift"] = params.get("shift", 0.0) + mu
        symbol = self.symbol
        return FourierMultiplier(lambda tau: symbol(tau) + mu, "{}+{:g}".format(self.label, mu), params)

    def to_record(self):
        return {"label": self.label, "params": self.params}

    def __repr__(self):
        return "FourierMultiplier({})".format(self.label)


def ilw_operator():
    return FourierMultiplier(ilw_symbol, "ilw")


def full_ilw_operator():
    return FourierMultiplier(full_ilw_symbol, "ilw+2/pi")


def frac_laplacian(s):
    if not 0 < s <= 1:
        raise ValueError("Fractional order s must lie in (0, 1], got {}".format(s))
    return FourierMultiplier(lambda tau: frac_lap_symbol(s, tau), "frac_lap(s={:g})".format(s), {"s": s})


def constant_multiplier(c):
    return FourierMultiplier(lambda tau: np.full(np.shape(tau), float(c)), "const({:g})".format(c), {"c": c})


def apply_symbol(values, symbol_r):
    """irfft(symbol * rfft(values)) for a symbol given on rfft frequencies."""
    return np.fft.irfft(symbol_r * np.fft.rfft(values), n=values.size)


def apply_multiplier(m, u):
    values = apply_symbol(u.values, m.sampled(u.grid))
    return Profile(u.grid, project_parity(values, u.grid, u.parity), u.parity)


def quadratic_form(m, u):
    """Sum over all N modes of m(tau_k)|u_hat_k|^2 dtau; with m = 1 this is h*sum(u^2)."""
    return cross_form(m, u, u)


def cross_form(m, u, v):
    grid = _same_grid(u, v)
    uh = np.fft.rfft(u.values)
    vh = np.fft.rfft(v.values)
    terms = grid.rfft_weights * m.sampled(grid) * np.real(uh * np.conj(vh))
    return float(grid.h / grid.N * np.sum(terms))


def invert_shifted(m, mu, f):
    shifted = m.sampled(f.grid) + mu
    if np.min(shifted) <= 0:
        raise ValueError("Symbol of {} + {} is not positive on the grid".format(m.label, mu))
    values = apply_symbol(f.values, 1.0 / shifted)
    return Profile(f.grid, project_parity(values, f.grid, f.parity), f.parity)


def lp_norm(u, p):
    if p < 1:
        raise ValueError("Lebesgue exponent p must be >= 1, got {}".format(p))
    return float((u.grid.h * np.sum(np.abs(u.values) ** p)) ** (1.0 / p))


def inner(u, v):
    grid = _same_grid(u, v)
    return float(grid.h * np.dot(u.values, v.values))


def spectral_derivative(u):
    grid = u.grid
    coeffs = 1j * grid.tau * np.fft.rfft(u.values)
    coeffs[-1] = 0.0
    values = np.fft.irfft(coeffs, n=grid.N)
    parity = {"even": "odd", "odd": "even"}.get(u.parity)
    return Profile(grid, project_parity(values, grid, parity), parity)


def shift_profile(u, c):
    """Samples of u(t - c) through the trigonometric interpolant."""
    grid = u.grid
    coeffs = np.fft.rfft(u.values) * np.exp(-1j * grid.tau * c)
    coeffs[-1] = np.real(coeffs[-1])
    return Profile(grid, np.fft.irfft(coeffs, n=grid.N))


def spectral_interpolate(u, points, outside=None):
    """Evaluate the trigonometric interpolant of u at arbitrary points.

    Points outside [-L, L) get the value ``outside`` when it is given, the
    periodic extension otherwise.
    """
    grid = u.grid
    points = np.atleast_1d(np.asarray(points, dtype=float))
    coeffs = np.fft.rfft(u.values) / grid.N
    weights = grid.rfft_weights
    out = np.empty(points.size)
    for start in range(0, points.size, 512):
        chunk = points[start:start + 512]
        phase = np.exp(1j * np.outer(chunk + grid.L, grid.tau))
        terms = weights * coeffs * phase
        terms[:, -1] = weights[-1] * np.real(coeffs[-1]) * np.cos(grid.tau[-1] * (chunk + grid.L))
        out[start:start + 512] = np.real(np.sum(terms, axis=1))
    if outside is not None:
        out[(points < -grid.L) | (points >= grid.L)] = outside
    return out


def multiplier_matrix(m, grid):
    """Dense matrix of F^{-1} diag(m) F on the grid (circulant, symmetric)."""
    column = np.fft.irfft(m.sampled(grid), n=grid.N)
    matrix = linalg.circulant(column)
    return 0.5 * (matrix + matrix.T)


def inverse_kernel_matrix(m, mu, grid):
    shifted = m.sampled(grid) + mu
    if np.min(shifted) <= 0:
        raise ValueError("Symbol of {} + {} is not positive on the grid".format(m.label, mu))
    column = np.fft.irfft(1.0 / shifted, n=grid.N)
    matrix = linalg.circulant(column)
    return 0.5 * (matrix + matrix.T)


def kernel_positivity(m, mu, grid, near=2.0):
    """Sign report of the dense (m + mu)^{-1} matrix.

    The truncated spectrum leaves an alternating tail of relative size ~1/N,
    so positivity is judged on the band |t_i - t_j| <= near plus a global floor.
    """
    column = np.fft.irfft(1.0 / (m.sampled(grid) + mu), n=grid.N)
    dist = np.minimum(np.arange(grid.N), grid.N - np.arange(grid.N)) * grid.h
    top = float(np.max(column))
    near_min = float(np.min(column[dist <= near]))
    report = {
        "operator": m.label,
        "mu": mu,
        "max_entry": top,
        "min_entry": float(np.min(column)),
        "min_ratio": float(np.min(column)) / top,
        "near_band": near,
        "near_min": near_min,
        "near_positive": near_min > 0,
        "floor_ok": bool(float(np.min(column)) / top >= -KERNEL_FLOOR),
    }
    logger.debug("Kernel positivity {}".format(report))
    return report


if __name__ == '__main__':
    grid = GridSpec()
    print(ilw_symbol(np.array([0.0, 1e-5, 1.0, 2.0])))
    u = Profile.from_function(grid, lambda t: 1 / np.cosh(t), "even")
    print(quadratic_form(ilw_operator(), u), np.pi / 2 - 4 / np.pi)
