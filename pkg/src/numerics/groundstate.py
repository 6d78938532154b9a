import logging
from dataclasses import dataclass, asdict

import numpy as np

from src.numerics.spectral_core import (Profile, apply_symbol, project_parity, inner, cross_form,
                                        shift_profile)

logger = logging.getLogger(__file__)


@dataclass
class SolveParams:
    max_iters: int = 2000
    residual_tol: float = 1e-10
    petviashvili_gamma: float = None
    symmetrize_every: int = 1
    factor_tol: float = 1e-8
    dealias: bool = True

    def validate(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.residual_tol > 0:
            raise ValueError("residual_tol must be positive")
        if self.symmetrize_every < 0:
            raise ValueError("symmetrize_every must be >= 0")
        if self.petviashvili_gamma is not None and not self.petviashvili_gamma > 1:
            raise ValueError("petviashvili_gamma must exceed 1")
        return self

    def to_record(self):
        return asdict(self)


class SolveResult:
    def __init__(self, Q, residual_sup, iterations, converged, factor, params):
        self.Q = Q
        self.residual_sup = residual_sup
        self.iterations = iterations
        self.converged = converged
        self.factor = factor
        self.params = params

    def to_record(self, profile_ref=None):
        return {
            "residual_sup": self.residual_sup,
            "iterations": self.iterations,
            "converged": self.converged,
            "stabilizing_factor": self.factor,
            "params": self.params.to_record(),
            "grid": self.Q.grid.to_record(),
            "peak": float(np.max(self.Q.values)),
            "profile_ref": profile_ref,
        }

    def __repr__(self):
        return "SolveResult(converged={}, iterations={}, residual={:.3e})".format(
            self.converged, self.iterations, self.residual_sup)


def _is_integer(x):
    return float(x).is_integer()


def pointwise_power(values, p):
    if _is_integer(p):
        return values ** int(p)
    return np.maximum(values, 0.0) ** p


def dealiased_power(values, p):
    """values**p computed on a zero-padded grid and truncated back to N modes."""
    n = values.size
    m = int(np.ceil(n * (p + 1) / 2.0))
    m += m % 2
    coeffs = np.fft.rfft(values)
    padded = np.zeros(m // 2 + 1, dtype=complex)
    padded[:n // 2 + 1] = coeffs
    padded[n // 2] *= 0.5
    fine = np.fft.irfft(padded, n=m) * (m / n)
    back = np.fft.rfft(fine ** int(p))[:n // 2 + 1] * (n / m)
    back[-1] = 2.0 * np.real(back[-1])
    return np.fft.irfft(back, n=n)


def nonlinearity(values, alpha, dealias):
    if dealias and _is_integer(alpha):
        return dealiased_power(values, alpha + 1)
    return pointwise_power(values, alpha + 1)


def residual(m, mu, alpha, Q):
    """sup |m(D)Q + mu Q - Q^{alpha+1}| at the grid points."""
    if not np.any(Q.values):
        return 0.0
    values = apply_symbol(Q.values, m.sampled(Q.grid)) + mu * Q.values - pointwise_power(Q.values, alpha + 1)
    return float(np.max(np.abs(values)))


def weak_residual(m, mu, alpha, Q, phi):
    """(phi, (m + mu)Q) - integral of phi*Q^{alpha+1}."""
    power = Q.with_values(pointwise_power(Q.values, alpha + 1), parity=None)
    return cross_form(m.plus(mu), phi, Q) - inner(phi, power)


def petviashvili(m, mu, alpha, init, params=None):
    params = (params or SolveParams()).validate()
    if not alpha > 0:
        raise ValueError("alpha must be positive, got {}".format(alpha))
    gamma = params.petviashvili_gamma or (alpha + 1.0) / alpha
    grid = init.grid
    shifted = m.sampled(grid) + mu
    if np.min(shifted) <= 0:
        raise ValueError("m + mu = {} + {} is not positive on the grid".format(m.label, mu))
    weights = grid.rfft_weights

    q = np.array(init.values, dtype=float)
    if params.symmetrize_every:
        q = project_parity(q, grid, "even")
    if not np.any(q):
        raise ValueError("Initial profile is identically zero")

    res, factor, converged, it = np.inf, np.nan, False, 0
    best = (np.inf, q, np.nan, 0)
    for it in range(1, params.max_iters + 1):
        nl = nonlinearity(q, alpha, params.dealias)
        denom = grid.h * np.dot(q, nl)
        if not denom > 0:
            raise RuntimeError("Petviashvili collapsed at iteration {} (<Q, N(Q)> = {:.3e})".format(it, denom))
        qh = np.fft.rfft(q)
        numer = grid.h / grid.N * np.sum(weights * shifted * np.abs(qh) ** 2)
        factor = numer / denom
        q = factor ** gamma * np.fft.irfft(np.fft.rfft(nl) / shifted, n=grid.N)
        if params.symmetrize_every and it % params.symmetrize_every == 0:
            q = project_parity(q, grid, "even")
        if not np.all(np.isfinite(q)) or not np.any(q):
            raise RuntimeError("Petviashvili iterate degenerated at iteration {}".format(it))
        res = residual(m, mu, alpha, Profile(grid, q))
        logger.debug("iter {} factor {:.12f} residual {:.3e}".format(it, factor, res))
        if res < best[0]:
            best = (res, q.copy(), factor, it)
        if res <= params.residual_tol and abs(factor - 1.0) <= params.factor_tol:
            converged = True
            break
    if not converged and best[3] != it:
        logger.warning("Returning iterate {} of {}, residual {:.3e}".format(best[3], it, best[0]))
        res, q, factor = best[:3]

    parity = "even" if params.symmetrize_every else None
    Q = Profile(grid, project_parity(q, grid, parity), parity)
    if converged:
        logger.info("Petviashvili {} converged in {} iterations, residual {:.3e}".format(m.label, it, res))
    else:
        logger.warning("Petviashvili {} stopped after {} iterations, residual {:.3e}, factor {:.3e}".format(
            m.label, it, res, factor))
    return SolveResult(Q, res, it, converged, float(factor), params)


def gaussian_profile(grid, center=0.0, width=1.0, amplitude=1.0):
    parity = "even" if center == 0 else None
    return Profile.from_function(grid, lambda t: amplitude * np.exp(-((t - center) / width) ** 2), parity)


def center_of_mass(Q):
    w = Q.values ** 2
    return float(np.sum(Q.grid.t * w) / np.sum(w))


def recenter(Q):
    c = center_of_mass(Q)
    return shift_profile(Q, -c).symmetrized()


if __name__ == '__main__':
    from src.numerics.spectral_core import GridSpec, ilw_operator
    grid = GridSpec()
    result = petviashvili(ilw_operator(), 2 / np.pi, 1, gaussian_profile(grid))
    print(result, np.max(np.abs(result.Q.values - 1 / np.cosh(grid.t))))
