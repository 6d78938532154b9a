import logging
from dataclasses import dataclass

import numpy as np
import tqdm
from scipy import linalg

from src.numerics.spectral_core import (GridSpec, Profile, frac_laplacian, project_parity, apply_symbol,
                                        spectral_interpolate, lp_norm, LARGE_L)
from src.numerics.groundstate import pointwise_power, residual
from src.numerics.functionals import check_gn_window
from src.numerics.linearization import (build_linearized, nondegeneracy_check, symmetric_even_block,
                                        even_indices)

logger = logging.getLogger(__file__)

SMALL_BOX = GridSpec(20 * np.pi, 1024)
LARGE_BOX = GridSpec(LARGE_L, 2048)
BOX_SWITCH_S = 0.8
LOCAL_RESIDUAL_TOL = 1e-9
MAX_NEWTON = 25
MAX_HALVINGS = 4
GAP_FLOOR = 1e-8


@dataclass
class BranchPoint:
    s: float
    Q: Profile
    residual_sup: float
    even_gap: float
    newton_iters: int = 0
    certificate: str = None

    def to_record(self, profile_ref=None):
        return {
            "s": self.s,
            "residual_sup": self.residual_sup,
            "even_gap": self.even_gap,
            "newton_iters": self.newton_iters,
            "certificate": self.certificate,
            "peak": float(np.max(self.Q.values)),
            "l2_norm": lp_norm(self.Q, 2),
            "grid": self.Q.grid.to_record(),
            "profile_ref": profile_ref,
        }


def local_soliton(alpha, grid=None):
    """((alpha+2)/2)^{1/alpha} sech^{2/alpha}(alpha t / 2), the s = 1 ground state."""
    if not alpha > 0:
        raise ValueError("alpha must be positive, got {}".format(alpha))
    grid = grid or SMALL_BOX
    amp = ((alpha + 2.0) / 2.0) ** (1.0 / alpha)
    Q = Profile.from_function(grid, lambda t: amp / np.cosh(0.5 * alpha * t) ** (2.0 / alpha), "even")
    res = residual(frac_laplacian(1.0), 1.0, alpha, Q)
    if res > LOCAL_RESIDUAL_TOL:
        raise RuntimeError("Grid {} too coarse for the local soliton (residual {:.3e})".format(grid, res))
    return Q


def box_for(s):
    return SMALL_BOX if s >= BOX_SWITCH_S else LARGE_BOX


def transfer(Q, grid):
    """Move Q to another grid through its trigonometric interpolant, zero outside the old box."""
    if Q.grid == grid:
        return Q
    values = spectral_interpolate(Q, grid.t, outside=0.0)
    return Profile(grid, project_parity(values, grid, "even"), "even")


class _EvenSystem:
    """F(Q) = (-Delta)^s Q + Q - Q^{alpha+1} and its Jacobian on the even samples j = 0..N/2."""

    def __init__(self, s, alpha, grid):
        self.alpha = alpha
        self.grid = grid
        self.symbol = frac_laplacian(s).sampled(grid)
        column = np.fft.irfft(self.symbol, n=grid.N)
        idx, _, interior = even_indices(grid.N)
        self.idx = idx
        self.interior = interior
        self.folded_kernel = (column[(idx[:, None] - idx[None, :]) % grid.N]
                              + interior[None, :] * column[(idx[:, None] + idx[None, :]) % grid.N])

    def unfold(self, half):
        N = self.grid.N
        full = np.empty(N)
        full[self.idx] = half
        full[(N - self.idx[self.interior]) % N] = half[self.interior]
        return full

    def residual(self, q):
        return apply_symbol(q, self.symbol) + q - pointwise_power(q, self.alpha + 1)

    def jacobian(self, q):
        jac = self.folded_kernel.copy()
        diag = 1.0 - (self.alpha + 1.0) * pointwise_power(q, self.alpha)[self.idx]
        jac[np.diag_indices_from(jac)] += diag
        return jac

    def gap(self, q):
        return float(np.min(np.abs(linalg.eigvalsh(symmetric_even_block(self.jacobian(q))))))


def newton_correct(s, alpha, Q_init, tol=LOCAL_RESIDUAL_TOL, max_iter=MAX_NEWTON, gap_floor=GAP_FLOOR,
                   full_output=False):
    """Newton iteration for (-Delta)^s Q + Q = Q^{alpha+1} on the even subspace."""
    grid = Q_init.grid
    system = _EvenSystem(s, alpha, grid)
    q = project_parity(np.array(Q_init.values, dtype=float), grid, "even")
    gap = system.gap(q)
    if gap <= gap_floor:
        raise RuntimeError("Even linearization is singular at s = {} (gap {:.3e})".format(s, gap))
    res = np.inf
    for it in range(max_iter + 1):
        F = system.residual(q)
        res = float(np.max(np.abs(F)))
        if res <= tol:
            break
        if it == max_iter:
            raise RuntimeError("Newton did not converge at s = {}: residual {:.3e} after {} steps".format(
                s, res, max_iter))
        try:
            step = linalg.solve(system.jacobian(q), -F[system.idx])
        except (linalg.LinAlgError, ValueError) as e:
            raise RuntimeError("Newton step failed at s = {}: {}".format(s, e))
        q = q + system.unfold(step)
        if not np.all(np.isfinite(q)):
            raise RuntimeError("Newton diverged at s = {}".format(s))
    Q = Profile(grid, project_parity(q, grid, "even"), "even")
    if full_output:
        return Q, {"iterations": it, "residual_sup": res, "even_gap": system.gap(q)}
    return Q


def _certify(s, alpha, Q):
    D = build_linearized(frac_laplacian(s), 1.0, alpha + 1.0, Q, alpha)
    report, _ = nondegeneracy_check(D, Q)
    return report.status


def continue_branch(alpha, s_to, steps, tol=LOCAL_RESIDUAL_TOL, certify=False, full_output=False):
    """Follow Q_s from the local soliton at s = 1 down to s_to."""
    if not 0 < s_to <= 1:
        raise ValueError("s_to must lie in (0, 1], got {}".format(s_to))
    if int(steps) != steps or steps < 1:
        raise ValueError("steps must be a positive integer, got {}".format(steps))
    check_gn_window(s_to, alpha)

    Q = local_soliton(alpha, box_for(1.0))
    system = _EvenSystem(1.0, alpha, Q.grid)
    first = BranchPoint(1.0, Q, residual(frac_laplacian(1.0), 1.0, alpha, Q), system.gap(Q.values))
    if certify:
        first.certificate = _certify(1.0, alpha, Q)
    points = [first]
    diagnostic = None
    targets = np.linspace(1.0, s_to, int(steps) + 1)[1:] if s_to < 1 else []
    base_ds = ds = (s_to - 1.0) / steps
    halvings = 0
    previous = None

    bar = tqdm.tqdm(total=len(targets), mininterval=1, desc="branch")
    for target in targets:
        while points[-1].s > target + 1e-12:
            current = points[-1]
            s_next = max(current.s + ds, target)
            grid = box_for(s_next)
            guess = transfer(current.Q, grid)
            if previous is not None and previous.Q.grid == grid and current.Q.grid == grid:
                ratio = (s_next - current.s) / (current.s - previous.s)
                guess = guess.with_values(current.Q.values + ratio * (current.Q.values - previous.Q.values))
            try:
                Q, info = newton_correct(s_next, alpha, guess, tol=tol, full_output=True)
            except RuntimeError as e:
                halvings += 1
                if halvings > MAX_HALVINGS:
                    diagnostic = "Stopped at s = {:.6f}: {}".format(current.s, e)
                    logger.error(diagnostic)
                    break
                ds *= 0.5
                logger.warning("Step halved to {:.3e} at s = {:.6f}: {}".format(ds, current.s, e))
                continue
            point = BranchPoint(float(s_next), Q, info["residual_sup"], info["even_gap"], info["iterations"])
            if certify:
                point.certificate = _certify(s_next, alpha, Q)
            logger.info("s = {:.4f}: residual {:.3e}, even gap {:.4e}, {} Newton steps".format(
                point.s, point.residual_sup, point.even_gap, point.newton_iters))
            previous = current
            points.append(point)
            halvings = 0
            ds = max(2.0 * ds, base_ds)
        if diagnostic:
            break
        bar.update(1)
    bar.close()

    if full_output:
        return points, {"complete": diagnostic is None, "diagnostic": diagnostic, "halvings": halvings}
    return points


def branch_summary(points, alpha=None):
    """Continuity of s -> Q_s along the accepted points of one grid."""
    changes = []
    for prev, cur in zip(points, points[1:]):
        if prev.Q.grid != cur.Q.grid:
            continue
        diff = np.max(np.abs(cur.Q.values - prev.Q.values))
        changes.append(diff / abs(cur.s - prev.s))
    summary = {
        "points": len(points),
        "s_end": points[-1].s,
        "min_even_gap": min(p.even_gap for p in points),
        "max_residual": max(p.residual_sup for p in points),
    }
    if changes:
        median = float(np.median(changes))
        summary.update({"continuity_constant": float(max(changes)), "median_rate": median,
                        "continuous": bool(max(changes) <= 10.0 * median)})
    end = points[-1]
    if alpha == 1 and abs(end.s - 0.5) < 1e-12:
        target = 2.0 / (1.0 + end.Q.grid.t ** 2)
        summary["distance_to_algebraic"] = float(np.max(np.abs(end.Q.values - target)))
    return summary
