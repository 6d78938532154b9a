import os
import logging

import numpy as np

from src.inputters.data_utils import *
from src.numerics.spectral_core import (GridSpec, Profile, ilw_operator, frac_laplacian, kernel_positivity,
                                        KERNEL_FLOOR, KERNEL_SHIFTS)
from src.numerics.groundstate import SolveParams, petviashvili, gaussian_profile
from src.numerics import functionals as fn
from src.numerics import bridge
from src.numerics import sphere
from src.numerics.linearization import build_linearized, nondegeneracy_check, OVERLAP_MIN, GAP_FACTOR
from src.numerics.continuation import continue_branch, branch_summary, local_soliton, LARGE_BOX

logger = logging.getLogger(__file__)

GR_TAUS = (0.5, 1.0, 2.0, 5.0)
KATOSOB_THETAS = (np.pi / 6, np.pi / 4, np.pi / 3, np.pi / 2)
N_RANDOM = 50
N_ANGULAR = 20
N_CONFORMAL = 1000
BS_TOP = 6
CONTINUATION_STEPS = 50
HALF_ZERO_TOL = 1e-3
CHECK_KINDS = ("abs", "rel", "geq", "leq")


def add_check_args(parser):
    """Arguments tuning the verification check groups"""
    group = parser.add_argument_group('Check Arguments')
    group.add_argument('--tau', type=float, nargs='+', default=None,
                       help="Frequencies of the gr-identity group (default 0.5 1 2 5)")
    group.add_argument('--lmax', type=int, default=10, help="Largest harmonic degree of the funk-hecke group")
    group.add_argument('--seed', type=int, default=0, help="Seed of the random profiles and samples")
    return group


def make_check(name, anchor, lhs, rhs, tolerance, kind="abs"):
    if kind not in CHECK_KINDS:
        raise ValueError("Unknown check kind {}".format(kind))
    if not anchor:
        raise ValueError("Check {} needs an anchor".format(name))
    lhs, rhs = float(lhs), float(rhs)
    abs_gap = abs(lhs - rhs)
    rel_gap = abs_gap / abs(rhs) if rhs != 0 else abs_gap
    if kind == "abs":
        passed = abs_gap <= tolerance
    elif kind == "rel":
        passed = rel_gap <= tolerance
    elif kind == "geq":
        passed = lhs >= rhs - tolerance
    else:
        passed = lhs <= rhs + tolerance
    return {"name": name, "paper_anchor": anchor, "lhs": lhs, "rhs": rhs, "abs_gap": abs_gap, "rel_gap": rel_gap,
            "tolerance": float(tolerance), "kind": kind, "pass": bool(passed)}


def error_check(group, e):
    return {"name": group, "paper_anchor": "check group raised", "lhs": None, "rhs": None, "abs_gap": None,
            "rel_gap": None, "tolerance": None, "kind": "error", "pass": False,
            "error": "{}: {}".format(type(e).__name__, e)}


def check_ilw_groundstate(opt):
    grid = GridSpec()
    anchor = "ILW ground state is h = sech"
    result = petviashvili(ilw_operator(), 2.0 / np.pi, 1, gaussian_profile(grid))
    sech = fn.sech_profile(grid)
    rows = [
        make_check("ilw-groundstate-distance", anchor, np.max(np.abs(result.Q.values - sech.values)), 0.0, 1e-6),
        make_check("ilw-groundstate-residual", anchor, result.residual_sup, 0.0, 1e-10, "leq"),
    ]
    mu = 1.0
    general = petviashvili(ilw_operator(), mu, 1, gaussian_profile(grid))
    exact = fn.ilw_soliton(mu, grid)
    rows.append(make_check("ilw-groundstate-general-shift", "ILW solitary wave h_theta for any shift",
                           np.max(np.abs(general.Q.values - exact.values)), 0.0, 1e-6))
    return rows


def check_ilw_sharp_constant(opt):
    grid = GridSpec()
    anchor = "sharp ILW inequality, constant (pi/2)^(1/3)"
    sharp = fn.QuotientSpec("ilw").sharp_value()
    rows = [make_check("ilw-sharp-constant-closed", anchor, sharp, (np.pi / 2) ** (1.0 / 3.0), 1e-14),
            make_check("ilw-sharp-constant-optimizer", anchor, fn.ilw_quotient(fn.sech_profile(grid)), sharp, 1e-6)]
    scores = [fn.ilw_quotient(u) for u in fn.random_gaussians(grid, N_RANDOM, opt.seed)]
    rows.append(make_check("ilw-sharp-constant-random-minimum", anchor, min(scores), sharp, 1e-6, "geq"))
    return rows


def check_gn_local(opt):
    """Weinstein functional at s = 1: the explicit soliton beats random profiles."""
    grid = GridSpec()
    anchor = "Gagliardo-Nirenberg optimizer at s = 1"
    alpha = 1.0
    Q = local_soliton(alpha, grid)
    best = fn.gn_quotient(1.0, alpha, Q)
    scores = [fn.gn_quotient(1.0, alpha, u) for u in fn.random_gaussians(grid, N_RANDOM, opt.seed)]
    return [make_check("gn-local-random-minimum", anchor, min(scores), best, 1e-8, "geq")]


def check_frac_groundstates(opt):
    rows = []
    grid = GridSpec()
    local = petviashvili(frac_laplacian(1.0), 1.0, 1, gaussian_profile(grid))
    exact = local_soliton(1.0, grid)
    rows.append(make_check("frac-groundstate-local-distance", "s = 1 ground state (3/2) sech^2(t/2)",
                           np.max(np.abs(local.Q.values - exact.values)), 0.0, 1e-6))
    half = _half_groundstate()
    target = 2.0 / (1.0 + half.Q.grid.t ** 2)
    rows.append(make_check("frac-groundstate-half-distance", "s = 1/2 ground state 2/(1+t^2)",
                           np.max(np.abs(half.Q.values - target)), 0.0, 1e-3))
    rows.append(make_check("frac-groundstate-half-residual", "s = 1/2 ground state 2/(1+t^2)",
                           half.residual_sup, 0.0, 1e-10, "leq"))
    return rows


def _half_groundstate():
    return petviashvili(frac_laplacian(0.5), 1.0, 1, gaussian_profile(LARGE_BOX), SolveParams(dealias=False))


def _nondegeneracy_rows(tag, anchor, D, Q, zero_tol=None):
    report, spectral = nondegeneracy_check(D, Q, zero_tol)
    prefix = "nondegeneracy-" + tag
    return [
        make_check(prefix + "-zero-modes", anchor, len(spectral.zero_modes), 1, 0.0),
        make_check(prefix + "-overlap", anchor, report.overlap, OVERLAP_MIN, 0.0, "geq"),
        make_check(prefix + "-gap-ratio", anchor, abs(report.next_eigenvalue) / report.zero_tol, GAP_FACTOR, 0.0,
                   "geq"),
    ]


def check_nondegeneracy_ilw(opt):
    grid = GridSpec()
    h = fn.sech_profile(grid)
    D = build_linearized(ilw_operator(), 2.0 / np.pi, 2.0, h, 1)
    return _nondegeneracy_rows("ilw", "kernel of T - 2h + 2/pi is spanned by h'", D, h)


def check_nondegeneracy_local(opt):
    grid = GridSpec()
    Q = local_soliton(1.0, grid)
    D = build_linearized(frac_laplacian(1.0), 1.0, 2.0, Q, 1)
    return _nondegeneracy_rows("local", "non-degeneracy of L+ at s = 1", D, Q)


def check_nondegeneracy_half(opt):
    Q = _half_groundstate().Q
    D = build_linearized(frac_laplacian(0.5), 1.0, 2.0, Q, 1)
    return _nondegeneracy_rows("half", "non-degeneracy of L+ at s = 1/2", D, Q, HALF_ZERO_TOL)


def check_sobolev_transport(opt):
    h = fn.sech_profile(bridge.BRIDGE_GRID)
    target = 2.0 ** (1.0 / 3.0) * np.pi ** (2.0 / 3.0)
    return [make_check("sobolev-transport-hankel", "sharp Sobolev constant transported from the ILW inequality",
                       bridge.sobolev_quotient(h, "hankel"), target, 1e-5, "rel"),
            make_check("sobolev-transport-symbol", "sharp Sobolev constant transported from the ILW inequality",
                       bridge.sobolev_quotient(h, "symbol"), target, 1e-5, "rel")]


def check_three_way(opt):
    anchor = "radial form of sqrt(-Delta) by symbol, sinh kernel and Hankel transform"
    rows = []
    for name, phi in sorted(bridge.suite_profiles().items()):
        forms = bridge.three_way_forms(phi)
        rows.append(make_check("three-way-{}-sinh".format(name), anchor, forms["sinh"], forms["symbol"], 1e-5, "rel"))
        rows.append(make_check("three-way-{}-hankel".format(name), anchor, forms["hankel"], forms["symbol"], 1e-5,
                               "rel"))
    return rows


def check_kato_remainder(opt):
    h = fn.sech_profile(bridge.BRIDGE_GRID)
    _, info = bridge.form_via_sinh(h, full_output=True)
    remainder = bridge.kato_remainder(h)
    anchor = "Kato inequality remainder equals the sinh double integral"
    return [make_check("kato-remainder-sinh", anchor, remainder, 2.0 * info["double_integral"], 1e-5, "rel"),
            make_check("kato-remainder-positive", anchor, remainder, 0.0, 0.0, "geq")]


def check_gr_identity(opt):
    taus = GR_TAUS if opt.tau is None else np.atleast_1d(opt.tau)
    rows = []
    for tau in taus:
        lhs, rhs = bridge.gr_identity_check(tau)
        rows.append(make_check("gr-identity-tau{:g}".format(tau), "sin^2 over sinh^2 integral, (pi tau/2)coth - 1",
                               lhs, rhs, 1e-8))
    return rows


def check_angular_reduction(opt):
    rng = np.random.default_rng(opt.seed)
    worst, worst_pair = 0.0, None
    done = 0
    while done < N_ANGULAR:
        r, s = rng.uniform(0.2, 5.0, size=2)
        if abs(r - s) < 0.05:
            continue
        lhs, rhs = bridge.angular_reduction_check(r, s)
        gap = abs(lhs - rhs) / abs(rhs)
        if gap >= worst:
            worst, worst_pair = gap, (lhs, rhs)
        done += 1
    return [make_check("angular-reduction-worst", "angular integral 4 pi/(r^2 - s^2)^2",
                       worst_pair[0], worst_pair[1], 1e-10, "rel")]


def check_weight_maps(opt):
    rows = []
    for name, phi in sorted(bridge.suite_profiles().items())[:3]:
        report = bridge.weight_maps(phi)
        rows.append(make_check("weight-maps-{}".format(name), "L3 norm and Hardy weight under the radial lift",
                               report["rel_gap"], 0.0, 1e-10))
    return rows


def check_h1_analogue(opt):
    grid = GridSpec(4.0, 1024)
    with np.errstate(divide="ignore", over="ignore"):
        bump = Profile.from_function(
            grid, lambda t: np.where(np.abs(t) < 3.0, np.exp(-1.0 / np.maximum(1.0 - (t / 3.0) ** 2, 1e-300)), 0.0))
    lhs, rhs = bridge.h1_analogue_check(bump)
    return [make_check("h1-analogue-bump", "Dirichlet energy under the radial lift", lhs, rhs, 1e-8, "rel")]


def check_equation_transport(opt):
    h = fn.sech_profile(bridge.BRIDGE_GRID)
    return [make_check("equation-transport-sech", "sqrt(-Delta)R = R^2 for R = 1/(1+r^2)",
                       bridge.equation_transport_residual(h), 0.0, 1e-9)]


def check_katosob(opt):
    grid = GridSpec()
    rows = []
    for theta in KATOSOB_THETAS:
        tag = "theta{:.4f}".format(theta)
        anchor = "Kato-Sobolev family optimizer h_theta"
        closed = fn.sharp_constant_katosob(theta)
        rows.append(make_check("katosob-{}-el-residual".format(tag), anchor,
                               fn.euler_lagrange_residual_h_theta(theta, grid), 0.0, 1e-7))
        rows.append(make_check("katosob-{}-quotient".format(tag), anchor,
                               fn.katosob_radial_quotient(theta, fn.h_theta_profile(theta, grid)), closed, 1e-6))
        rows.append(make_check("katosob-{}-quadrature".format(tag), anchor, fn.I_theta_quadrature(theta), closed,
                               1e-9, "rel"))
    return rows


def check_katosob_3d(opt):
    grid = GridSpec()
    rows = []
    for theta in KATOSOB_THETAS:
        tag = "theta{:.4f}".format(theta)
        anchor = "three-dimensional Kato-Sobolev constant"
        sharp_3d = fn.sharp_constant_katosob_3d(theta)
        rows.append(make_check("katosob-3d-{}-scaling".format(tag), anchor, sharp_3d,
                               (4.0 * np.pi) ** (1.0 / 3.0) * fn.sharp_constant_katosob(theta), 1e-12, "rel"))
        rows.append(make_check("katosob-3d-{}-quotient".format(tag), anchor,
                               bridge.katosob_3d_quotient(theta, fn.h_theta_profile(theta, grid)), sharp_3d, 1e-6,
                               "rel"))
    return rows


def check_kernel_positivity(opt):
    grid = GridSpec()
    rows = []
    for mu in KERNEL_SHIFTS:
        report = kernel_positivity(ilw_operator(), mu, grid)
        anchor = "positive kernel of (T + mu)^-1"
        rows.append(make_check("kernel-positivity-mu{:.4f}-near".format(mu), anchor, report["near_min"], 0.0, 0.0,
                               "geq"))
        rows.append(make_check("kernel-positivity-mu{:.4f}-floor".format(mu), anchor, report["min_ratio"], 0.0,
                               KERNEL_FLOOR, "geq"))
    return rows


def check_funk_hecke(opt):
    if opt.lmax < 0:
        raise ValueError("lmax must be non-negative, got {}".format(opt.lmax))
    return [make_check("funk-hecke-l{:02d}".format(l), "Funk-Hecke eigenvalue (l+1)^-1",
                       sphere.funk_hecke_eigenvalue(l), 1.0 / (l + 1), 1e-12) for l in range(opt.lmax + 1)]


def check_bs_radial(opt):
    values, parities = sphere.bs_radial_eigenvalues(BS_TOP, with_parity=True)
    rows = []
    anchor = "radial Birman-Schwinger spectrum 1/(l+1)"
    for l, (value, parity) in enumerate(zip(values, parities)):
        rows.append(make_check("bs-radial-l{}-eigenvalue".format(l), anchor, value, 1.0 / (l + 1), 1e-3))
        rows.append(make_check("bs-radial-l{}-parity".format(l), anchor, parity, (-1) ** l, 0.0))
    return rows


def check_conformal(opt):
    sweep = sphere.conformal_sweep(N_CONFORMAL, opt.seed)
    anchor = "stereographic projection is conformal"
    return [make_check("conformal-identity", anchor, sweep["max_rel_gap"], 0.0, 1e-12),
            make_check("conformal-unit-sphere", anchor, sweep["max_norm_defect"], 0.0, 1e-12),
            make_check("conformal-jacobian-volume", anchor, sphere.jacobian_integral(), 2.0 * np.pi ** 2, 1e-10,
                       "rel")]


def check_kernel_transport(opt):
    report = sphere.kernel_transport_check()
    anchor = "d/dr(r R) = Q'(ln r)/r"
    return [make_check("kernel-transport-max", anchor, report["max_rel_error"], 0.0, 1e-10),
            make_check("kernel-transport-r1", anchor, report["at_1"][0], report["at_1"][1], 1e-10),
            make_check("kernel-transport-re", anchor, report["at_e"][0], report["at_e"][1], 1e-10)]


def check_continuation(opt):
    anchor = "branch from the local soliton to 2/(1+t^2)"
    points, info = continue_branch(1.0, 0.5, CONTINUATION_STEPS, full_output=True)
    if not info["complete"]:
        raise RuntimeError(info["diagnostic"])
    fine = continue_branch(1.0, 0.5, 2 * CONTINUATION_STEPS)
    summary = branch_summary(points, alpha=1)
    end, fine_end = points[-1].Q, fine[-1].Q
    return [
        make_check("continuation-endpoint", anchor, summary["distance_to_algebraic"], 0.0, 1e-3),
        make_check("continuation-max-residual", anchor, summary["max_residual"], 1e-8, 0.0, "leq"),
        make_check("continuation-min-even-gap", anchor, summary["min_even_gap"], 0.0, 0.0, "geq"),
        make_check("continuation-continuous", anchor, float(summary.get("continuous", False)), 1.0, 0.0),
        make_check("continuation-step-doubling", anchor, np.max(np.abs(end.values - fine_end.values)), 0.0, 1e-4),
    ]


CHECK_GROUPS = {
    "angular-reduction": check_angular_reduction,
    "bs-radial": check_bs_radial,
    "conformal": check_conformal,
    "continuation": check_continuation,
    "equation-transport": check_equation_transport,
    "frac-groundstates": check_frac_groundstates,
    "funk-hecke": check_funk_hecke,
    "gn-local": check_gn_local,
    "gr-identity": check_gr_identity,
    "h1-analogue": check_h1_analogue,
    "ilw-groundstate": check_ilw_groundstate,
    "ilw-sharp-constant": check_ilw_sharp_constant,
    "kato-remainder": check_kato_remainder,
    "katosob": check_katosob,
    "katosob-3d": check_katosob_3d,
    "kernel-positivity": check_kernel_positivity,
    "kernel-transport": check_kernel_transport,
    "nondegeneracy-half": check_nondegeneracy_half,
    "nondegeneracy-ilw": check_nondegeneracy_ilw,
    "nondegeneracy-local": check_nondegeneracy_local,
    "sobolev-transport": check_sobolev_transport,
    "three-way": check_three_way,
    "weight-maps": check_weight_maps,
}


def main_check(opt, group, out_path):
    """Run one check group and save its rows as jsonl; failures become failing rows."""
    try:
        logger.info("Start : {}".format(group))
        if group not in CHECK_GROUPS:
            raise ValueError("Unknown check group {}".format(group))
        rows = CHECK_GROUPS[group](opt)
        failed = [row["name"] for row in rows if not row["pass"]]
        if failed:
            logger.warning("{} failed checks in {}: {}".format(len(failed), group, failed))
        else:
            logger.info("All {} checks of {} passed".format(len(rows), group))
    except Exception as e:
        logger.error("Error !!!! : {}, log in {}".format(e, out_path))
        rows = [error_check(group, e)]
    if out_path:
        if not os.path.exists(os.path.dirname(out_path)):
            logger.error("{} does not exist!!!!!!".format(os.path.dirname(out_path)))
        else:
            save_jsonl(rows, out_path)
    return rows
