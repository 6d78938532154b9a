import os
import time
import logging
from multiprocessing import Pool

import numpy as np
import tqdm

from src.inputters.data_utils import *
from src.inputters.dataloaders import check_dataloader, theta_dataloader, branch_paths
from src.single_check import main_check, add_check_args, CHECK_GROUPS
from src.numerics.spectral_core import GridSpec, Profile, ilw_operator, frac_laplacian
from src.numerics.groundstate import SolveParams, petviashvili, gaussian_profile
from src.numerics import functionals as fn
from src.numerics.linearization import build_linearized, nondegeneracy_check
from src.numerics.continuation import continue_branch, branch_summary

logger = logging.getLogger(__file__)

TOOL_VERSION = "0.1.0"
SCHEMA = 1
QUADRATURE_REL_TOL = 1e-9


def add_output_args(parser):
    group = parser.add_argument_group('Output Arguments')
    group.add_argument("--out-dir", type=str, default="./output/", help="Dir to save reports, CSV and profiles.")
    group.add_argument("--no-timestamp", action="store_true", help="Leave the timestamp out of JSON reports")
    group.add_argument("--n-p", type=int, default=1, help="Number of subprocess, capped by NLGS_THREADS")
    group.add_argument("--config", type=str, default=None, help="key = value file of option defaults")
    return group


def add_grid_args(parser, n_points=2048):
    group = parser.add_argument_group('Grid Arguments')
    group.add_argument("--L", type=float, default=20 * np.pi, help="Half width of the periodic box [-L, L)")
    group.add_argument("--N", type=int, default=n_points, help="Number of grid points (even)")
    return group


def add_model_args(parser):
    group = parser.add_argument_group('Model Arguments')
    group.add_argument("--op", type=str, choices=["ilw", "frac"], default="ilw",
                       help="ilw: T = D coth(pi D/2) - 2/pi, frac: (-Delta)^s")
    group.add_argument("--s", type=float, default=None, help="Fractional order in (0, 1], with --op frac")
    group.add_argument("--alpha", type=float, default=1.0, help="Power of the nonlinearity Q^{alpha+1}")
    group.add_argument("--mu", type=float, default=None, help="Operator shift (default 2/pi for ilw, 1 for frac)")
    group.add_argument("--theta", type=float, default=None, help="Kato-Sobolev parameter in (0, pi)")
    return group


def add_solve_args(parser):
    group = parser.add_argument_group('Solver Arguments')
    group.add_argument("--max-iters", type=int, default=2000)
    group.add_argument("--residual-tol", type=float, default=1e-10)
    group.add_argument("--no-dealias", action="store_true", help="Evaluate Q^{alpha+1} pointwise on the grid")
    return group


def add_verify_args(parser):
    parser.add_argument("--only", type=str, nargs="+", default=None, help="Run only these check groups")
    parser.add_argument("--list", action="store_true", help="Print the check group names and exit")
    return add_check_args(parser)


def add_continue_args(parser):
    group = parser.add_argument_group('Continuation Arguments')
    group.add_argument("--alpha", type=float, default=1.0)
    group.add_argument("--s-to", type=float, default=0.5, help="Last fractional order of the branch")
    group.add_argument("--steps", type=int, default=50)
    group.add_argument("--tol", type=float, default=1e-9, help="Newton residual tolerance")
    group.add_argument("--certify", action="store_true", help="Run the non-degeneracy check at every point")
    return group


def add_spectrum_args(parser):
    group = parser.add_argument_group('Spectrum Arguments')
    group.add_argument("--profile", type=str, choices=["sech", "h-theta", "solve"], default="sech",
                       help="sech and h-theta are closed forms for --op ilw, solve runs Petviashvili first")
    group.add_argument("--n-eig", type=int, default=20, help="Number of lowest eigenvalues in the JSON report")
    group.add_argument("--zero-tol", type=float, default=None, help="Zero-mode tolerance (default 1e-6 max|eig|)")
    return group


def add_constants_args(parser):
    group = parser.add_argument_group('Constants Arguments')
    group.add_argument("--theta-min", type=float, default=0.1)
    group.add_argument("--theta-max", type=float, default=3.0)
    group.add_argument("--steps", type=int, default=30)
    return group


def worker_count(n_p):
    cap = os.environ.get("NLGS_THREADS")
    if cap:
        n_p = min(n_p, int(cap))
    return max(1, n_p)


def fan_out(func, items, n_p):
    """Apply func to every args tuple, in a Pool when more than one worker is allowed."""
    n_p = worker_count(n_p)
    if n_p == 1:
        return [func(*args) for args in tqdm.tqdm(items, mininterval=1)]
    p = Pool(n_p)
    handles = []
    for args in items:
        handles.append(p.apply_async(func, args=args))
        time.sleep(0.01)
    time.sleep(0.01)
    p.close()
    p.join()
    return [handle.get() for handle in handles]


def report_header(opt):
    header = {"schema": SCHEMA, "tool_version": TOOL_VERSION, "config": dict(sorted(vars(opt).items()))}
    if not opt.no_timestamp:
        header["timestamp"] = time.strftime("%Y-%m-%d %H:%M:%S")
    return header


def prepare_out_dir(opt):
    if not os.path.exists(opt.out_dir):
        os.makedirs(opt.out_dir)
    return opt.out_dir


def profile_to_csv(Q, path):
    save_csv(Q.to_rows(), path, header=("t", "value"))
    return os.path.basename(path)


def _model(opt):
    """(operator, shift) for --op, after checking the parameter window."""
    if opt.op == "frac":
        if opt.s is None:
            raise ValueError("--op frac needs --s")
        fn.check_gn_window(opt.s, opt.alpha)
        mu = 1.0 if opt.mu is None else opt.mu
        return frac_laplacian(opt.s), mu
    if not opt.alpha > 0:
        raise ValueError("alpha must be positive, got {}".format(opt.alpha))
    mu = 2.0 / np.pi if opt.mu is None else opt.mu
    return ilw_operator(), mu


def _closed_form(opt, mu, grid):
    """Known solution for the chosen model, or None."""
    if opt.op == "ilw" and opt.alpha == 1 and mu > 0:
        return fn.ilw_soliton(mu, grid)
    if opt.op == "frac" and opt.s == 1 and mu == 1:
        amp = ((opt.alpha + 2.0) / 2.0) ** (1.0 / opt.alpha)
        return Profile.from_function(grid, lambda t: amp / np.cosh(0.5 * opt.alpha * t) ** (2.0 / opt.alpha))
    if opt.op == "frac" and opt.s == 0.5 and opt.alpha == 1 and mu == 1:
        return Profile.from_function(grid, lambda t: 2.0 / (1.0 + t * t))
    return None


def _solve(opt, m, mu, grid):
    params = SolveParams(max_iters=opt.max_iters, residual_tol=opt.residual_tol, dealias=not opt.no_dealias)
    return petviashvili(m, mu, opt.alpha, gaussian_profile(grid), params)


def cmd_solve(opt):
    m, mu = _model(opt)
    grid = GridSpec(opt.L, opt.N)
    out_dir = prepare_out_dir(opt)
    result = _solve(opt, m, mu, grid)
    record = report_header(opt)
    record.update(result.to_record(profile_to_csv(result.Q, os.path.join(out_dir, "profile.csv"))))
    record["operator"] = m.to_record()
    record["mu"] = mu
    try:
        exact = _closed_form(opt, mu, grid)
    except (ValueError, RuntimeError) as e:
        logger.warning("Closed form unavailable: {}".format(e))
        record["closed_form_error"] = "{}: {}".format(type(e).__name__, e)
        exact = None
    if exact is not None:
        record["closed_form_distance"] = float(np.max(np.abs(result.Q.values - exact.values)))
        logger.info("Distance to the closed form: {:.3e}".format(record["closed_form_distance"]))
    save_json(record, os.path.join(out_dir, "solve.json"), indent=1)
    return 0 if result.converged else 1


def cmd_verify(opt):
    if opt.list:
        for group in sorted(CHECK_GROUPS):
            print(group)
        return 0
    groups = opt.only or sorted(CHECK_GROUPS)
    unknown = [g for g in groups if g not in CHECK_GROUPS]
    if unknown:
        raise ValueError("Unknown check groups {}, see --list".format(unknown))
    out_dir = prepare_out_dir(opt)

    save_txt(groups, os.path.join(out_dir, "groups.txt"))
    logger.info("Verification start!")
    items = [(opt, group, out_path) for _, group, out_path in check_dataloader(groups, out_dir)]
    results = fan_out(main_check, items, opt.n_p)
    checks = sorted((row for rows in results for row in rows), key=lambda row: row["name"])
    report = report_header(opt)
    report["checks"] = checks
    report["n_checks"] = len(checks)
    report["n_failed"] = sum(not row["pass"] for row in checks)
    report["overall_pass"] = report["n_failed"] == 0
    save_json(report, os.path.join(out_dir, "report.json"), indent=1)
    logger.info("Verification over! {} checks, {} failed".format(report["n_checks"], report["n_failed"]))
    return 0 if report["overall_pass"] else 1


def cmd_continue(opt):
    out_dir = prepare_out_dir(opt)
    points, info = continue_branch(opt.alpha, opt.s_to, opt.steps, tol=opt.tol, certify=opt.certify,
                                   full_output=True)
    rows, records = [], []
    for point, path in branch_paths(points, out_dir):
        ref = os.path.join("profiles", profile_to_csv(point.Q, path))
        records.append(point.to_record(ref))
        rows.append((point.s, point.residual_sup, point.even_gap, float(np.max(point.Q.values)),
                     records[-1]["l2_norm"]))
    save_csv(rows, os.path.join(out_dir, "branch.csv"), header=("s", "residual", "even_gap", "peak_value", "l2_norm"))
    manifest = report_header(opt)
    manifest.update({"points": records, "summary": branch_summary(points, opt.alpha), "complete": info["complete"],
                     "diagnostic": info["diagnostic"]})
    save_json(manifest, os.path.join(out_dir, "branch.json"), indent=1)
    if "distance_to_algebraic" in manifest["summary"]:
        logger.info("Endpoint distance to 2/(1+t^2): {:.3e}".format(manifest["summary"]["distance_to_algebraic"]))
    certified = all(p.certificate in (None, "pass") for p in points)
    return 0 if info["complete"] and certified else 1


def _spectrum_problem(opt):
    grid = GridSpec(opt.L, opt.N)
    if opt.profile == "sech":
        if opt.op != "ilw" or opt.alpha != 1:
            raise ValueError("--profile sech belongs to --op ilw --alpha 1")
        return build_linearized(ilw_operator(), 2.0 / np.pi, 2.0, fn.sech_profile(grid), 1), fn.sech_profile(grid)
    if opt.profile == "h-theta":
        if opt.op != "ilw" or opt.alpha != 1 or opt.theta is None:
            raise ValueError("--profile h-theta belongs to --op ilw --alpha 1 with --theta")
        Q = fn.h_theta_profile(opt.theta, grid)
        return build_linearized(ilw_operator(), fn.ilw_shift(opt.theta), 2.0, Q, 1), Q
    m, mu = _model(opt)
    result = _solve(opt, m, mu, grid)
    if not result.converged:
        raise RuntimeError("Ground state did not converge (residual {:.3e})".format(result.residual_sup))
    return build_linearized(m, mu, opt.alpha + 1.0, result.Q, opt.alpha), result.Q


def cmd_spectrum(opt):
    out_dir = prepare_out_dir(opt)
    D, Q = _spectrum_problem(opt)
    report, spectral = nondegeneracy_check(D, Q, opt.zero_tol)
    save_csv(spectral.to_rows(), os.path.join(out_dir, "eigenvalues.csv"), header=("index", "eigenvalue"))
    record = report_header(opt)
    record["spectrum"] = spectral.to_record(opt.n_eig)
    record["nondegeneracy"] = report.to_record()
    save_json(record, os.path.join(out_dir, "spectrum.json"), indent=1)
    logger.info("{} zero modes, Morse index {}, non-degeneracy {}".format(
        len(spectral.zero_modes), spectral.morse_index, report.status))
    return 0 if report.passed else 1


def cmd_constants(opt):
    out_dir = prepare_out_dir(opt)
    items = [(theta,) for _, theta in theta_dataloader(opt.theta_min, opt.theta_max, opt.steps)]
    rows = sorted(fan_out(fn.theta_sweep_row, items, opt.n_p), key=lambda row: row["theta"])
    save_csv([(r["theta"], r["closed"], r["quadrature"], r["el_residual"]) for r in rows],
             os.path.join(out_dir, "constants.csv"),
             header=("theta", "closed_constant", "quadrature_constant", "el_residual"))
    gaps = [abs(r["quadrature"] - r["closed"]) / r["closed"] for r in rows]
    lower = [r["closed"] for r in rows if r["theta"] <= 0.5 * np.pi]
    summary = report_header(opt)
    summary.update({
        "rows": len(rows),
        "max_quadrature_rel_gap": max(gaps),
        "quadrature_converged": all(r["quadrature_converged"] for r in rows),
        "monotone_below_half_pi": bool(np.all(np.diff(lower) > 0)),
    })
    save_json(summary, os.path.join(out_dir, "constants.json"), indent=1)
    ok = summary["max_quadrature_rel_gap"] <= QUADRATURE_REL_TOL and summary["monotone_below_half_pi"]
    return 0 if ok else 1


COMMANDS = {
    "solve": cmd_solve,
    "verify": cmd_verify,
    "continue": cmd_continue,
    "spectrum": cmd_spectrum,
    "constants": cmd_constants,
}
