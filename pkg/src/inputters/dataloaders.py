import os

import numpy as np

from src.inputters.data_utils import *


def check_dataloader(groups, out_dir):
    """Yield one work item per verification group: (fid, group, out_path)."""
    checks_dir = os.path.join(out_dir, "checks")
    if not os.path.exists(checks_dir):
        os.makedirs(checks_dir)
    for i, group in enumerate(sorted(groups)):
        fid = "{:02d}_{}".format(i, group)
        out_path = os.path.join(checks_dir, group + ".jsonl")
        yield fid, group, out_path


def theta_dataloader(theta_min, theta_max, steps):
    """Yield (fid, theta) over an inclusive uniform grid inside (0, pi)."""
    if not 0 < theta_min <= theta_max < np.pi:
        raise ValueError("theta range must satisfy 0 < min <= max < pi, got [{}, {}]".format(theta_min, theta_max))
    if int(steps) != steps or steps < 1:
        raise ValueError("steps must be a positive integer, got {}".format(steps))
    for i, theta in enumerate(np.linspace(theta_min, theta_max, int(steps) + 1)):
        yield "theta{:04d}".format(i), float(theta)


def branch_paths(points, out_dir):
    """Yield (point, profile_path) for the per-point profile files of a branch."""
    profiles_dir = os.path.join(out_dir, "profiles")
    if not os.path.exists(profiles_dir):
        os.makedirs(profiles_dir)
    for i, point in enumerate(points):
        yield point, os.path.join(profiles_dir, "s{:04d}_{:.6f}.csv".format(i, point.s))
