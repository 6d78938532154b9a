import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.single_check import CHECK_GROUPS
from src.inputters.data_utils import load_txt


def check_files_successed(out_dir, groups=None):
    """Compare the per-group jsonl files of a verify run against the expected groups."""
    listed = os.path.join(out_dir, "groups.txt")
    if not groups:
        groups = load_txt(listed) if os.path.exists(listed) else sorted(CHECK_GROUPS)
    checks_dir = os.path.join(out_dir, "checks")

    in_groups = [os.path.join(checks_dir, group + ".jsonl") for group in groups]
    in_res = [os.path.join(checks_dir, x) for x in os.listdir(checks_dir)] if os.path.isdir(checks_dir) else []

    not_in_groups = set(in_res) - set(in_groups)
    print(sorted(not_in_groups))
    print("not in groups", len(not_in_groups))

    not_in_res = set(in_groups) - set(in_res)
    print(sorted(not_in_res))
    print("not in res", len(not_in_res))
    return sorted(not_in_res), sorted(not_in_groups)


if __name__ == '__main__':
    check_files_successed(sys.argv[1], sys.argv[2:] or None)
