import os
import json
import sys
import collections


def load_json(path):
    with open(path, 'r', encoding='UTF_8') as f:
        return json.load(f)


def single_func(path):
    """Pass counts and worst gaps of one verification report."""
    report = load_json(path)
    sta = collections.defaultdict(float)
    sta["reports"] = 1
    for row in report.get("checks", []):
        sta["checks"] += 1
        if row["pass"]:
            sta["passed"] += 1
        if not row.get("paper_anchor"):
            sta["unanchored"] += 1
        if row.get("rel_gap") is not None and row["kind"] in ("abs", "rel"):
            sta["worst rel gap"] = max(sta["worst rel gap"], row["rel_gap"])
    return sta


def merge_sta(stas):
    res = collections.defaultdict(float)
    for sta in stas:
        for k, v in sta.items():
            if k == "worst rel gap":
                res[k] = max(res[k], v)
            else:
                res[k] += v
    res["failed"] = res["checks"] - res["passed"]
    if res.get("checks", 0) > 0:
        res["pass rate"] = res["passed"] / res["checks"]
    return res


def sta_reports(indir):
    paths = [os.path.join(instance[0], file)
             for instance in list(os.walk(indir))
             for file in instance[-1] if file == "report.json"]
    res = merge_sta([single_func(path) for path in sorted(paths)])
    print(dict(res))
    return res


if __name__ == '__main__':
    sta_reports(sys.argv[1])
