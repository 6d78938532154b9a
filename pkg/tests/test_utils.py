import os

from src.inputters.data_utils import save_json, save_txt
from utils.statistic import single_func, merge_sta, sta_reports
from utils.check_result import check_files_successed


def _report(passes, gap):
    return {"schema": 1, "checks": [
        {"name": "c{}".format(i), "paper_anchor": "a", "pass": p, "kind": "abs", "rel_gap": gap}
        for i, p in enumerate(passes)]}


def test_merge_reports(tmp_path):
    for name, passes, gap in [("a", [True, True], 1e-12), ("b", [True, False, True], 3e-4)]:
        os.makedirs(str(tmp_path / name))
        save_json(_report(passes, gap), str(tmp_path / name / "report.json"))
    res = sta_reports(str(tmp_path))
    assert res["reports"] == 2
    assert res["checks"] == 5
    assert res["failed"] == 1
    assert res["worst rel gap"] == 3e-4
    assert res["pass rate"] == 0.8


def test_single_report(tmp_path):
    path = str(tmp_path / "report.json")
    save_json(_report([False], None), path)
    sta = single_func(path)
    assert merge_sta([sta])["failed"] == 1
    assert sta["unanchored"] == 0
    save_json({"checks": [{"name": "bare", "pass": True, "kind": "abs", "rel_gap": 0.0}]}, path)
    assert single_func(path)["unanchored"] == 1


def test_check_result(tmp_path):
    checks = tmp_path / "checks"
    os.makedirs(str(checks))
    save_txt([], str(checks / "funk-hecke.jsonl"))
    save_txt([], str(checks / "stale.jsonl"))
    missing, extra = check_files_successed(str(tmp_path), ["funk-hecke", "gr-identity"])
    assert [os.path.basename(p) for p in missing] == ["gr-identity.jsonl"]
    assert [os.path.basename(p) for p in extra] == ["stale.jsonl"]
    save_txt(["funk-hecke", "conformal"], str(tmp_path / "groups.txt"))
    missing, extra = check_files_successed(str(tmp_path))
    assert [os.path.basename(p) for p in missing] == ["conformal.jsonl"]
    assert [os.path.basename(p) for p in extra] == ["stale.jsonl"]
