import os

import numpy as np
import pytest

from src.inputters.data_utils import save_csv, load_csv, load_config, save_json, load_json, save_jsonl, load_jsonl
from src.inputters.dataloaders import check_dataloader, theta_dataloader, branch_paths
from src.numerics.continuation import BranchPoint, local_soliton


def test_csv_rows(tmp_path):
    path = str(tmp_path / "profile.csv")
    save_csv([(0.1, 1.0 / 3.0, True), (2, np.float64(1e-300), False)], path, header=("t", "value", "flag"))
    with open(path) as f:
        lines = f.read().splitlines()
    assert lines[0] == "# t,value,flag"
    assert lines[1] == "0.10000000000000001,0.33333333333333331,true"
    rows = load_csv(path)
    assert rows[0] == [0.1, 1.0 / 3.0, True]
    assert rows[1] == [2.0, 1e-300, False]


def test_csv_without_header(tmp_path):
    path = str(tmp_path / "rows.csv")
    save_csv([(1.5, -2.0)], path)
    assert load_csv(path) == [[1.5, -2.0]]


def test_json_sorted(tmp_path):
    path = str(tmp_path / "r.json")
    save_json({"b": 1, "a": [1.5, None]}, path)
    with open(path) as f:
        text = f.read()
    assert text.index('"a"') < text.index('"b"')
    assert load_json(path) == {"a": [1.5, None], "b": 1}
    save_jsonl([{"y": 1, "x": 2}, {"z": 3}], path)
    assert load_jsonl(path) == [{"x": 2, "y": 1}, {"z": 3}]


def test_load_config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\nn-p = 4\n\nno_timestamp = true\nout_dir = ./x = y\n")
    config = load_config(str(path))
    assert config == {"n_p": "4", "no_timestamp": True, "out_dir": "./x = y"}
    path.write_text("just words\n")
    with pytest.raises(ValueError):
        load_config(str(path))
    with pytest.raises(ValueError):
        load_config(str(tmp_path / "missing.cfg"))


def test_check_dataloader(tmp_path):
    items = list(check_dataloader(["b-group", "a-group"], str(tmp_path)))
    assert [group for _, group, _ in items] == ["a-group", "b-group"]
    assert items[0][0] == "00_a-group"
    assert os.path.isdir(os.path.dirname(items[0][2]))


def test_theta_dataloader():
    items = list(theta_dataloader(0.1, 3.0, 29))
    assert len(items) == 30
    assert items[-1][1] == pytest.approx(3.0)
    with pytest.raises(ValueError):
        list(theta_dataloader(0.0, 1.0, 3))
    with pytest.raises(ValueError):
        list(theta_dataloader(0.5, 4.0, 3))
    with pytest.raises(ValueError):
        list(theta_dataloader(0.5, 1.0, 0))


def test_branch_paths(tmp_path):
    Q = local_soliton(1.0)
    points = [BranchPoint(1.0, Q, 0.0, 1.0), BranchPoint(0.95, Q, 0.0, 1.0)]
    paths = [path for _, path in branch_paths(points, str(tmp_path))]
    assert len(set(paths)) == 2
    assert all(p.endswith(".csv") for p in paths)
