import json
import os

import numpy as np


def load_txt(path):
    with open(path, encoding='UTF-8', errors='ignore') as f:
        data = [i.strip() for i in f.readlines() if len(i.strip()) > 0]
    return data


def save_txt(lines, path):
    """One entry per line, newline terminated."""
    with open(path, 'w', encoding='UTF-8') as f:
        f.write("".join("{}\n".format(line) for line in lines))


def load_json(path):
    with open(path, 'r', encoding='UTF_8') as f:
        return json.load(f)


def save_json(data, path, indent=0):
    with open(path, 'w', encoding='UTF-8') as f:
        json.dump(data, f, ensure_ascii=False, indent=indent, sort_keys=True)
        f.write("\n")


def load_jsonl(path):
    with open(path, 'r', encoding='UTF_8') as f:
        return [json.loads(line) for line in f.readlines() if len(line.strip()) > 0]


def save_jsonl(data, path):
    with open(path, 'w', encoding='UTF-8') as f:
        f.write("\n".join(json.dumps(line, ensure_ascii=False, sort_keys=True) for line in data))


def _csv_cell(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % x
    return str(x)


def save_csv(rows, path, header=None):
    """Comma separated rows, numbers as %.17g, optional '# a,b' header line."""
    lines = []
    if header:
        lines.append("# " + ",".join(header))
    for row in rows:
        lines.append(",".join(_csv_cell(x) for x in row))
    with open(path, 'w', encoding='UTF-8') as f:
        f.write("\n".join(lines) + "\n")


def _parse_cell(cell):
    cell = cell.strip()
    if cell in ("true", "false"):
        return cell == "true"
    try:
        return float(cell)
    except ValueError:
        return cell


def load_csv(path):
    """Rows of a file written by save_csv; '#' lines are skipped."""
    return [[_parse_cell(c) for c in line.split(",")] for line in load_txt(path) if not line.startswith("#")]


def load_config(path):
    """key = value lines; '#' comments and blank lines ignored, true/false become booleans."""
    if not os.path.isfile(path):
        raise ValueError("Config file {} does not exist".format(path))
    config = {}
    for line in load_txt(path):
        if line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError("Malformed config line: {}".format(line))
        key, value = [x.strip() for x in line.split("=", 1)]
        key = key.replace("-", "_")
        if value.lower() in ("true", "false"):
            config[key] = value.lower() == "true"
        else:
            config[key] = value
    return config


if __name__ == '__main__':
    print("testing")
    save_csv([(0.0, 1.0), (0.5, 0.8869204367171575)], "/tmp/nlgs_profile.csv", header=("t", "value"))
    print(load_csv("/tmp/nlgs_profile.csv"))
