"""Deterministic report serialization.

JSON reports are flat-ish objects with snake_case keys and decimal floats;
CSV tables carry a header row, comma separators, '.' decimals and LF line
endings. Identical inputs serialize to identical bytes.
"""

import json
import os

import numpy as np


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_json(path, obj):
    text = json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    return path


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
