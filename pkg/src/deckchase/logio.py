"""Deterministic log files: CSV and JSONL with round-trip float text.

Floats are written with repr(), which is the shortest text that parses
back to the exact same double, so identical runs produce byte-identical
logs and comparisons can be done on the files themselves.
"""

from __future__ import annotations

import json
from pathlib import Path

POSE_LOG_HEADER = ("t", "x", "y", "z", "eta")


def format_cell(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (int,)):
        return str(value)
    if isinstance(value, str):
        if "," in value or "\n" in value:
            raise ValueError(f"cell {value!r} would break the CSV layout")
        return value
    return repr(float(value))


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    width = len(header)
    for row in rows:
        if len(row) != width:
            raise ValueError(f"row width {len(row)} != header width {width}")
        lines.append(",".join(format_cell(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8",
                          newline="\n")


def read_csv(path):
    """Header tuple plus raw string rows; callers pick their conversions."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.split("\n") if ln]
    if not lines:
        raise ValueError(f"{path} is empty")
    header = tuple(lines[0].split(","))
    return header, [ln.split(",") for ln in lines[1:]]


def read_float_csv(path):
    header, raw = read_csv(path)
    return header, [[float(v) for v in row] for row in raw]


def write_pose_log(path, poses) -> None:
    """poses: iterable with t/x/y/z/eta attributes or 5-tuples."""
    rows = []
    for p in poses:
        if hasattr(p, "eta"):
            rows.append((p.t, p.x, p.y, p.z, p.eta))
        else:
            rows.append(tuple(p))
    write_csv(path, POSE_LOG_HEADER, rows)


def read_pose_log(path):
    """Rows of (t, x, y, z, eta) floats, in file order."""
    header, rows = read_float_csv(path)
    if tuple(header) != POSE_LOG_HEADER:
        raise ValueError(f"pose log header {header} != {POSE_LOG_HEADER}")
    return [tuple(r) for r in rows]


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def write_jsonl(path, records) -> None:
    lines = [dump_json(rec) for rec in records]
    body = "\n".join(lines)
    if body:
        body += "\n"
    Path(path).write_text(body, encoding="utf-8", newline="\n")


def read_jsonl(path):
    text = Path(path).read_text(encoding="utf-8")
    return [json.loads(ln) for ln in text.split("\n") if ln]


def write_json(path, obj, indent: int = 2) -> None:
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=indent) + "\n",
                          encoding="utf-8", newline="\n")
