"""Structured report documents: JSON (round-trippable), CSV and plain tables."""
from __future__ import annotations

import csv
import io
import json

from . import __version__

SCHEMA = {
    "tool": "string, always 'crsobolev'",
    "version": "string, package version",
    "command": "string, subcommand name",
    "parameters": "object, exact parameter set (rationals as 'p/q' strings)",
    "passed": "bool, overall verdict",
    "rows": "array of flat objects, one per check",
    "notes": "array of strings (conventions, flagged discrepancies)",
}


def make_report(command: str, parameters: dict, rows: list, passed: bool, notes=None) -> dict:
    return {
        "tool": "crsobolev",
        "version": __version__,
        "command": command,
        "parameters": parameters,
        "passed": bool(passed),
        "rows": rows,
        "notes": list(notes or []),
    }


def serialize(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


def parse(text: str) -> dict:
    report = json.loads(text)
    missing = [k for k in SCHEMA if k not in report]
    if missing:
        raise ValueError(f"report is missing fields: {missing}")
    return report


def _columns(rows):
    cols = []
    for r in rows:
        for key in r:
            if key not in cols:
                cols.append(key)
    return cols


def _cell(column, v):
    if isinstance(v, bool):
        if column == "passed":
            return "PASS" if v else "FAIL"
        return "yes" if v else "no"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def to_csv(report: dict) -> str:
    buf = io.StringIO()
    rows = report["rows"]
    writer = csv.DictWriter(buf, fieldnames=_columns(rows), lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in r.items()})
    return buf.getvalue()


def to_table(report: dict) -> str:
    rows = report["rows"]
    cols = _columns(rows)
    cells = [[_cell(c, r.get(c, "")) for c in cols] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
    params = ", ".join(f"{k}={v}" for k, v in report["parameters"].items())
    out = [f"crsobolev {report['version']}  {report['command']}  ({params})"]
    if cols:
        out.append("  ".join(c.ljust(w) for c, w in zip(cols, widths)))
        out.append("  ".join("-" * w for w in widths))
        out += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    out += [f"note: {n}" for n in report["notes"]]
    out.append(f"result: {'PASS' if report['passed'] else 'FAIL'}")
    return "\n".join(out) + "\n"
