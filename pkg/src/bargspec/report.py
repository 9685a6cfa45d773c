"""Report serialization: JSON, CSV and two-column plot-data text."""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction

import numpy as np

SCHEMA_KEYS = ("model", "omega", "g", "sector", "method", "tolerances", "results", "diagnostics", "version")


def to_jsonable(obj):
    """Recursively convert numpy scalars/arrays, Fractions and non-finite floats.

    Floats are written by ``json`` with Python's shortest round-trip repr, so
    re-parsing gives back the identical double.  NaN and infinities become the
    strings "nan", "inf", "-inf" to keep the output strict JSON.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, complex):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def render_json(report: dict) -> str:
    return json.dumps(to_jsonable(report), indent=2) + "\n"


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return "%.17g" % x
    return str(x)


def render_csv(report: dict) -> str:
    """One row per entry of ``results``; columns are the keys of the first row."""
    rows = report.get("results", [])
    buf = io.StringIO()
    if not rows:
        return ""
    fields = list(rows[0].keys())
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for row in rows:
        w.writerow([_fmt(row.get(f, "")) for f in fields])
    return buf.getvalue()


def render_plot_data(pairs, blocks=None) -> str:
    """Two-column "x y" text with 17 significant digits; NaN prints as "nan".

    ``blocks`` (a list of pair lists) writes several series separated by a
    blank line, the usual convention for multi-series column data.
    """
    series = blocks if blocks is not None else [pairs]
    out = []
    for i, block in enumerate(series):
        if i:
            out.append("")
        for x, y in block:
            out.append(f"{_fmt(float(x))} {_fmt(float(y))}")
    return "\n".join(out) + "\n"


def emit_report(report: dict, fmt: str = "json", path=None, stream=None) -> str:
    text = render_csv(report) if fmt == "csv" else render_json(report)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    elif stream is not None:
        stream.write(text)
    return text
