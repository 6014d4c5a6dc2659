"""Deterministic JSON and CSV output.

Floats are written with 17 significant digits so values round-trip
exactly, keys keep insertion order, and every JSON document carries a
top-level ``schema`` tag.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

SCHEMA = "polarforge/v1"


def _float(x):
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = f"{x:.17g}"
    if "e" not in text and "." not in text and "n" not in text:
        text += ".0"
    return text


def _emit(obj, out, indent, level):
    pad = " " * (indent * (level + 1)) if indent else ""
    end = " " * (indent * level) if indent else ""
    nl = "\n" if indent else ""
    sep = "," + nl if indent else ","
    if obj is None or isinstance(obj, (bool, np.bool_)):
        out.append({None: "null", True: "true", False: "false"}[None if obj is None else bool(obj)])
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{" + nl)
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(sep)
            out.append(pad + json.dumps(str(k)) + ": ")
            _emit(v, out, indent, level + 1)
        out.append(nl + end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        out.append("[" + nl)
        for i, v in enumerate(items):
            if i:
                out.append(sep)
            out.append(pad)
            _emit(v, out, indent, level + 1)
        out.append(nl + end + "]")
    elif hasattr(obj, "to_json"):
        _emit(obj.to_json(), out, indent, level)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2, schema=True) -> str:
    """Serialize ``obj``; dicts get a leading ``schema`` key when ``schema`` is set."""
    if schema and isinstance(obj, dict) and "schema" not in obj:
        obj = {"schema": SCHEMA, **obj}
    out = []
    _emit(obj, out, indent, 0)
    return "".join(out) + "\n"


def loads(text):
    return json.loads(text)


def to_csv(header, rows) -> str:
    """Comma-separated text with a header row and LF line endings."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_float(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()
