"""Deterministic CSV and JSON emission.

Every floating-point value is printed with 9 significant digits in
scientific notation so that repeated runs with identical inputs
produce byte-identical artifacts on any platform.  JSON objects are
emitted with sorted keys and a fixed indentation; CSV uses bare
comma-separated cells and a single trailing newline.
"""

import hashlib
import json
import math
from enum import Enum

import numpy as np


def format_float(x):
    """Render a finite float with 9 significant digits, scientific form."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    if x == 0.0:
        x = 0.0  # collapse -0.0 so the sign bit cannot leak into output
    return f"{x:.8e}"


def format_cell(value):
    """Render one CSV cell: ints verbatim, floats via format_float."""
    if isinstance(value, bool):
        raise TypeError("booleans have no CSV representation here")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, str):
        if "," in value or "\n" in value:
            raise ValueError(f"CSV cell may not contain separators: {value!r}")
        return value
    raise TypeError(f"unsupported CSV cell type {type(value).__name__}")


def csv_text(header, rows):
    """Assemble a full CSV document as a string."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(path, header, rows):
    text = csv_text(header, rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return text


def _emit(obj, indent, out):
    pad = "  " * indent
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, Enum):
        _emit(obj.value, indent, out)
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=True))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(obj.keys())
        for i, key in enumerate(keys):
            if not isinstance(key, str):
                raise TypeError("JSON object keys must be strings")
            out.append(pad + "  " + json.dumps(key, ensure_ascii=True) + ": ")
            _emit(obj[key], indent + 1, out)
            out.append(",\n" if i < len(keys) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, np.ndarray):
        _emit(obj.tolist(), indent, out)
    elif isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(obj):
            out.append(pad + "  ")
            _emit(item, indent + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "]")
    else:
        raise TypeError(f"unsupported JSON value type {type(obj).__name__}")


def json_text(obj):
    """Serialize to canonical JSON text (sorted keys, fixed floats)."""
    out = []
    _emit(obj, 0, out)
    return "".join(out) + "\n"


def write_json(path, obj):
    text = json_text(obj)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return text


def sha256_of(obj):
    """Stable content hash of a JSON-serializable object."""
    return hashlib.sha256(json_text(obj).encode("utf-8")).hexdigest()
