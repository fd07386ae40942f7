"""JSON encoding of matrices and reports, and schema validation.

Complex matrices are nested row-major lists of ``[re, im]`` pairs. Floats are
written with 17 significant digits and keys keep insertion order, so equal
inputs produce byte-identical output.
"""
import json
import math
from importlib import resources

import jsonschema
import numpy as np

from .errors import ShapeError


def encode_matrix(m):
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(data, dim=None):
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ShapeError(f"malformed matrix: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ShapeError(f"matrix must be a 2-d array of [re, im] pairs, got shape {arr.shape}")
    m = arr[..., 0] + 1j * arr[..., 1]
    if dim is not None and m.shape != (dim, dim):
        raise ShapeError(f"matrix has shape {m.shape}, expected ({dim}, {dim})")
    return m


def encode_complex(z):
    return [float(np.real(z)), float(np.imag(z))]


def _fmt_float(x):
    if math.isnan(x) or math.isinf(x):
        return "null"
    if x == 0.0:
        return "0.0"
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "inf" not in s:
        s += ".0"
    return s


def _emit(obj, indent, level, out):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        out.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_fmt_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(str(k))}: ")
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        if all(isinstance(v, (int, float, bool, np.number)) for v in obj):
            out.append("[")
            for i, v in enumerate(obj):
                _emit(v, indent, level, out)
                if i < len(obj) - 1:
                    out.append(", ")
            out.append("]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    """Deterministic JSON text; NaN and infinities become ``null``."""
    out = []
    _emit(obj, indent, 0, out)
    return "".join(out) + "\n"


def load_schema(name):
    text = resources.files("qmsdual").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(obj, name):
    """Validate a JSON-compatible object (round-tripped through :func:`dumps`)."""
    data = json.loads(dumps(obj)) if not isinstance(obj, str) else json.loads(obj)
    jsonschema.validate(data, load_schema(name))
    return data
