"""JSON formats for matrices, vector systems, polynomials and reports.

Complex scalars are ``[re, im]`` pairs. Floats are written with 17
significant digits so that a report read back reproduces the same doubles,
and the output is byte-stable for identical inputs.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .errors import InvalidInput


def _pair(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _scalar(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise InvalidInput(f"complex scalar must be [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, (int, float)):
        return complex(float(x), 0.0)
    raise InvalidInput(f"bad scalar {x!r}")


def vector_to_json(v) -> list:
    return [_pair(z) for z in np.asarray(v).reshape(-1)]


def vector_from_json(data) -> np.ndarray:
    if not isinstance(data, list):
        raise InvalidInput("vector must be a list of [re, im] pairs")
    return np.array([_scalar(x) for x in data], dtype=complex)


def matrix_to_json(A) -> dict:
    A = np.asarray(A)
    return {"dim": int(A.shape[0]), "entries": [[_pair(z) for z in row] for row in A]}


def matrix_from_json(data) -> np.ndarray:
    try:
        d = int(data["dim"])
        rows = data["entries"]
        A = np.array([[_scalar(x) for x in row] for row in rows], dtype=complex)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"bad matrix JSON: {exc}") from exc
    if d < 1 or A.shape != (d, d):
        raise InvalidInput(f"matrix JSON declares dim {d} but has shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInput("matrix JSON has non-finite entries")
    return A


def rect_matrix_to_json(A) -> dict:
    A = np.asarray(A)
    return {"rows": int(A.shape[0]), "cols": int(A.shape[1]),
            "entries": [[_pair(z) for z in row] for row in A]}


def rect_matrix_from_json(data) -> np.ndarray:
    """A possibly rectangular matrix; the square ``{"dim", ...}`` form is accepted too."""
    if isinstance(data, dict) and "dim" in data:
        return matrix_from_json(data)
    try:
        shape = (int(data["rows"]), int(data["cols"]))
        A = np.array([[_scalar(x) for x in row] for row in data["entries"]], dtype=complex)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"bad matrix JSON: {exc}") from exc
    if min(shape) < 1 or A.shape != shape:
        raise InvalidInput(f"matrix JSON declares shape {shape} but has shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInput("matrix JSON has non-finite entries")
    return A


def vectors_to_json(V) -> dict:
    V = np.asarray(V)
    return {"dim": int(V.shape[1]), "vectors": [vector_to_json(v) for v in V]}


def vectors_from_json(data) -> np.ndarray:
    try:
        d = int(data["dim"])
        vecs = [vector_from_json(v) for v in data["vectors"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"bad vector-system JSON: {exc}") from exc
    if d < 1 or not vecs or any(v.shape != (d,) for v in vecs):
        raise InvalidInput(f"vector-system JSON needs at least one length-{d} vector")
    V = np.stack(vecs)
    if not np.all(np.isfinite(V)):
        raise InvalidInput("vector-system JSON has non-finite entries")
    return V


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return json.dumps(str(x))
        s = format(x, ".17g")
        return s if any(c in s for c in ".en") else s + ".0"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(x, (dict, list, tuple, np.ndarray)) for x in obj):
            return "[" + ", ".join(_encode(x, indent, level + 1) for x in obj) + "]"
        items = [pad + _encode(x, indent, level + 1) for x in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def load(path: str | Path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text), hashlib.sha256(text.encode()).hexdigest()
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: malformed JSON ({exc})") from exc
