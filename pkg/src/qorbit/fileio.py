"""Deterministic JSON serialization used by all file formats.

Floats are written with 17 significant digits so a write/read round trip
reproduces every value exactly. The emitter is hand-rolled because the
stdlib encoder offers no control over float formatting; output bytes are a
pure function of the payload.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import ParseError


def _fmt_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite number {x!r}")
    return format(x, ".17g")


def dumps(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (bool, np.bool_, int, np.integer, float, np.floating)):
        return _fmt_number(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps(v, indent) for v in obj) + "]"
    if isinstance(obj, dict):
        inner = "  " * (indent + 1)
        items = [
            f"{inner}{json.dumps(str(k))}: {dumps(v, indent + 1)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    raise TypeError(f"cannot serialize object of type {type(obj).__name__}")


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def write(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))
        fh.write("\n")


def read(path):
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


def complex_to_pairs(matrix: np.ndarray) -> list:
    """Encode a complex matrix as nested [re, im] pairs."""
    m = np.asarray(matrix)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def pairs_to_complex(rows, field: str = "matrix") -> np.ndarray:
    """Decode nested [re, im] pairs back into a complex matrix."""
    if not isinstance(rows, list) or not rows:
        raise ParseError(f"field '{field}' must be a non-empty array of rows")
    out = np.empty((len(rows), len(rows[0])), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != len(rows[0]):
            raise ParseError(f"field '{field}', row {i}: ragged row")
        for j, cell in enumerate(row):
            if (
                not isinstance(cell, list)
                or len(cell) != 2
                or not all(isinstance(v, (int, float)) for v in cell)
            ):
                raise ParseError(f"field '{field}', row {i}, column {j}: expected [re, im]")
            out[i, j] = complex(cell[0], cell[1])
    return out


def real_array(data, shape: tuple, field: str) -> np.ndarray:
    """Decode a nested list into a float array with a mandatory shape."""
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError):
        raise ParseError(f"field '{field}' is not a numeric array") from None
    if arr.shape != shape:
        raise ParseError(f"field '{field}' has shape {arr.shape}, expected {shape}")
    return arr
