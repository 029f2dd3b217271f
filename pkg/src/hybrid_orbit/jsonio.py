"""JSON wire formats shared by the library and the CLI.

Matrices travel as {"rows": r, "cols": c, "data": [row-major reals]} and
complex numbers as {"re": x, "im": y}.  Files are written atomically
(temp file + rename) with sorted keys, so identical inputs give
byte-identical outputs.
"""

import json
import os
import tempfile

import numpy as np

__all__ = [
    "FormatError",
    "matrix_to_obj",
    "matrix_from_obj",
    "complex_to_obj",
    "spectrum_to_obj",
    "vector_to_obj",
    "vector_from_obj",
    "load_json",
    "dump_json",
]


class FormatError(ValueError):
    """Malformed JSON input; the message carries the offending field path."""


def matrix_to_obj(m) -> dict:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [float(v) for v in m.flatten()],
    }


def matrix_from_obj(obj, path: str = "matrix") -> np.ndarray:
    if not isinstance(obj, dict):
        raise FormatError(f"{path}: expected an object with rows/cols/data")
    for key in ("rows", "cols", "data"):
        if key not in obj:
            raise FormatError(f"{path}.{key}: missing")
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    if not isinstance(rows, int) or not isinstance(cols, int) or rows < 1 or cols < 1:
        raise FormatError(f"{path}.rows/cols: need positive integers")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise FormatError(f"{path}.data: need exactly rows*cols = {rows * cols} numbers")
    try:
        m = np.array([float(v) for v in data], dtype=float).reshape(rows, cols)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{path}.data: non-numeric entry ({exc})") from exc
    if not np.all(np.isfinite(m)):
        raise FormatError(f"{path}.data: non-finite entry")
    return m


def complex_to_obj(z: complex) -> dict:
    return {"re": float(np.real(z)), "im": float(np.imag(z))}


def spectrum_to_obj(values) -> list[dict]:
    return [complex_to_obj(z) for z in np.asarray(values)]


def vector_to_obj(v) -> list[float]:
    return [float(x) for x in np.asarray(v, dtype=float).flatten()]


def vector_from_obj(obj, path: str = "vector") -> np.ndarray:
    if not isinstance(obj, list):
        raise FormatError(f"{path}: expected a list of numbers")
    try:
        v = np.array([float(x) for x in obj], dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{path}: non-numeric entry ({exc})") from exc
    if not np.all(np.isfinite(v)):
        raise FormatError(f"{path}: non-finite entry")
    return v


def load_json(path):
    try:
        with open(path, "r") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def dump_json(obj, path) -> None:
    """Serialize deterministically and replace the target atomically."""
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    _atomic_write(path, text)


def _atomic_write(path, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
