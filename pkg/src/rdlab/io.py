"""JSON file formats.

Matrix literal::

    {"dim": n, "entries": [[[re, im], ...], ...], "factors": [d1, ...]}

with row-major entries (a bare number is read as a real entry). Channels are
``{"alphabet": [...], "states": [literal, ...]}`` for cq channels and
``{"kraus": [literal, ...]}`` for quantum channels; distributions are
``{"probs": [...]}`` or a plain list. Wherever a channel, state or
distribution is expected, a path to a file holding it is accepted too
(relative paths resolve against the referring file's directory).
"""

import json
import os

import numpy as np

from .channels import CQChannel
from .ea import QuantumChannel
from .exceptions import StructuralError
from .linalg import HermitianOperator, _unwrap
from .utils.validation import check_probability_vector


def load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _resolve(obj, base_dir):
    """Load ``obj`` from disk when it is a path string; return ``(obj, its base dir)``."""
    if isinstance(obj, str):
        path = obj if os.path.isabs(obj) else os.path.join(base_dir or ".", obj)
        return load_json(path), os.path.dirname(os.path.abspath(path))
    return obj, base_dir


def _entry(v):
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise StructuralError(f"matrix entry must be a number or [re, im], got {v!r}")


def parse_matrix(obj, square=True):
    """Complex array from a matrix literal (no Hermiticity check)."""
    if not isinstance(obj, dict) or "entries" not in obj:
        raise StructuralError("matrix literal needs an 'entries' field")
    rows = obj["entries"]
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise StructuralError("'entries' must be a non-empty list of rows")
    if len({len(r) for r in rows}) != 1:
        raise StructuralError("matrix literal has rows of different lengths")
    m = np.array([[_entry(v) for v in row] for row in rows], dtype=complex)
    if m.ndim != 2 or (square and m.shape[0] != m.shape[1]):
        raise StructuralError("matrix literal has a ragged or non-square shape")
    if "dim" in obj and int(obj["dim"]) != m.shape[0]:
        raise StructuralError(f"'dim' {obj['dim']} does not match {m.shape[0]} rows")
    return m


def read_matrix(obj, base_dir=None):
    """:class:`HermitianOperator` from a matrix literal or a path to one."""
    obj, _ = _resolve(obj, base_dir)
    m = parse_matrix(obj)
    return HermitianOperator(m, tuple(obj.get("factors") or ()))


def matrix_literal(a, factors=None):
    """Matrix literal for ``a``; the inverse of :func:`read_matrix`."""
    m, own = _unwrap(a) if isinstance(a, HermitianOperator) else (np.asarray(a, dtype=complex), None)
    if m.ndim != 2:
        raise StructuralError("matrix literal needs a 2-d array")
    out = {"dim": int(m.shape[0]),
           "entries": [[[float(v.real), float(v.imag)] for v in row] for row in m]}
    f = factors if factors is not None else own
    if f:
        out["factors"] = [int(x) for x in f]
    return out


def read_channel(obj, base_dir=None):
    """:class:`CQChannel` or :class:`QuantumChannel`, depending on the fields present."""
    obj, base = _resolve(obj, base_dir)
    if not isinstance(obj, dict):
        raise StructuralError("channel must be a JSON object")
    if "kraus" in obj:
        return QuantumChannel(np.stack([parse_matrix(k, square=False) for k in obj["kraus"]]))
    if "states" not in obj:
        raise StructuralError("channel needs 'states' (cq) or 'kraus' (quantum)")
    states = [read_matrix(s, base).entries for s in obj["states"]]
    return CQChannel.from_states(states, obj.get("alphabet"))


def read_probs(obj, n=None, base_dir=None):
    obj, _ = _resolve(obj, base_dir)
    if isinstance(obj, dict):
        if "probs" not in obj:
            raise StructuralError("distribution needs a 'probs' field")
        obj = obj["probs"]
    return check_probability_vector(np.asarray(obj, dtype=float), n)


def channel_literal(W):
    if isinstance(W, QuantumChannel):
        return {"kraus": [matrix_literal(k) for k in W.kraus]}
    return {"alphabet": list(W.alphabet), "states": [matrix_literal(s) for s in W.states]}


__all__ = [
    "channel_literal",
    "load_json",
    "matrix_literal",
    "parse_matrix",
    "read_channel",
    "read_matrix",
    "read_probs",
]
