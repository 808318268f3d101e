"""JSON and CSV forms of states, operators, bases and distributions.

Complex numbers are two-element ``[re, im]`` arrays in JSON and two
columns in CSV.  Floats are written with ``repr`` so output is lossless and
byte-stable.
"""

from __future__ import annotations

import csv
import io
import json
import os
import re

import numpy as np

from .errors import KDQError, ParseError
from .hilbert import (
    Basis,
    computational_basis,
    fourier_basis,
    product_basis,
    qubit_basis,
    random_basis,
    random_density,
    random_hermitian,
)
from .kdcore import KDDistribution

__all__ = [
    "complex_to_json", "complex_from_json", "basis_to_json", "basis_from_json",
    "kd_to_json", "kd_from_json", "kernel_to_json", "kd_csv", "kernel_csv",
    "fig1_csv", "load_json", "load_basis", "load_state", "load_operator", "dumps",
]


def complex_to_json(arr):
    arr = np.asarray(arr, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def complex_from_json(obj, ndim=None):
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"not a numeric array: {exc}") from None
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise ParseError("complex numbers must be [re, im] pairs")
    out = arr[..., 0] + 1j * arr[..., 1]
    if ndim is not None and out.ndim != ndim:
        raise ParseError(f"expected a {ndim}-D complex array, got {out.ndim}-D")
    return out


def basis_to_json(B: Basis):
    return {"label": B.label, "states": complex_to_json(B.states)}


def basis_from_json(obj) -> Basis:
    if not isinstance(obj, dict) or "states" not in obj:
        raise ParseError('basis must be an object {"label": ..., "states": [...]}')
    return Basis.from_states(str(obj.get("label", "B")), complex_from_json(obj["states"], 2))


def kd_to_json(kd: KDDistribution, **extra):
    out = {
        "basisA": basis_to_json(kd.basis_a),
        "basisB": basis_to_json(kd.basis_b),
        "values": complex_to_json(kd.values),
    }
    if kd.meta:
        out["meta"] = kd.meta
    out.update(extra)
    return out


def kd_from_json(obj) -> KDDistribution:
    try:
        A = basis_from_json(obj["basisA"])
        B = basis_from_json(obj["basisB"])
        values = complex_from_json(obj["values"], 2)
    except (KeyError, TypeError):
        raise ParseError("KD distribution needs basisA, basisB and values") from None
    return KDDistribution(A, B, values, meta=obj.get("meta"))


def kernel_to_json(kernel, **extra):
    out = {
        "basisC": basis_to_json(kernel.basis_c),
        "basisA": basis_to_json(kernel.basis_a),
        "basisB": basis_to_json(kernel.basis_b),
        "values": complex_to_json(kernel.values),
    }
    out.update(extra)
    return out


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def kd_csv(values) -> str:
    values = np.asarray(values)
    rows = ((a, b, float(v.real), float(v.imag))
            for (a, b), v in np.ndenumerate(values))
    return _csv(["a", "b", "re", "im"], rows)


def kernel_csv(values) -> str:
    values = np.asarray(values)
    rows = ((c, a, b, float(v.real), float(v.imag))
            for (c, a, b), v in np.ndenumerate(values))
    return _csv(["c", "a", "b", "re", "im"], rows)


def fig1_csv(panels) -> str:
    rows = (tuple(float(x) for x in r) for p in panels for r in p.rows())
    return _csv(["sigma", "c", "re_q", "im_q", "classical"], rows)


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None


# -- named inputs --------------------------------------------------------------
# Besides JSON files the command line accepts short names:
#   bases:  Z:d  F:d  X  Y  Z  X^n  random:d:seed
#   states: ket:<basis name>:k   mixed:d   random:d:seed[:rank]
#   operators: pauli:x|y|z   random:d:seed

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]]),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _is_file(text):
    return os.path.exists(text)


def load_basis(text: str) -> Basis:
    if _is_file(text):
        return basis_from_json(load_json(text))
    try:
        parts = text.split(":")
        head = parts[0]
        if head in ("Z", "F") and len(parts) == 2:
            d = int(parts[1])
            return computational_basis(d) if head == "Z" else fourier_basis(d)
        if head == "random" and len(parts) == 3:
            d, seed = int(parts[1]), int(parts[2])
            return random_basis(d, np.random.default_rng(seed), label=f"R{seed}")
        m = re.fullmatch(r"([XYZxyz])(?:\^(\d+))?", text)
        if m:
            axis, n = m.group(1), m.group(2)
            return qubit_basis(axis) if n is None else product_basis(axis, int(n))
    except (ValueError, KDQError) as exc:
        raise ParseError(f"bad basis {text!r}: {exc}") from None
    raise ParseError(f"no such file and not a basis name: {text!r}")


def load_state(text: str) -> np.ndarray:
    """State vector or density matrix from a JSON file or a short name."""
    if _is_file(text):
        obj = load_json(text)
        if isinstance(obj, dict):
            if "amps" in obj:
                return complex_from_json(obj["amps"], 1)
            if "density" in obj:
                return complex_from_json(obj["density"], 2)
            raise ParseError('state object needs "amps" or "density"')
        arr = complex_from_json(obj)
        if arr.ndim not in (1, 2):
            raise ParseError("state must be a vector or a matrix")
        return arr
    parts = text.split(":")
    try:
        if parts[0] == "ket" and len(parts) >= 3:
            B = load_basis(":".join(parts[1:-1]))
            return B.state(int(parts[-1])).copy()
        if parts[0] == "mixed" and len(parts) == 2:
            d = int(parts[1])
            return np.eye(d, dtype=complex) / d
        if parts[0] == "random" and len(parts) in (3, 4):
            d, seed = int(parts[1]), int(parts[2])
            rank = int(parts[3]) if len(parts) == 4 else None
            return random_density(d, np.random.default_rng(seed), rank)
    except (ValueError, IndexError, KDQError) as exc:
        raise ParseError(f"bad state {text!r}: {exc}") from None
    raise ParseError(f"no such file and not a state name: {text!r}")


def load_operator(text: str) -> np.ndarray:
    if _is_file(text):
        obj = load_json(text)
        if isinstance(obj, dict):
            obj = obj.get("matrix")
        return complex_from_json(obj, 2)
    parts = text.split(":")
    try:
        if parts[0] == "pauli" and len(parts) == 2:
            return _PAULI[parts[1].lower()].copy()
        if parts[0] == "random" and len(parts) == 3:
            return random_hermitian(int(parts[1]), np.random.default_rng(int(parts[2])))
    except (KeyError, ValueError, KDQError) as exc:
        raise ParseError(f"bad operator {text!r}: {exc}") from None
    raise ParseError(f"no such file and not an operator name: {text!r}")
