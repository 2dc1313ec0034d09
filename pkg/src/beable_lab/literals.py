"""JSON literal formats.

* matrix: row-major nested lists of ``[re, im]`` pairs
* vector: list of ``[re, im]`` pairs
* state:  ``{"kind": "vector", "v": vector}`` or ``{"kind": "density", "rho": matrix}``
* algebra: ``{"dim_h": n, "basis": [matrix, ...]}``
"""
from __future__ import annotations

import numpy as np

from . import linalg as la
from . import segalgebra as sg
from .errors import ValidationError
from .states import AlgState


def _pair(x, where):
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
        isinstance(t, (int, float)) and not isinstance(t, bool) for t in x
    ):
        return complex(x[0], x[1])
    raise ValidationError(f"{where}: expected [re, im], got {x!r}")


def parse_vector(lit) -> np.ndarray:
    if not isinstance(lit, list) or not lit:
        raise ValidationError("vector literal must be a non-empty list")
    return np.array([_pair(x, f"entry {i}") for i, x in enumerate(lit)], dtype=complex)


def parse_matrix(lit, dim_h: int | None = None) -> la.HermitianOp:
    """Parse and validate a Hermitian matrix literal."""
    if not isinstance(lit, list) or not lit:
        raise ValidationError("matrix literal must be a non-empty list of rows")
    n = len(lit)
    rows = []
    for i, row in enumerate(lit):
        if not isinstance(row, list) or len(row) != n:
            raise ValidationError(f"row {i} must have {n} entries")
        rows.append([_pair(x, f"entry ({i},{j})") for j, x in enumerate(row)])
    if dim_h is not None and n != dim_h:
        raise ValidationError(f"dimension mismatch: matrix is {n}x{n}, expected {dim_h}")
    return la.HermitianOp(np.array(rows, dtype=complex))


def _num(x: float) -> float:
    x = float(x)
    return 0.0 if x == 0 else x


def matrix_literal(m) -> list:
    m = la.as_matrix(m)
    return [[[_num(z.real), _num(z.imag)] for z in row] for row in m]


def vector_literal(v) -> list:
    return [[_num(z.real), _num(z.imag)] for z in np.asarray(v, dtype=complex).ravel()]


def parse_state(lit, dim_h: int | None = None) -> AlgState:
    if not isinstance(lit, dict) or "kind" not in lit:
        raise ValidationError('state literal must be an object with a "kind" field')
    kind = lit["kind"]
    if kind == "vector":
        v = parse_vector(lit.get("v"))
        if dim_h is not None and v.size != dim_h:
            raise ValidationError(f"dimension mismatch: state vector has length {v.size}, expected {dim_h}")
        return AlgState.from_vector(v)
    if kind == "density":
        return AlgState(parse_matrix(lit.get("rho"), dim_h).mat)
    raise ValidationError(f"unknown state kind {kind!r}")


def state_literal(state: AlgState) -> dict:
    if state.vector is not None:
        return {"kind": "vector", "v": vector_literal(state.vector)}
    return {"kind": "density", "rho": matrix_literal(state.rho)}


def algebra_to_dict(space: sg.Subspace) -> dict:
    return {"dim_h": space.dim_h, "basis": [matrix_literal(b) for b in space.basis]}


def algebra_from_dict(data) -> sg.Segalgebra:
    """Load a Segalgebra, re-validating every invariant."""
    if not isinstance(data, dict) or "dim_h" not in data or "basis" not in data:
        raise ValidationError('algebra literal needs "dim_h" and "basis"')
    n = int(data["dim_h"])
    mats = [parse_matrix(m, n).mat for m in data["basis"]]
    if not mats:
        raise ValidationError("algebra basis is empty")
    return sg.Segalgebra(la.to_coords(np.stack(mats)), n)
