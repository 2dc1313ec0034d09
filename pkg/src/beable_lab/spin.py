"""Spin-1 operators and the two-particle spin-1 singlet.

Basis order is ``|m = +1>, |m = 0>, |m = -1>`` with hbar = 1.
"""
from __future__ import annotations

import math

import numpy as np

from . import linalg as la
from .errors import ValidationError

__all__ = [
    "spin1_matrices",
    "commutation_residual",
    "check_spin_triple",
    "zero_eigenvector",
    "singlet_vector",
    "total_spin_residual",
]

SINGLET_SIGNS = (1.0, -1.0, 1.0)


def spin1_matrices() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    s = 1.0 / math.sqrt(2.0)
    sx = s * np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex)
    sy = s * np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex)
    sz = np.diag([1.0, 0.0, -1.0]).astype(complex)
    return sx, sy, sz


def commutation_residual(sx, sy, sz) -> float:
    """Worst Frobenius residual of ``[S_a, S_b] = i S_c`` over cyclic triples."""
    ops = [la.as_matrix(x) for x in (sx, sy, sz)]
    worst = 0.0
    for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        comm = ops[a] @ ops[b] - ops[b] @ ops[a]
        worst = max(worst, float(np.linalg.norm(comm - 1j * ops[c])))
    return worst


def check_spin_triple(sx, sy, sz, tol: float = 1e-12) -> None:
    """Validate a spin-1 triple: commutation relations and ``S^2 = 2 I``."""
    res = commutation_residual(sx, sy, sz)
    if res > tol:
        raise ValidationError(f"spin matrices violate [Sx, Sy] = i Sz (residual {res:.3e})")
    ops = [la.as_matrix(x) for x in (sx, sy, sz)]
    if ops[0].shape != (3, 3):
        raise ValidationError("spin-1 matrices must be 3x3")
    cas = sum(o @ o for o in ops) - 2.0 * np.eye(3)
    if np.linalg.norm(cas) > tol:
        raise ValidationError("spin matrices do not have total spin 1")


def zero_eigenvector(s) -> np.ndarray:
    """The ``S_n = 0`` eigenvector, first nonzero entry real positive."""
    dec = la.decompose(s)
    for value, idx in dec.clusters():
        if value == 0.0:
            if idx.size != 1:
                raise ValidationError("zero eigenvalue is degenerate")
            return np.array(dec.eigenvectors[:, idx[0]])
    raise ValidationError("operator has no zero eigenvalue")


def singlet_vector(sx=None, sy=None, sz=None) -> np.ndarray:
    """``-3^{-1/2} (|x0>|x0> - |y0>|y0> + |z0>|z0>)`` on ``C^3 (x) C^3``.

    ``|n0>`` is the ``S_n = 0`` eigenvector of each component.
    """
    if sx is None:
        sx, sy, sz = spin1_matrices()
    check_spin_triple(sx, sy, sz)
    terms = [zero_eigenvector(s) for s in (sx, sy, sz)]
    v = sum(sign * np.kron(t, t) for sign, t in zip(SINGLET_SIGNS, terms))
    return -v / math.sqrt(3.0)


def total_spin_residual(v, sx=None, sy=None, sz=None) -> float:
    """``||(S_1 + S_2)^2 v||``; zero for a total-spin-zero state."""
    if sx is None:
        sx, sy, sz = spin1_matrices()
    i3 = np.eye(3)
    total = sum(
        (np.kron(s, i3) + np.kron(i3, s)) @ (np.kron(s, i3) + np.kron(i3, s)) for s in (sx, sy, sz)
    )
    return float(np.linalg.norm(total @ np.asarray(v)))
