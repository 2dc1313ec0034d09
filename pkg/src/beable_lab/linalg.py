"""Dense Hermitian-matrix substrate.

Observables are n x n complex Hermitian matrices.  Two products preserve
self-adjointness and drive everything else in the package:

* the Jordan (symmetric) product  ``A o B = (AB + BA) / 2``
* the Lie (antisymmetric) product ``A . B = (i/2)(AB - BA)``

so that ``AB = (A o B) - i (A . B)``.

Hermitian matrices are also handled as real coordinate vectors of length n^2
(see :func:`to_coords`), chosen so that the Euclidean inner product of
coordinates equals the trace inner product ``<A, B> = tr(AB)``.  Subspace
computations in :mod:`beable_lab.segalgebra` run entirely in these
coordinates.
"""
from __future__ import annotations

import dataclasses
import functools
import math
from typing import Callable, Sequence

import numpy as np

from .config import get_tolerances
from .errors import NumericalError, ValidationError

__all__ = [
    "HermitianOp",
    "SpectralDecomposition",
    "as_matrix",
    "jordan",
    "lie",
    "re_im_product",
    "decompose",
    "op_function",
    "op_norm",
    "to_coords",
    "from_coords",
    "joint_eigenspaces",
    "null_space",
    "random_hermitian",
    "pauli",
    "identity",
]


def _frob(m):
    return float(np.linalg.norm(m))


class HermitianOp:
    """An immutable Hermitian matrix.

    The input is checked against ``herm_tol`` (relative, Frobenius-scaled) and
    stored in the canonical symmetrised form ``(M + M^dagger) / 2``.
    """

    __slots__ = ("_mat",)
    __array_priority__ = 20

    def __init__(self, mat, *, validate: bool = True):
        if isinstance(mat, HermitianOp):
            arr = mat._mat
        else:
            arr = np.array(mat, dtype=complex)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
                raise ValidationError(f"expected a non-empty square matrix, got shape {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValidationError("matrix has non-finite entries")
            if validate:
                tol = get_tolerances().herm_tol
                skew = _frob(arr - arr.conj().T)
                if skew > tol * max(1.0, _frob(arr)):
                    raise ValidationError(f"matrix is not Hermitian (|M - M^H|_F = {skew:.3e})")
            arr = 0.5 * (arr + arr.conj().T)
        arr.setflags(write=False)
        self._mat = arr

    @property
    def mat(self) -> np.ndarray:
        return self._mat

    @property
    def dim(self) -> int:
        return self._mat.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._mat.copy() if copy else self._mat
        return self._mat.astype(dtype)

    def __repr__(self):
        return f"HermitianOp(dim={self.dim})"

    def __add__(self, other):
        return HermitianOp(self._mat + as_matrix(other), validate=False)

    def __sub__(self, other):
        return HermitianOp(self._mat - as_matrix(other), validate=False)

    def __neg__(self):
        return HermitianOp(-self._mat, validate=False)

    def __mul__(self, scalar):
        if not np.isrealobj(scalar):
            return NotImplemented
        return HermitianOp(float(scalar) * self._mat, validate=False)

    __rmul__ = __mul__

    def __matmul__(self, other):
        # plain operator product; not Hermitian in general
        return self._mat @ np.asarray(other)

    def __rmatmul__(self, other):
        return np.asarray(other) @ self._mat

    def close_to(self, other, tol: float = 1e-9) -> bool:
        other = as_matrix(other)
        return _frob(self._mat - other) <= tol * max(1.0, _frob(self._mat))


def as_matrix(x) -> np.ndarray:
    """Return the complex ndarray behind ``x`` (a HermitianOp or array-like)."""
    if isinstance(x, HermitianOp):
        return x.mat
    arr = np.asarray(x, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("matrix has non-finite entries")
    return arr


def _pair(a, b):
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ValidationError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return a, b


def identity(n: int) -> HermitianOp:
    return HermitianOp(np.eye(n), validate=False)


@functools.lru_cache(maxsize=None)
def _pauli():
    return {
        "x": np.array([[0, 1], [1, 0]], dtype=complex),
        "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
        "z": np.array([[1, 0], [0, -1]], dtype=complex),
    }


def pauli(axis: str) -> HermitianOp:
    """Pauli matrix for ``axis`` in ``"xyz"``."""
    return HermitianOp(_pauli()[axis], validate=False)


# --- products -------------------------------------------------------------


def jordan(a, b) -> HermitianOp:
    """Symmetric product ``(AB + BA) / 2``."""
    a, b = _pair(a, b)
    ab = a @ b
    return HermitianOp(0.5 * (ab + ab.conj().T), validate=False)


def lie(a, b) -> HermitianOp:
    """Antisymmetric product ``(i/2)(AB - BA)``."""
    a, b = _pair(a, b)
    # both orders are formed explicitly so that lie(A, A) is exactly zero
    m = 0.5j * (a @ b - b @ a)
    return HermitianOp(0.5 * (m + m.conj().T), validate=False)


def re_im_product(a, b) -> tuple[HermitianOp, HermitianOp]:
    """Real and imaginary parts of the operator product AB.

    ``Re(AB) = A o B`` and ``Im(AB) = -(A . B)``, so ``AB = Re + i Im``.
    """
    return jordan(a, b), -lie(a, b)


def jordan_stack(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise Jordan products of two stacks: result[i, j] = a[i] o b[j]."""
    ab = np.einsum("iab,jbc->ijac", a, b)
    return 0.5 * (ab + np.conj(np.swapaxes(ab, -1, -2)))


def lie_stack(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise Lie products of two stacks: result[i, j] = a[i] . b[j]."""
    ab = np.einsum("iab,jbc->ijac", a, b)
    return 0.5j * (ab - np.conj(np.swapaxes(ab, -1, -2)))


# --- spectral theory ------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class SpectralDecomposition:
    """``A = U diag(eigenvalues) U^dagger`` with ascending eigenvalues."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def norm(self) -> float:
        if self.eigenvalues.size == 0:
            return 0.0
        return float(np.max(np.abs(self.eigenvalues)))

    def clusters(self, rel_gap: float | None = None) -> list[tuple[float, np.ndarray]]:
        """Group eigenvalues closer than ``rel_gap * norm``.

        Returns ``(representative, indices)`` pairs; the representative is the
        cluster mean, snapped to exactly 0 when it lies within the gap of 0.
        """
        if rel_gap is None:
            rel_gap = get_tolerances().degeneracy_tol
        gap = rel_gap * max(self.norm, np.finfo(float).tiny)
        vals = self.eigenvalues
        groups = []
        start = 0
        for k in range(1, len(vals) + 1):
            if k == len(vals) or vals[k] - vals[k - 1] >= gap:
                idx = np.arange(start, k)
                rep = float(np.mean(vals[idx]))
                if abs(rep) < gap:
                    rep = 0.0
                groups.append((rep, idx))
                start = k
        return groups

    def projectors(self, rel_gap: float | None = None) -> list[tuple[float, np.ndarray]]:
        """Spectral projections ``(value, P)`` per eigenvalue cluster."""
        out = []
        for rep, idx in self.clusters(rel_gap):
            u = self.eigenvectors[:, idx]
            out.append((rep, u @ u.conj().T))
        return out


def canonical_phase(vecs: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rotate each column so its first non-negligible entry is real positive."""
    vecs = np.array(vecs, dtype=complex)
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        big = np.nonzero(np.abs(col) > tol * max(1.0, np.max(np.abs(col))))[0]
        if big.size:
            z = col[big[0]]
            vecs[:, k] = col * (abs(z) / z)
    return vecs


def decompose(a) -> SpectralDecomposition:
    """Eigen-decomposition of a Hermitian matrix.

    Eigenvalues come back ascending; eigenvector phases are canonicalised and,
    inside a degenerate cluster, columns are ordered lexicographically by
    their leading entries so reports are reproducible.

    Raises
    ------
    NumericalError
        If the eigensolver fails or the reconstruction/unitarity checks exceed
        ``eig_tol``.
    """
    m = as_matrix(a)
    try:
        w, u = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver did not converge: {exc}") from exc
    u = canonical_phase(u)
    dec = SpectralDecomposition(w, u)
    order = []
    for _, idx in dec.clusters():
        if idx.size > 1:
            keys = [tuple(np.round(np.abs(u[:, j]), 12)[::-1]) for j in idx]
            idx = idx[sorted(range(idx.size), key=lambda t: keys[t], reverse=True)]
        order.extend(idx.tolist())
    u = u[:, order]
    tol = get_tolerances().eig_tol
    n = m.shape[0]
    scale = max(_frob(m), np.finfo(float).tiny)
    recon = _frob((u * w) @ u.conj().T - m)
    if recon > tol * max(scale, 1.0):
        raise NumericalError(f"eigen-decomposition reconstruction error {recon:.3e}")
    if _frob(u.conj().T @ u - np.eye(n)) > tol * max(1.0, math.sqrt(n)):
        raise NumericalError("eigenvectors are not unitary")
    w.setflags(write=False)
    u.setflags(write=False)
    return SpectralDecomposition(w, u)


def op_norm(a) -> float:
    """Operator norm, max |eigenvalue|."""
    return decompose(a).norm


def op_function(a, f: Callable[[float], float]) -> HermitianOp:
    """Apply a real function through the spectral theorem, ``U f(L) U^dagger``.

    ``f`` is evaluated once per eigenvalue cluster.  A :class:`ValidationError`
    is raised when ``f`` is undefined (raises, or returns a non-finite or
    complex value) at some eigenvalue.
    """
    dec = decompose(a)
    n = dec.eigenvectors.shape[0]
    out = np.zeros((n, n), dtype=complex)
    for rep, idx in dec.clusters():
        try:
            with np.errstate(all="raise"):
                val = f(rep)
        except (ValueError, ArithmeticError, FloatingPointError) as exc:
            raise ValidationError(f"function undefined at eigenvalue {rep:g}: {exc}") from exc
        val = complex(val)
        if not np.isfinite(val) or abs(val.imag) > 0:
            raise ValidationError(f"function undefined at eigenvalue {rep:g} (got {val})")
        u = dec.eigenvectors[:, idx]
        out += val.real * (u @ u.conj().T)
    return HermitianOp(out, validate=False)


# --- coordinates ----------------------------------------------------------


@functools.lru_cache(maxsize=None)
def _upper(n):
    return np.triu_indices(n, 1)


def to_coords(mats) -> np.ndarray:
    """Real coordinates of Hermitian matrices (works on stacks ``(..., n, n)``).

    Layout: diagonal, then sqrt(2)*Re and sqrt(2)*Im of the strict upper
    triangle, so dot products of coordinates equal trace inner products.
    """
    m = mats.mat if isinstance(mats, HermitianOp) else np.asarray(mats)
    n = m.shape[-1]
    iu, ju = _upper(n)
    diag = np.real(np.diagonal(m, axis1=-2, axis2=-1))
    up = m[..., iu, ju]
    r2 = math.sqrt(2.0)
    return np.concatenate([diag, r2 * up.real, r2 * up.imag], axis=-1)


def from_coords(coords, n: int) -> np.ndarray:
    """Inverse of :func:`to_coords`; returns complex matrices."""
    c = np.asarray(coords, dtype=float)
    iu, ju = _upper(n)
    p = iu.size
    out = np.zeros(c.shape[:-1] + (n, n), dtype=complex)
    d = np.arange(n)
    out[..., d, d] = c[..., :n]
    up = (c[..., n : n + p] + 1j * c[..., n + p :]) / math.sqrt(2.0)
    out[..., iu, ju] = up
    out[..., ju, iu] = np.conj(up)
    return out


# --- small numerical helpers ----------------------------------------------


def null_space(m: np.ndarray, rtol: float, scale: float | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of the null space of ``m``.

    Singular values at or below ``rtol * scale`` count as zero; ``scale``
    defaults to ``max(1, largest singular value)``.
    """
    m = np.atleast_2d(m)
    k = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(k, dtype=m.dtype)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    if scale is None:
        scale = max(1.0, float(s[0]) if s.size else 0.0)
    rank = int(np.sum(s > rtol * scale))
    return vh[rank:].conj().T


def range_basis(m: np.ndarray, rtol: float, scale: float | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of the column space of ``m``."""
    m = np.atleast_2d(m)
    if m.shape[1] == 0:
        return np.zeros((m.shape[0], 0), dtype=m.dtype)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if scale is None:
        scale = max(1.0, float(s[0]) if s.size else 0.0)
    rank = int(np.sum(s > rtol * scale))
    return u[:, :rank]


def joint_eigenspaces(mats: Sequence[np.ndarray], rel_gap: float | None = None) -> list[np.ndarray]:
    """Common eigenspaces of commuting Hermitian matrices.

    Recursive refinement: diagonalise the first matrix, split into eigenspaces,
    then diagonalise each remaining matrix restricted to every current block.
    Returns a list of ``n x d`` orthonormal column blocks that together form
    a unitary.  Eigenvalues closer than ``rel_gap`` times the largest operator
    norm among ``mats`` are treated as equal.  Commutativity is the caller's responsibility; non-commuting
    input yields blocks that are merely eigenspaces of a compression.
    """
    if rel_gap is None:
        rel_gap = get_tolerances().degeneracy_tol
    mats = [as_matrix(m) for m in mats]
    if not mats:
        raise ValidationError("need at least one matrix")
    n = mats[0].shape[0]
    blocks = [np.eye(n, dtype=complex)]
    # one scale for all matrices: a member that is numerically zero on the
    # space must not have its rounding noise resolved into eigenspaces
    norm = max(float(np.max(np.abs(np.linalg.eigvalsh(m)))) for m in mats) if n else 0.0
    gap = rel_gap * max(norm, np.finfo(float).tiny)
    for m in mats:
        refined = []
        for v in blocks:
            if v.shape[1] == 1:
                refined.append(v)
                continue
            h = v.conj().T @ m @ v
            w, u = np.linalg.eigh(0.5 * (h + h.conj().T))
            start = 0
            for k in range(1, len(w) + 1):
                if k == len(w) or w[k] - w[k - 1] >= gap:
                    refined.append(v @ u[:, start:k])
                    start = k
        blocks = refined
    return [canonical_phase(b) for b in blocks]


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> HermitianOp:
    """GUE-style random Hermitian matrix."""
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return HermitianOp(scale * 0.5 * (g + g.conj().T), validate=False)
