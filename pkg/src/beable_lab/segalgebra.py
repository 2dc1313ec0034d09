"""Segalgebras, ideals and quotients as real subspaces of Hermitian matrices.

A subspace is stored as an orthonormal basis under the trace inner product,
held internally as orthonormal rows in the real coordinates of
:func:`beable_lab.linalg.to_coords`.  A :class:`Segalgebra` is a subspace that
contains the identity and is closed under both Jordan and Lie products;
closure is checked on construction.
"""
from __future__ import annotations

import math
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import linalg as la
from .config import get_tolerances
from .errors import PreconditionError, ValidationError

__all__ = [
    "Subspace",
    "Segalgebra",
    "IdealSubspace",
    "QuotientAlgebra",
    "Membership",
    "generate",
    "member",
    "is_commutative",
    "is_ideal",
    "is_quasicommutative",
    "quotient",
    "complexified_closure_check",
    "full_algebra",
    "diagonal_algebra",
    "scalar_algebra",
    "intersect",
]


class Membership(NamedTuple):
    is_member: bool
    residual: float

    def __bool__(self):
        return self.is_member


def _stack(ops, n=None) -> np.ndarray:
    mats = [la.as_matrix(o) for o in ops]
    if not mats:
        if n is None:
            raise ValidationError("cannot infer dimension from an empty list")
        return np.zeros((0, n, n), dtype=complex)
    shape = mats[0].shape
    for m in mats:
        if m.shape != shape:
            raise ValidationError(f"dimension mismatch: {m.shape[0]} vs {shape[0]}")
    if n is not None and shape[0] != n:
        raise ValidationError(f"dimension mismatch: {shape[0]} vs {n}")
    return np.stack(mats)


def _orthogonalize(q: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Remove components along the orthonormal rows of ``q`` (two passes)."""
    if q.shape[0] == 0:
        return c
    for _ in range(2):
        c = c - (c @ q.T) @ q
    return c


def _extend(q: np.ndarray, cands: np.ndarray, rtol: float) -> np.ndarray:
    """Append to ``q`` the new directions spanned by candidate coordinate rows.

    Candidates are normalised first; a residual direction is accepted when its
    singular value exceeds ``rtol``.  Zero candidates are skipped.
    """
    if cands.shape[0] == 0:
        return q
    norms = np.linalg.norm(cands, axis=1)
    keep = norms > rtol * max(1.0, float(norms.max()) if norms.size else 0.0)
    if not np.any(keep):
        return q
    c = cands[keep] / norms[keep, None]
    r = _orthogonalize(q, c)
    _, s, vh = np.linalg.svd(r, full_matrices=False)
    new = vh[s > rtol]
    if new.shape[0] == 0:
        return q
    new = _orthogonalize(q, new)
    qn, _ = np.linalg.qr(new.T)
    return np.vstack([q, qn.T]) if q.size else qn.T


class Subspace:
    """Real subspace of n x n Hermitian matrices with an orthonormal basis."""

    def __init__(self, coords: np.ndarray, dim_h: int):
        coords = np.array(coords, dtype=float).reshape(-1, dim_h * dim_h)
        coords.setflags(write=False)
        self._coords = coords
        self.dim_h = int(dim_h)
        self._basis = None

    @classmethod
    def span(cls, ops: Iterable, dim_h: int | None = None, rtol: float | None = None):
        """Subspace spanned by ``ops`` (any iterable of matrices)."""
        if rtol is None:
            rtol = get_tolerances().accept_tol
        mats = _stack(list(ops), dim_h)
        n = mats.shape[-1]
        q = _extend(np.zeros((0, n * n)), la.to_coords(mats), rtol)
        return cls(q, n)

    @property
    def coords(self) -> np.ndarray:
        """Orthonormal basis as rows of real coordinates."""
        return self._coords

    @property
    def basis(self) -> np.ndarray:
        """Orthonormal basis as a ``(dim, n, n)`` complex array."""
        if self._basis is None:
            b = la.from_coords(self._coords, self.dim_h)
            b.setflags(write=False)
            self._basis = b
        return self._basis

    @property
    def ops(self) -> list[la.HermitianOp]:
        return [la.HermitianOp(b, validate=False) for b in self.basis]

    @property
    def dim(self) -> int:
        return self._coords.shape[0]

    def __len__(self):
        return self.dim

    def __repr__(self):
        return f"<{type(self).__name__} of dim {self.dim} on C^{self.dim_h}>"

    def _check(self, a) -> np.ndarray:
        m = la.as_matrix(a)
        if m.shape[0] != self.dim_h:
            raise ValidationError(f"dimension mismatch: {m.shape[0]} vs {self.dim_h}")
        return m

    def coefficients(self, a) -> np.ndarray:
        """Coordinates of the orthogonal projection of ``a`` in this basis."""
        return self._coords @ la.to_coords(self._check(a))

    def project(self, a) -> la.HermitianOp:
        c = self.coefficients(a)
        return la.HermitianOp(la.from_coords(c @ self._coords, self.dim_h), validate=False)

    def combine(self, coefficients) -> la.HermitianOp:
        """The element ``sum_k c_k b_k``."""
        c = np.asarray(coefficients, dtype=float)
        return la.HermitianOp(la.from_coords(c @ self._coords, self.dim_h), validate=False)

    def residual(self, a) -> float:
        x = la.to_coords(self._check(a))
        return float(np.linalg.norm(_orthogonalize(self._coords, x)))

    def residuals(self, mats: np.ndarray) -> np.ndarray:
        """Projection residuals for a stack ``(..., n, n)``."""
        x = la.to_coords(mats)
        return np.linalg.norm(_orthogonalize(self._coords, x.reshape(-1, x.shape[-1])), axis=1).reshape(
            x.shape[:-1]
        )

    def contains(self, a, tol: float | None = None) -> Membership:
        if tol is None:
            tol = get_tolerances().sub_tol
        m = self._check(a)
        res = self.residual(m)
        return Membership(res <= tol * max(1.0, float(np.linalg.norm(m))), res)

    def __contains__(self, a):
        return self.contains(a).is_member

    def inclusion_residual(self, other: "Subspace") -> float:
        """Largest residual of ``other``'s basis against this subspace."""
        if other.dim_h != self.dim_h:
            raise ValidationError(f"dimension mismatch: {other.dim_h} vs {self.dim_h}")
        if other.dim == 0:
            return 0.0
        r = _orthogonalize(self._coords, other.coords)
        return float(np.max(np.linalg.norm(r, axis=1)))

    def includes(self, other: "Subspace", tol: float | None = None) -> bool:
        if tol is None:
            tol = get_tolerances().sub_tol
        return self.inclusion_residual(other) <= tol

    def same_span(self, other: "Subspace", tol: float | None = None) -> bool:
        return self.dim == other.dim and self.includes(other, tol) and other.includes(self, tol)

    def span_distance(self, other: "Subspace") -> float:
        """Symmetric inclusion residual.

        When dimensions differ it is at least ``sqrt(1 - k_min / k_max)``, so
        it never falls below ``sub_tol`` for spans of different size.
        """
        return max(self.inclusion_residual(other), other.inclusion_residual(self))


def intersect(*spaces: Subspace) -> Subspace:
    """Intersection of subspaces of the same Hermitian space."""
    if not spaces:
        raise ValidationError("need at least one subspace")
    first = spaces[0]
    n = first.dim_h
    if first.dim == 0:
        return Subspace(np.zeros((0, n * n)), n)
    ut = first.coords.T
    blocks = []
    for s in spaces[1:]:
        if s.dim_h != n:
            raise ValidationError(f"dimension mismatch: {s.dim_h} vs {n}")
        blocks.append(ut - s.coords.T @ (s.coords @ ut))
    if not blocks:
        return Subspace(first.coords, n)
    a = la.null_space(np.vstack(blocks), get_tolerances().accept_tol, scale=1.0)
    x = (ut @ a).T
    if x.shape[0]:
        qn, _ = np.linalg.qr(x.T)
        x = qn.T
    return Subspace(x, n)


def _closure_residuals(space: Subspace, others: Subspace | None = None):
    """Worst relative residuals of Jordan and Lie products of basis pairs."""
    b = space.basis
    target = space if others is None else others
    c = b if others is None else others.basis
    if b.shape[0] == 0 or c.shape[0] == 0:
        return 0.0, 0.0
    worst = []
    for prods in (la.jordan_stack(b, c), la.lie_stack(b, c)):
        x = la.to_coords(prods).reshape(-1, space.dim_h ** 2)
        res = np.linalg.norm(_orthogonalize(target.coords, x), axis=1)
        scale = np.maximum(1.0, np.linalg.norm(x, axis=1))
        worst.append(float(np.max(res / scale)))
    return worst[0], worst[1]


class Segalgebra(Subspace):
    """Unital real subspace closed under Jordan and Lie products.

    Construction validates: identity in the span, orthonormal basis, and
    closure of every basis pair under both products (tolerance ``sub_tol``).
    """

    def __init__(self, coords: np.ndarray, dim_h: int):
        super().__init__(coords, dim_h)
        tol = get_tolerances().sub_tol
        q = self.coords
        gram = np.linalg.norm(q @ q.T - np.eye(q.shape[0])) if q.size else 0.0
        if gram > tol * max(1.0, q.shape[0]):
            raise ValidationError(f"basis is not orthonormal (Gram error {gram:.3e})")
        ident = self.contains(np.eye(dim_h))
        if not ident:
            raise ValidationError(f"identity is not in the span (residual {ident.residual:.3e})")
        jres, lres = _closure_residuals(self)
        if max(jres, lres) > tol:
            raise ValidationError(
                f"subspace not closed under products (Jordan {jres:.3e}, Lie {lres:.3e})"
            )

    @classmethod
    def from_subspace(cls, space: Subspace) -> "Segalgebra":
        return cls(space.coords, space.dim_h)


class IdealSubspace(Subspace):
    """Proper ideal of a Segalgebra: excludes I, absorbs both products."""

    def __init__(self, parent: Segalgebra, coords: np.ndarray):
        super().__init__(coords, parent.dim_h)
        self.parent = parent
        ok, reason = _ideal_check(parent, self)
        if not ok:
            raise PreconditionError("ideal", reason)

    @classmethod
    def zero(cls, parent: Segalgebra) -> "IdealSubspace":
        return cls(parent, np.zeros((0, parent.dim_h ** 2)))

    @classmethod
    def spanned_by(cls, parent: Segalgebra, ops: Iterable) -> "IdealSubspace":
        ops = list(ops)
        space = Subspace.span(ops, parent.dim_h) if ops else Subspace(np.zeros((0, parent.dim_h ** 2)), parent.dim_h)
        return cls(parent, space.coords)


def _ideal_check(parent: Segalgebra, cand: Subspace) -> tuple[bool, str]:
    tol = get_tolerances().sub_tol
    inc = parent.inclusion_residual(cand)
    if inc > tol:
        raise PreconditionError("ideal", f"candidate is not contained in the algebra (residual {inc:.3e})")
    if cand.contains(np.eye(parent.dim_h)):
        return False, "ideal contains the identity (not proper)"
    jres, lres = _closure_residuals(parent, cand)
    if max(jres, lres) > tol:
        return False, f"not invariant under multiplication (Jordan {jres:.3e}, Lie {lres:.3e})"
    return True, ""


def generate(seeds: Sequence = (), dim_h: int | None = None) -> Segalgebra:
    """Smallest Segalgebra containing ``seeds`` and the identity.

    Round-based closure: all Jordan and Lie products involving a direction
    added in the previous round are projected against the current basis and
    new directions (singular value above ``accept_tol``) are appended, until
    a round adds nothing.  Dimension grows every round and is bounded by
    n^2, so the loop terminates.
    """
    mats = _stack(list(seeds), dim_h)
    n = mats.shape[-1]
    rtol = get_tolerances().accept_tol
    start = la.to_coords(np.eye(n)) / math.sqrt(n)
    q = start[None, :]
    seed_coords = la.to_coords(mats)
    if seed_coords.shape[0]:
        norms = np.linalg.norm(seed_coords, axis=1)
        nz = norms > 0
        q = _extend(q, seed_coords[nz] / norms[nz, None], rtol)
    frontier = 0
    while True:
        b = la.from_coords(q, n)
        fresh = b[frontier:]
        cands = np.concatenate(
            [la.to_coords(la.jordan_stack(b, fresh)), la.to_coords(la.lie_stack(b, fresh))]
        ).reshape(-1, n * n)
        grown = _extend(q, cands, rtol)
        if grown.shape[0] == q.shape[0]:
            break
        frontier, q = q.shape[0], grown
    return Segalgebra(q, n)


def member(space: Subspace, a) -> Membership:
    """Membership test with the projection residual attached."""
    return space.contains(a)


def lie_norms(space: Subspace) -> np.ndarray:
    """Frobenius norms of all pairwise Lie products of the basis."""
    b = space.basis
    if b.shape[0] == 0:
        return np.zeros((0, 0))
    return np.linalg.norm(la.lie_stack(b, b), axis=(-2, -1))


def is_commutative(space: Subspace) -> bool:
    """True iff all Lie products of basis pairs vanish (within ``sub_tol``)."""
    norms = lie_norms(space)
    return bool(norms.size == 0 or norms.max() <= get_tolerances().sub_tol)


def is_ideal(space: Segalgebra, candidate) -> bool:
    """Whether ``candidate`` (a Subspace or list of members) is a proper ideal.

    Raises :class:`PreconditionError` when the candidate is not inside
    ``space``.
    """
    if not isinstance(candidate, Subspace):
        ops = list(candidate)
        candidate = (
            Subspace.span(ops, space.dim_h) if ops else Subspace(np.zeros((0, space.dim_h ** 2)), space.dim_h)
        )
    return _ideal_check(space, candidate)[0]


def quasicommutativity_residual(space: Subspace, ideal: Subspace) -> float:
    """Worst relative residual of the basis Lie products against ``ideal``."""
    b = space.basis
    if b.shape[0] == 0:
        return 0.0
    x = la.to_coords(la.lie_stack(b, b)).reshape(-1, space.dim_h ** 2)
    res = np.linalg.norm(_orthogonalize(ideal.coords, x), axis=1)
    return float(np.max(res / np.maximum(1.0, np.linalg.norm(x, axis=1))))


def is_quasicommutative(space: Subspace, ideal: Subspace) -> bool:
    """``S . S`` contained in ``ideal``."""
    return quasicommutativity_residual(space, ideal) <= get_tolerances().sub_tol


def complexified_closure_check(space: Subspace) -> bool:
    """Both Re(b_i b_j) and Im(b_i b_j) lie in the subspace for all pairs.

    In finite dimension this is exactly the statement that ``T + iT`` is a
    subalgebra of the full matrix algebra.
    """
    b = space.basis
    if b.shape[0] == 0:
        return True
    tol = get_tolerances().sub_tol
    re = la.jordan_stack(b, b)
    im = -la.lie_stack(b, b)
    for part in (re, im):
        scale = np.maximum(1.0, np.linalg.norm(part, axis=(-2, -1)))
        if np.max(space.residuals(part) / scale) > tol:
            return False
    return True


class QuotientAlgebra:
    """Quotient ``S / I`` realised on coset representatives.

    Representatives are the orthogonal complement of the ideal inside the
    algebra; the hat map is the orthogonal projection onto that complement,
    and quotient products project the ordinary products of representatives.
    """

    def __init__(self, parent: Segalgebra, ideal: IdealSubspace):
        if ideal.dim_h != parent.dim_h:
            raise ValidationError("ideal and algebra act on different spaces")
        self.parent = parent
        self.ideal = ideal
        comp = _orthogonalize(ideal.coords, parent.coords)
        rows = la.range_basis(comp.T, get_tolerances().accept_tol, scale=1.0).T
        self.reps = Subspace(rows, parent.dim_h)
        self._carrier = None

    @property
    def rep_basis(self) -> np.ndarray:
        return self.reps.basis

    @property
    def dim(self) -> int:
        return self.reps.dim

    def hat(self, a) -> la.HermitianOp:
        """Canonical representative of the coset of ``a`` (``a`` must lie in S)."""
        m = la.as_matrix(a)
        if not self.parent.contains(m):
            raise PreconditionError("quotient", "element is not in the parent algebra")
        return self.reps.project(m)

    def jordan(self, x, y) -> la.HermitianOp:
        return self.reps.project(la.jordan(x, y))

    def lie(self, x, y) -> la.HermitianOp:
        return self.reps.project(la.lie(x, y))

    @property
    def identity(self) -> la.HermitianOp:
        return self.hat(np.eye(self.parent.dim_h))

    def is_commutative(self) -> bool:
        b = self.rep_basis
        if b.shape[0] == 0:
            return True
        x =la.to_coords(la.lie_stack(b, b)).reshape(-1, self.parent.dim_h ** 2)
        proj = np.linalg.norm(x @ self.reps.coords.T, axis=1)
        return bool(proj.max() <= get_tolerances().sub_tol)

    def homomorphism_residual(self, a, b) -> float:
        """Worst of |hat(A o B) - hat(A) o hat(B)| and the Lie analogue."""
        ha, hb = self.hat(a), self.hat(b)
        r1 = np.linalg.norm(self.hat(la.jordan(a, b)).mat - self.jordan(ha, hb).mat)
        r2 = np.linalg.norm(self.hat(la.lie(a, b)).mat - self.lie(ha, hb).mat)
        return float(max(r1, r2))

    @property
    def carrier(self) -> np.ndarray:
        """Orthonormal columns spanning the joint kernel of the ideal.

        The algebra acts on this subspace and the restriction map has kernel
        exactly the ideal, so it is a faithful matrix representation of the
        quotient.
        """
        if self._carrier is None:
            n = self.parent.dim_h
            if self.ideal.dim == 0:
                self._carrier = np.eye(n, dtype=complex)
            else:
                stacked = self.ideal.basis.reshape(-1, n)
                self._carrier = la.null_space(stacked, get_tolerances().accept_tol, scale=1.0)
        return self._carrier

    def represent(self, a) -> np.ndarray:
        """Compression of ``a`` to the carrier subspace."""
        q = self.carrier
        return q.conj().T @ la.as_matrix(a) @ q


def quotient(space: Segalgebra, ideal: IdealSubspace) -> QuotientAlgebra:
    if not isinstance(ideal, IdealSubspace):
        ideal = IdealSubspace(space, ideal.coords)
    elif ideal.parent is not space and not ideal.parent.same_span(space):
        # re-validate against the algebra actually passed in
        ideal = IdealSubspace(space, ideal.coords)
    return QuotientAlgebra(space, ideal)


# --- standard algebras ------------------------------------------------------


def full_algebra(n: int) -> Segalgebra:
    """All n x n Hermitian matrices."""
    return Segalgebra(np.eye(n * n), n)


def diagonal_algebra(n: int) -> Segalgebra:
    """Real diagonal matrices; the finite analogue of multiplication operators."""
    return Segalgebra(np.eye(n, n * n), n)


def scalar_algebra(n: int) -> Segalgebra:
    """Real multiples of the identity."""
    return Segalgebra(la.to_coords(np.eye(n))[None, :] / math.sqrt(n), n)
