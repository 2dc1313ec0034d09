"""Beable subalgebras.

A subalgebra B has beable status for a state w when the restriction of w to B
is a mixture of dispersion-free states on B.  This happens exactly when every
Lie product of elements of B lies in the state ideal of w restricted to B;
:func:`has_beable_status` decides this and, on success, builds the mixture
through the commutative quotient ``B / I``.
"""
from __future__ import annotations

import dataclasses
from typing import Sequence

import numpy as np

from . import linalg as la
from . import segalgebra as sg
from . import states as st
from .config import get_tolerances
from .errors import NumericalError, PreconditionError, ValidationError

__all__ = [
    "BeableVerdict",
    "EigenFamily",
    "MaximalityCertificate",
    "ForcedCommutativity",
    "has_beable_status",
    "intersect_definite_sets",
    "bub_definite",
    "family_algebra",
    "check_maximality",
    "maximality_certificate",
    "recover_family",
    "forced_commutativity",
    "commutant",
]


@dataclasses.dataclass(frozen=True)
class BeableVerdict:
    """Outcome of a beable-status decision.

    ``residual`` is the worst relative norm of ``(A . B) sqrt(rho)`` over basis
    pairs; zero (within ``sub_tol``) means every Lie product lies in the
    state ideal.  A negative verdict carries the Lie product with the largest
    ``w(L^2)`` as ``witness``.
    """

    has_status: bool
    ideal: st.StateIdeal
    residual: float
    witness: la.HermitianOp | None = None
    witness_value: float | None = None
    decomposition: st.MixtureDecomposition | None = None
    reconstruction_residual: float | None = None

    def __bool__(self):
        return self.has_status

    def to_dict(self) -> dict:
        from .literals import matrix_literal

        out = {"has_status": self.has_status, "ideal_dim": self.ideal.dim, "residual": self.residual}
        if self.witness is not None:
            out["witness"] = matrix_literal(self.witness)
            out["witness_value"] = self.witness_value
        if self.decomposition is not None:
            out["decomposition"] = self.decomposition.to_dict()
            out["dropped_mass"] = self.decomposition.dropped_mass
            out["reconstruction_residual"] = self.reconstruction_residual
        return out


def _lie_annihilation(algebra: sg.Subspace, state: st.AlgState):
    b = algebra.basis
    lies = la.lie_stack(b, b)
    norms = np.linalg.norm(lies, axis=(-2, -1))
    hit = np.linalg.norm(lies @ state.sqrt_rho, axis=(-2, -1))
    return lies, hit, hit / np.maximum(1.0, norms)


def has_beable_status(algebra: sg.Segalgebra, state: st.AlgState) -> BeableVerdict:
    """Decide whether ``algebra`` has beable status for ``state``."""
    st._match(state, algebra)
    if algebra.dim == 0:
        raise ValidationError("empty algebra")
    ideal = st.state_ideal(state, algebra)
    lies, hit, rel = _lie_annihilation(algebra, state)
    worst = float(rel.max())
    if worst > get_tolerances().sub_tol:
        i, j = np.unravel_index(int(np.argmax(hit)), hit.shape)
        return BeableVerdict(
            has_status=False,
            ideal=ideal,
            residual=worst,
            witness=la.HermitianOp(lies[i, j], validate=False),
            witness_value=float(hit[i, j] ** 2),
        )
    # beable status makes the null set a genuine ideal, so the quotient exists
    q = sg.quotient(algebra, ideal.as_ideal())
    mix = st.decompose_on_quotient(state, q)
    recon = mix.reconstruction_residual(state, algebra)
    if recon > get_tolerances().df_tol:
        raise NumericalError(f"beable mixture does not reproduce the state (residual {recon:.3e})")
    return BeableVerdict(True, ideal, worst, decomposition=mix, reconstruction_residual=recon)


def intersect_definite_sets(
    family: Sequence[st.AlgState], state: st.AlgState, algebra: sg.Segalgebra
) -> sg.Segalgebra:
    """Intersection of the definite sets of ``family`` inside ``algebra``.

    Requires the intersection of the family's state ideals to lie inside the
    state ideal of ``state``; otherwise the intersection is not certified to
    have beable status and :class:`PreconditionError` is raised.
    """
    if not family:
        raise ValidationError("empty family of states")
    ideals = [st.state_ideal(s, algebra) for s in family]
    common = sg.intersect(*ideals)
    target = st.state_ideal(state, algebra)
    res = target.inclusion_residual(common)
    if res > get_tolerances().sub_tol:
        raise PreconditionError(
            "ideal-inclusion",
            f"intersection of the family's state ideals is not inside the target's (residual {res:.3e})",
        )
    sets = [st.definite_set(s, algebra) for s in family]
    return sg.Segalgebra.from_subspace(sg.intersect(*sets))


@dataclasses.dataclass(frozen=True, eq=False)
class EigenFamily:
    """Orthonormal vectors, spanning ``target`` and none orthogonal to it.

    Vectors are stored as rows, each rephased so that ``<v_x|target>`` is real
    and positive.  ``labels`` optionally tags each vector (Bub-definite
    families use the eigenvalue of the preferred observable).
    ``dropped_mass`` records probability discarded while building the family.
    """

    vectors: np.ndarray
    target: np.ndarray
    labels: tuple | None = None
    dropped_mass: float = 0.0

    def __post_init__(self):
        tol = get_tolerances().fam_tol
        v = np.asarray(self.target, dtype=complex).ravel()
        if abs(np.linalg.norm(v) - 1.0) > tol:
            raise ValidationError("target vector is not a unit vector")
        vecs = np.atleast_2d(np.asarray(self.vectors, dtype=complex))
        if vecs.shape[0] == 0 or vecs.shape[1] != v.size:
            raise ValidationError(f"family vectors have shape {vecs.shape}, target has length {v.size}")
        gram = vecs.conj() @ vecs.T
        if np.max(np.abs(gram - np.eye(vecs.shape[0]))) > tol:
            raise ValidationError("family vectors are not mutually orthonormal")
        overlaps = vecs.conj() @ v
        if np.min(np.abs(overlaps)) <= tol:
            raise ValidationError("a family vector is orthogonal to the target")
        span_res = np.linalg.norm(v - vecs.T @ overlaps)
        if span_res > tol:
            raise ValidationError(f"target is not in the span of the family (residual {span_res:.3e})")
        phases = overlaps / np.abs(overlaps)
        vecs = vecs * phases[:, None]
        vecs.setflags(write=False)
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "target", v)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))

    def __len__(self):
        return self.vectors.shape[0]

    @property
    def overlaps(self) -> np.ndarray:
        """``|<v_x|v>|^2`` per member; these sum to 1."""
        return np.abs(self.vectors.conj() @ self.target) ** 2

    def same_rays(self, other: "EigenFamily", tol: float = 1e-8) -> bool:
        """Equality up to phases and ordering."""
        if len(self) != len(other):
            return False
        overlap = np.abs(self.vectors.conj() @ other.vectors.T)
        return bool(np.all(np.abs(np.sort(overlap.max(axis=1)) - 1.0) <= tol)) and bool(
            np.all(np.abs(overlap.max(axis=0) - 1.0) <= tol)
        )

    def to_dict(self) -> dict:
        from .literals import vector_literal

        out = {"vectors": [vector_literal(x) for x in self.vectors], "overlaps": self.overlaps.tolist()}
        if self.labels is not None:
            out["labels"] = list(self.labels)
        if self.dropped_mass:
            out["dropped_mass"] = self.dropped_mass
        return out


def family_algebra(family: EigenFamily) -> sg.Segalgebra:
    """All Hermitian matrices having every family vector as an eigenvector.

    Such a matrix is diagonal on the span of the family (in the family basis)
    and arbitrary Hermitian on the orthogonal complement, so the algebra has
    dimension ``m + (n - m)^2``.
    """
    vecs = family.vectors
    m, n = vecs.shape
    projectors = np.einsum("ka,kb->kab", vecs, vecs.conj())
    rows = [la.to_coords(projectors)]
    comp = la.null_space(vecs.conj(), get_tolerances().accept_tol, scale=1.0)
    d = comp.shape[1]
    if d:
        herm = la.from_coords(np.eye(d * d), d)
        rows.append(la.to_coords(comp @ herm @ comp.conj().T))
    return sg.Segalgebra(np.vstack(rows), n)


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    norm = np.linalg.norm(v)
    if norm < 1e-12:
        raise ValidationError("vector has (numerically) zero norm")
    if abs(norm - 1.0) > 1e-6:
        raise ValidationError(f"expected a unit vector, norm is {norm:.6g}")
    return v / norm


def bub_definite(v, preferred) -> tuple[EigenFamily, sg.Segalgebra]:
    """Bub-definite subalgebra for state vector ``v`` and preferred observable.

    ``v`` is projected onto every eigenspace of ``preferred`` that it gives
    probability above ``proj_floor``; the renormalised projections form an
    :class:`EigenFamily` and the algebra is the intersection of their definite
    sets (all operators sharing those eigenvectors).

    When some eigenspace carries a nonzero probability below the floor, the
    family's target is the renormalised projection of ``v`` onto the kept
    eigenspaces and the discarded probability is stored as
    ``family.dropped_mass``.
    """
    v = _unit(v)
    r = la.as_matrix(preferred)
    if r.shape[0] != v.size:
        raise ValidationError(f"dimension mismatch: {r.shape[0]} vs {v.size}")
    floor = get_tolerances().proj_floor
    vecs, labels, kept = [], [], np.zeros_like(v)
    dropped = 0.0
    for value, proj in la.decompose(r).projectors():
        pv = proj @ v
        p = float(np.real(np.vdot(v, pv)))
        if p > floor:
            vecs.append(pv / np.sqrt(p))
            labels.append(value)
            kept = kept + pv
        else:
            dropped += max(p, 0.0)
    target = v if dropped == 0.0 else kept / np.linalg.norm(kept)
    family = EigenFamily(np.array(vecs), target, labels=tuple(labels), dropped_mass=dropped)
    return family, family_algebra(family)


def commutant(algebra: sg.Subspace) -> sg.Subspace:
    """Hermitian matrices commuting with every element of ``algebra``."""
    n = algebra.dim_h
    full = la.from_coords(np.eye(n * n), n)
    comm = la.lie_stack(full, algebra.basis)  # (n^2, k, n, n)
    flat = la.to_coords(comm).reshape(n * n, -1).T
    basis = la.null_space(flat, get_tolerances().accept_tol, scale=1.0)
    return sg.Subspace(basis.T, n)


def _joint_kernel_of_lies(algebra: sg.Subspace) -> np.ndarray:
    b = algebra.basis
    n = algebra.dim_h
    return la.null_space(la.lie_stack(b, b).reshape(-1, n), get_tolerances().accept_tol, scale=1.0)


def _candidate_family(algebra: sg.Subspace, v: np.ndarray) -> EigenFamily | None:
    """Projections of ``v`` onto the joint eigenspaces of ``algebra`` inside
    the kernel of its Lie products, or None when ``v`` is not in that kernel."""
    tol = get_tolerances()
    w = _joint_kernel_of_lies(algebra)
    if w.shape[1] == 0:
        return None
    if np.linalg.norm(v - w @ (w.conj().T @ v)) > tol.fam_tol:
        return None
    outside = np.eye(algebra.dim_h) - w @ w.conj().T
    for b in algebra.basis:
        leak = np.linalg.norm(outside @ b @ w)
        if leak > tol.sub_tol * max(1.0, np.linalg.norm(b)) * 10:
            raise NumericalError(f"kernel of Lie products is not invariant (leak {leak:.3e})")
    blocks = la.joint_eigenspaces([w.conj().T @ b @ w for b in algebra.basis])
    vecs = []
    for blk in blocks:
        e = w @ blk
        p = e @ (e.conj().T @ v)
        norm = np.linalg.norm(p)
        if norm > tol.fam_tol:
            vecs.append(p / norm)
    return EigenFamily(np.array(vecs), v)


@dataclasses.dataclass(frozen=True)
class MaximalityCertificate:
    """Randomised maximality evidence.

    ``maximal`` is True when no trial extension kept beable status.  When an
    extension was found, ``extension`` holds the adjoined operator and
    ``sampler`` names the proposal that produced it.
    """

    maximal: bool
    trials_run: int
    extension: la.HermitianOp | None = None
    sampler: str | None = None
    extended_dim: int | None = None

    def __bool__(self):
        return self.maximal


SAMPLERS = ("generic", "commutant", "definite-set", "eigen-family")


def _proposal_pools(algebra: sg.Segalgebra, state: st.AlgState) -> dict[str, sg.Subspace | None]:
    n = algebra.dim_h
    pools: dict[str, sg.Subspace | None] = {"generic": None}
    pools["commutant"] = commutant(algebra)
    pools["definite-set"] = st.definite_set(state, sg.full_algebra(n))
    fam = _candidate_family(algebra, state.vector) if state.vector is not None else None
    pools["eigen-family"] = family_algebra(fam) if fam is not None else None
    for name in list(pools):
        pool = pools[name]
        if pool is not None and algebra.includes(pool):
            pools[name] = None
    return pools


def maximality_certificate(
    algebra: sg.Segalgebra, state: st.AlgState, trials: int = 200, rng_seed: int = 0
) -> MaximalityCertificate:
    """Adjoin random operators outside ``algebra`` and test beable status.

    Trials cycle through proposal distributions: generic random Hermitian
    matrices, random elements of the commutant, of the state's definite set
    in the full algebra, and (for vector states) of the algebra of the
    candidate eigenvector family.  A pool contained in ``algebra`` falls back
    to the generic proposal.  Trial ``k`` draws from its own RNG stream
    spawned from ``rng_seed``.
    """
    if not has_beable_status(algebra, state):
        raise PreconditionError("beable-status", "algebra does not have beable status for the state")
    n = algebra.dim_h
    pools = _proposal_pools(algebra, state)
    streams = np.random.SeedSequence(rng_seed).spawn(trials)
    for k, seq in enumerate(streams):
        rng = np.random.default_rng(seq)
        name = SAMPLERS[k % len(SAMPLERS)]
        pool = pools[name]
        if pool is None:
            name = "generic"
            a = la.random_hermitian(rng, n).mat
        else:
            a = pool.combine(rng.normal(size=pool.dim)).mat
        a = a - algebra.project(a).mat
        norm = np.linalg.norm(a)
        if norm <= get_tolerances().accept_tol:
            name = "generic"
            a = la.random_hermitian(rng, n).mat
            a = a - algebra.project(a).mat
            norm = np.linalg.norm(a)
        a = a / norm
        bigger = sg.generate(list(algebra.basis) + [a])
        if has_beable_status(bigger, state):
            return MaximalityCertificate(False, k + 1, la.HermitianOp(a, validate=False), name, bigger.dim)
    return MaximalityCertificate(True, trials)


def check_maximality(algebra: sg.Segalgebra, state: st.AlgState, trials: int = 200, rng_seed: int = 0) -> bool:
    """Probabilistic certificate that ``algebra`` is a maximal beable subalgebra."""
    return maximality_certificate(algebra, state, trials, rng_seed).maximal


def recover_family(algebra: sg.Segalgebra, v) -> EigenFamily:
    """Eigenvector family of a maximal beable subalgebra for the vector state ``v``.

    Works on the joint kernel of all Lie products of the algebra, checks that
    the algebra leaves it invariant, diagonalises the algebra there and keeps
    the projections of ``v`` onto the joint eigenspaces it is not orthogonal
    to.  The family algebra of the result must reproduce ``algebra``;
    :class:`PreconditionError` is raised when it is strictly larger (the
    input was not maximal) or when ``v`` is outside the kernel (no beable
    status).
    """
    v = _unit(v)
    if v.size != algebra.dim_h:
        raise ValidationError(f"dimension mismatch: {v.size} vs {algebra.dim_h}")
    fam = _candidate_family(algebra, v)
    if fam is None:
        raise PreconditionError("beable-status", "state vector is not annihilated by the Lie products")
    rebuilt = family_algebra(fam)
    if not rebuilt.same_span(algebra):
        if rebuilt.includes(algebra):
            raise PreconditionError(
                "maximal", f"algebra is not maximal: recovered algebra has dimension {rebuilt.dim} > {algebra.dim}"
            )
        raise NumericalError("recovered family algebra does not contain the input algebra")
    return fam


@dataclasses.dataclass(frozen=True)
class ForcedCommutativity:
    has_status_for_all: bool
    commutative: bool
    verdicts: tuple[BeableVerdict, ...]
    full: bool
    faithful_shortcut: bool

    def __bool__(self):
        return self.has_status_for_all


def is_full(family: Sequence[st.AlgState], algebra: sg.Subspace) -> bool:
    """Only the zero element of ``algebra`` has zero expectation in every state."""
    if not family:
        return algebra.dim == 0
    rows = np.array([la.to_coords(s.rho) for s in family]) @ algebra.coords.T
    return la.null_space(rows, get_tolerances().accept_tol, scale=1.0).shape[1] == 0


def forced_commutativity(
    algebra: sg.Segalgebra, family: Sequence[st.AlgState], parent: sg.Segalgebra | None = None
) -> ForcedCommutativity:
    """Beable status for every state of a full set forces commutativity.

    ``family`` must be full on ``parent`` (default: all Hermitian matrices),
    unless it contains a faithful state, whose zero state ideal already forces
    the conclusion.  Raises :class:`NumericalError` if beable status for all
    states coexists with a non-commutative algebra.
    """
    if parent is None:
        parent = sg.full_algebra(algebra.dim_h)
    full = is_full(family, parent)
    faithful = any(s.is_faithful for s in family)
    if not full and not faithful:
        raise PreconditionError("full-set", "states do not separate the algebra and none is faithful")
    verdicts = tuple(has_beable_status(algebra, s) for s in family)
    all_ok = all(v.has_status for v in verdicts)
    commutative = sg.is_commutative(algebra)
    if all_ok and not commutative:
        raise NumericalError("non-commutative algebra has beable status for a full set of states")
    return ForcedCommutativity(all_ok, commutative, verdicts, full, faithful and not full)
