"""States, dispersion-free states, state ideals and definite sets.

States are density matrices acting by ``w(A) = tr(rho A)``.  Dispersion-free
states (characters) are stored by their values on an algebra's orthonormal
basis, which determines them by linearity.
"""
from __future__ import annotations

import dataclasses
import math
from typing import Sequence

import numpy as np

from . import linalg as la
from . import segalgebra as sg
from .config import get_tolerances
from .errors import NumericalError, PreconditionError, ValidationError

__all__ = [
    "AlgState",
    "DispersionFreeState",
    "MixtureDecomposition",
    "StateIdeal",
    "evaluate",
    "state_ideal",
    "definite_set",
    "is_dispersion_free",
    "characters",
    "dispersion_free_states",
    "quotient_characters",
    "decompose_state",
    "decompose_on_quotient",
]


class AlgState:
    """A density matrix: Hermitian, positive semidefinite, unit trace."""

    def __init__(self, rho):
        tol = get_tolerances().state_tol
        op = la.HermitianOp(rho)
        dec = la.decompose(op)
        if dec.eigenvalues[0] < -tol:
            raise ValidationError(f"density matrix is not positive (min eigenvalue {dec.eigenvalues[0]:.3e})")
        tr = float(np.real(np.trace(op.mat)))
        if abs(tr - 1.0) > tol:
            raise ValidationError(f"density matrix trace is {tr!r}, expected 1")
        self.rho = op.mat
        self._dec = dec
        self._sqrt = None
        self._vector = None

    @classmethod
    def from_vector(cls, v) -> "AlgState":
        """Vector state ``|v><v|``; the vector is normalised."""
        v = np.asarray(v, dtype=complex).ravel()
        norm = float(np.linalg.norm(v))
        if norm < 1e-12:
            raise ValidationError("state vector has (numerically) zero norm")
        v = v / norm
        state = cls(np.outer(v, v.conj()))
        state._vector = v
        return state

    @classmethod
    def maximally_mixed(cls, n: int) -> "AlgState":
        return cls(np.eye(n) / n)

    @property
    def dim_h(self) -> int:
        return self.rho.shape[0]

    @property
    def vector(self) -> np.ndarray | None:
        """The state vector, when the state was built from one."""
        return self._vector

    def _support_mask(self):
        w = self._dec.eigenvalues
        return w > get_tolerances().degeneracy_tol * max(float(w[-1]), np.finfo(float).tiny)

    @property
    def rank(self) -> int:
        return int(np.sum(self._support_mask()))

    @property
    def is_faithful(self) -> bool:
        """Full rank, so the state ideal of any algebra is zero."""
        return self.rank == self.dim_h

    @property
    def support(self) -> np.ndarray:
        """Orthonormal columns spanning the range of rho."""
        return self._dec.eigenvectors[:, self._support_mask()]

    @property
    def sqrt_rho(self) -> np.ndarray:
        if self._sqrt is None:
            w = np.where(self._support_mask(), self._dec.eigenvalues, 0.0)
            u = self._dec.eigenvectors
            s = (u * np.sqrt(w)) @ u.conj().T
            s.setflags(write=False)
            self._sqrt = s
        return self._sqrt

    def __call__(self, a) -> float:
        return evaluate(self, a)

    def __repr__(self):
        return f"AlgState(dim={self.dim_h}, rank={self.rank})"


def evaluate(state: AlgState, a) -> float:
    """Expectation value ``tr(rho A)``."""
    m = la.as_matrix(a)
    if m.shape[0] != state.dim_h:
        raise ValidationError(f"dimension mismatch: {m.shape[0]} vs {state.dim_h}")
    val = np.sum(state.rho.T * m)
    if abs(val.imag) > 1e-12 * max(1.0, float(np.linalg.norm(m))):
        raise NumericalError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def _annihilator(state: AlgState, mats: np.ndarray) -> np.ndarray:
    """Null-space coefficients of ``c -> sum_k c_k M_k sqrt(rho)``."""
    if mats.shape[0] == 0:
        return np.zeros((0, 0))
    prods = mats @ state.sqrt_rho
    flat = prods.reshape(prods.shape[0], -1)
    real = np.concatenate([flat.real, flat.imag], axis=1).T
    return la.null_space(real, get_tolerances().accept_tol, scale=1.0)


def _recombine(space: sg.Subspace, coeffs: np.ndarray) -> np.ndarray:
    x = (space.coords.T @ coeffs).T
    if x.shape[0]:
        q, _ = np.linalg.qr(x.T)
        x = q.T
    return x


class StateIdeal(sg.Subspace):
    """The null set ``{A in B : w(A^2) = 0}`` of a state on an algebra.

    Always a closed subspace excluding the identity, closed under both
    products among its own elements, and annihilated by the state.  It is
    invariant under multiplication by all of ``B`` (a genuine ideal) whenever
    ``B`` has beable status for the state, but not in general: for the full
    2x2 algebra and ``|0><0|`` it is ``span{|1><1|}``, which ``sigma_x``
    moves out of.  :attr:`is_ideal` reports which case holds.
    """

    def __init__(self, parent: sg.Segalgebra, state: AlgState, coords: np.ndarray):
        super().__init__(coords, parent.dim_h)
        self.parent = parent
        self.state = state
        self._is_ideal = None

    @property
    def is_ideal(self) -> bool:
        if self._is_ideal is None:
            self._is_ideal = sg.is_ideal(self.parent, self)
        return self._is_ideal

    def as_ideal(self) -> sg.IdealSubspace:
        """The same subspace as a validated :class:`IdealSubspace`."""
        return sg.IdealSubspace(self.parent, self.coords)


def state_ideal(state: AlgState, algebra: sg.Segalgebra) -> StateIdeal:
    """``{A in B : w(A^2) = 0}``, computed as ``{A in B : A sqrt(rho) = 0}``.

    The null space of ``c -> sum_k c_k b_k sqrt(rho)`` over the algebra's
    basis coordinates.
    """
    _match(state, algebra)
    coeffs = _annihilator(state, algebra.basis)
    return StateIdeal(algebra, state, _recombine(algebra, coeffs))


def definite_set(state: AlgState, algebra: sg.Segalgebra) -> sg.Segalgebra:
    """``{A in S : w(A^2) = w(A)^2}``, computed as ``{A : (A - w(A) I) sqrt(rho) = 0}``.

    The result is validated as a Segalgebra on construction.
    """
    _match(state, algebra)
    b = algebra.basis
    means = np.array([evaluate(state, m) for m in b])
    shifted = b - means[:, None, None] * np.eye(algebra.dim_h)
    coeffs = _annihilator(state, shifted)
    return sg.Segalgebra(_recombine(algebra, coeffs), algebra.dim_h)


def _match(state, algebra):
    if state.dim_h != algebra.dim_h:
        raise ValidationError(f"dimension mismatch: state on C^{state.dim_h}, algebra on C^{algebra.dim_h}")


# --- dispersion-free states -------------------------------------------------


def _character_residuals(algebra: sg.Subspace, values: np.ndarray) -> tuple[float, float, float]:
    """(|val(I) - 1|, worst multiplicativity error, worst |val(A . B)|)."""
    b = algebra.basis
    q = algebra.coords
    unit = abs(float(q @ la.to_coords(np.eye(algebra.dim_h)) @ values) - 1.0)
    if b.shape[0] == 0:
        return unit, 0.0, 0.0
    jc = la.to_coords(la.jordan_stack(b, b)) @ q.T
    lc = la.to_coords(la.lie_stack(b, b)) @ q.T
    mult = float(np.max(np.abs(jc @ values - np.outer(values, values))))
    lie0 = float(np.max(np.abs(lc @ values)))
    return unit, mult, lie0


@dataclasses.dataclass(frozen=True, eq=False)
class DispersionFreeState:
    """A character of a Segalgebra: a real homomorphism onto the reals.

    ``values[k]`` is the value on the k-th basis element of ``algebra``.
    ``support`` optionally records the projector onto the joint eigenspace
    the character was read off from.
    """

    algebra: sg.Subspace
    values: np.ndarray
    support: np.ndarray | None = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.algebra.dim,):
            raise ValidationError(f"expected {self.algebra.dim} values, got shape {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        tol = get_tolerances().df_tol
        unit, mult, lie0 = _character_residuals(self.algebra, vals)
        if max(unit, mult, lie0) > tol:
            raise ValidationError(
                f"values do not define a dispersion-free state "
                f"(|v(I)-1|={unit:.2e}, mult={mult:.2e}, lie={lie0:.2e})"
            )

    def __call__(self, a) -> float:
        return self.evaluate(a)

    def evaluate(self, a) -> float:
        m = la.as_matrix(a)
        hit = self.algebra.contains(m)
        if not hit:
            raise PreconditionError("character", f"operator is outside the algebra (residual {hit.residual:.3e})")
        return float(self.algebra.coefficients(m) @ self.values)

    def residuals(self) -> dict[str, float]:
        unit, mult, lie0 = _character_residuals(self.algebra, self.values)
        return {"identity": unit, "multiplicativity": mult, "lie": lie0}


def _character_from_block(algebra: sg.Subspace, vecs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d = vecs.shape[1]
    values = np.array([float(np.real(np.trace(vecs.conj().T @ b @ vecs))) / d for b in algebra.basis])
    return values, vecs @ vecs.conj().T


def _merge(algebra, blocks) -> list[DispersionFreeState]:
    tol = get_tolerances().df_tol
    merged: list[list] = []
    for vecs in blocks:
        values, proj = _character_from_block(algebra, vecs)
        for entry in merged:
            if np.max(np.abs(entry[0] - values)) <= tol:
                entry[1] = entry[1] + proj
                break
        else:
            merged.append([values, proj])
    return [DispersionFreeState(algebra, v, p) for v, p in merged]


def characters(algebra: sg.Subspace) -> list[DispersionFreeState]:
    """All dispersion-free states of a commutative algebra.

    The basis is simultaneously diagonalised; each joint eigenspace gives the
    character ``A -> <e|A|e>``.  Characters with equal value vectors (within
    ``df_tol``) are merged.
    """
    if not sg.is_commutative(algebra):
        raise PreconditionError("commutative", "characters() needs a commutative algebra")
    if algebra.dim == 0:
        return []
    return _merge(algebra, la.joint_eigenspaces(list(algebra.basis)))


def dispersion_free_states(algebra: sg.Subspace) -> list[DispersionFreeState]:
    """Dispersion-free states of an arbitrary Segalgebra (possibly none).

    They live on the joint kernel of all Lie products, which the algebra
    leaves invariant and on which it acts commutatively.
    """
    b = algebra.basis
    n = algebra.dim_h
    lies = la.lie_stack(b, b).reshape(-1, n)
    w0 = la.null_space(lies, get_tolerances().accept_tol, scale=1.0)
    if w0.shape[1] == 0:
        return []
    blocks = la.joint_eigenspaces([w0.conj().T @ m @ w0 for m in b])
    return _merge(algebra, [w0 @ blk for blk in blocks])


def quotient_characters(q: sg.QuotientAlgebra) -> list[DispersionFreeState]:
    """Characters of a commutative quotient, pulled back to the parent algebra.

    The quotient acts faithfully on the joint kernel of its ideal; characters
    are read off joint eigenspaces there and composed with the hat map.
    """
    if not q.is_commutative():
        raise PreconditionError("commutative", "quotient algebra is not commutative")
    carrier = q.carrier
    if carrier.shape[1] == 0:
        raise NumericalError("quotient carrier subspace is empty")
    reps = q.rep_basis
    blocks = la.joint_eigenspaces([q.represent(r) for r in reps])
    # coefficients of hat(b_i) in the representative basis
    hat_coeffs = q.parent.coords @ q.reps.coords.T
    tol = get_tolerances().df_tol
    merged: list[list] = []
    for blk in blocks:
        d = blk.shape[1]
        chi_q = np.array([float(np.real(np.trace(blk.conj().T @ q.represent(r) @ blk))) / d for r in reps])
        values = hat_coeffs @ chi_q
        vecs = carrier @ blk
        proj = vecs @ vecs.conj().T
        for entry in merged:
            if np.max(np.abs(entry[0] - values)) <= tol:
                entry[1] = entry[1] + proj
                break
        else:
            merged.append([values, proj])
    return [DispersionFreeState(q.parent, v, p) for v, p in merged]


def is_dispersion_free(state, algebra: sg.Segalgebra) -> bool:
    """Whether ``state`` is dispersion-free on every element of ``algebra``."""
    if isinstance(state, DispersionFreeState):
        if not state.algebra.includes(algebra):
            raise PreconditionError("character", "algebra is not inside the character's domain")
        vals = np.array([state.evaluate(b) for b in algebra.basis])
        try:
            DispersionFreeState(algebra, vals)
        except ValidationError:
            return False
        return True
    return definite_set(state, algebra).dim == algebra.dim


# --- mixtures ---------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class MixtureDecomposition:
    """A convex combination of dispersion-free states."""

    components: tuple[tuple[float, DispersionFreeState], ...]
    dropped_mass: float = 0.0

    def __post_init__(self):
        total = sum(w for w, _ in self.components)
        if any(w <= 0 for w, _ in self.components):
            raise ValidationError("mixture weights must be positive")
        if abs(total - 1.0) > 1e-10:
            raise ValidationError(f"mixture weights sum to {total!r}")

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.components])

    def expectation(self, a) -> float:
        return float(sum(w * chi.evaluate(a) for w, chi in self.components))

    def reconstruction_residual(self, state: AlgState, algebra: sg.Subspace | None = None) -> float:
        """Worst ``|sum_k w_k chi_k(b) - w(b)|`` over the basis of ``algebra``."""
        if algebra is None:
            algebra = self.components[0][1].algebra
        worst = 0.0
        for b in algebra.basis:
            worst = max(worst, abs(self.expectation(b) - evaluate(state, b)))
        return worst

    def to_dict(self) -> list[dict]:
        return [{"weight": float(w), "values": [float(v) for v in chi.values]} for w, chi in self.components]


def _mixture(state: AlgState, chars: Sequence[DispersionFreeState]) -> MixtureDecomposition:
    tol = get_tolerances()
    raw = [float(np.real(np.trace(state.rho @ chi.support))) for chi in chars]
    total = sum(raw)
    if abs(total - 1.0) > math.sqrt(tol.state_tol):
        raise PreconditionError("mixture", f"state mass outside the character supports is {1.0 - total:.3e}")
    kept = [(w, chi) for w, chi in zip(raw, chars) if w >= tol.weight_floor]
    mass = sum(w for w, _ in kept)
    return MixtureDecomposition(tuple((w / mass, chi) for w, chi in kept), dropped_mass=float(total - mass))


def decompose_state(state: AlgState, algebra: sg.Subspace) -> MixtureDecomposition:
    """Write the restriction of ``state`` to a commutative algebra as a mixture.

    The weight of each character is ``tr(rho P)`` for the projector ``P``
    onto its joint eigenspace.  Weights below ``weight_floor`` are dropped
    and the remainder renormalised; the dropped mass is recorded.
    """
    _match(state, algebra)
    return _mixture(state, characters(algebra))


def decompose_on_quotient(state: AlgState, q: sg.QuotientAlgebra) -> MixtureDecomposition:
    """Mixture over characters of a commutative quotient ``B / I``.

    Requires ``state`` to vanish on the ideal, so that ``phi(hat A) = w(A)``
    is a well-defined state on the quotient.
    """
    _match(state, q.parent)
    return _mixture(state, quotient_characters(q))
