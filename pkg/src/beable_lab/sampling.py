"""Random Segalgebras, states and eigenvector families.

Every finite-dimensional Segalgebra containing the identity is unitarily
equivalent to a direct sum ``(+)_i Herm(n_i) (x) I_{m_i}`` with
``sum n_i m_i = n``; :func:`random_block_algebra` samples from that normal
form, so its block structure (and hence every ideal) is known exactly.
"""
from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import linalg as la
from . import segalgebra as sg
from .beables import EigenFamily
from .states import AlgState

__all__ = [
    "BlockAlgebra",
    "random_unitary",
    "random_partition",
    "random_block_algebra",
    "random_commutative_algebra",
    "random_state",
    "random_pure_state",
    "random_family",
    "random_subspace",
    "random_element",
]


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed unitary via QR with the diagonal phase fix."""
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def _composition(rng: np.random.Generator, n: int) -> list[int]:
    cuts = [0] + [i for i in range(1, n) if rng.random() < 0.5] + [n]
    return [b - a for a, b in zip(cuts, cuts[1:])]


def random_partition(rng: np.random.Generator, n: int) -> list[tuple[int, int]]:
    """Random block shape ``[(n_i, m_i), ...]`` with ``sum n_i m_i = n``."""
    blocks = []
    for size in _composition(rng, n):
        divisors = [d for d in range(1, size + 1) if size % d == 0]
        k = int(rng.choice(divisors))
        blocks.append((k, size // k))
    return blocks


@dataclasses.dataclass(frozen=True, eq=False)
class BlockAlgebra:
    """A Segalgebra together with its block normal form.

    ``block_coords[i]`` is an orthonormal coordinate basis of the ``i``-th
    summand; a sum of summands is an ideal, and every ideal arises so.
    """

    algebra: sg.Segalgebra
    blocks: tuple[tuple[int, int], ...]
    unitary: np.ndarray
    block_coords: tuple[np.ndarray, ...]

    def ideal(self, which) -> sg.Subspace:
        """Span of the chosen summands."""
        n = self.algebra.dim_h
        rows = [self.block_coords[i] for i in which]
        coords = np.vstack(rows) if rows else np.zeros((0, n * n))
        return sg.Subspace(coords, n)

    def is_quasicommutative_over(self, which) -> bool:
        """Exact answer: every summand outside the ideal must be 1x1."""
        return all(self.blocks[i][0] == 1 for i in range(len(self.blocks)) if i not in set(which))


def _block_basis(blocks, u) -> list[np.ndarray]:
    n = sum(k * m for k, m in blocks)
    out = []
    offset = 0
    for k, m in blocks:
        herm = la.from_coords(np.eye(k * k), k)
        mats = np.zeros((k * k, n, n), dtype=complex)
        for j, h in enumerate(herm):
            mats[j, offset : offset + k * m, offset : offset + k * m] = np.kron(h, np.eye(m)) / math.sqrt(m)
        out.append(la.to_coords(u @ mats @ u.conj().T))
        offset += k * m
    return out


def random_block_algebra(
    rng: np.random.Generator, n: int, blocks: list[tuple[int, int]] | None = None, rotate: bool = True
) -> BlockAlgebra:
    """Random Segalgebra ``U ((+)_i Herm(n_i) (x) I_{m_i}) U^dagger``."""
    if blocks is None:
        blocks = random_partition(rng, n)
    if sum(k * m for k, m in blocks) != n:
        raise ValueError(f"blocks {blocks} do not fill dimension {n}")
    u = random_unitary(rng, n) if rotate else np.eye(n, dtype=complex)
    coords = _block_basis(blocks, u)
    algebra = sg.Segalgebra(np.vstack(coords), n)
    return BlockAlgebra(algebra, tuple(blocks), u, tuple(coords))


def random_commutative_algebra(rng: np.random.Generator, n: int) -> sg.Segalgebra:
    """Span of the projectors of a random partition of a random basis."""
    return random_block_algebra(rng, n, [(1, m) for m in _composition(rng, n)]).algebra


def random_state(rng: np.random.Generator, n: int, rank: int | None = None) -> AlgState:
    """Density matrix of the given (default: random) rank."""
    if rank is None:
        rank = int(rng.integers(1, n + 1))
    g = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = g @ g.conj().T
    return AlgState(rho / np.trace(rho).real)


def random_pure_state(rng: np.random.Generator, n: int) -> AlgState:
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return AlgState.from_vector(v / np.linalg.norm(v))


def random_family(rng: np.random.Generator, n: int, size: int | None = None) -> EigenFamily:
    """Random orthonormal family and a target spanned by it with no zero overlap."""
    if size is None:
        size = int(rng.integers(1, n + 1))
    u = random_unitary(rng, n)[:, :size]
    c = rng.uniform(0.3, 1.0, size=size) * np.exp(2j * np.pi * rng.uniform(size=size))
    v = u @ c
    return EigenFamily(u.T, v / np.linalg.norm(v))


def random_subspace(rng: np.random.Generator, n: int, k: int, with_identity: bool = True) -> sg.Subspace:
    """Span of ``k`` random Hermitian matrices, optionally plus the identity."""
    ops = [la.random_hermitian(rng, n) for _ in range(k)]
    if with_identity:
        ops.insert(0, la.identity(n))
    return sg.Subspace.span(ops, n)


def random_element(rng: np.random.Generator, space: sg.Subspace) -> la.HermitianOp:
    return space.combine(rng.normal(size=space.dim))
