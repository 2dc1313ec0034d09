"""Randomised theorem suites.

Each suite draws its own RNG stream from ``(rng_seed, suite, dim)`` so that
a run is reproducible and suites are independent of each other's order.
``worst_residual`` tracks quantities that must vanish; ``min_margin`` tracks
quantities that must stay away from zero (e.g. the closure defect of a
subspace that should *fail* a closure test).
"""
from __future__ import annotations

import dataclasses
import itertools
import math
from typing import Callable

import numpy as np

from . import beables as bb
from . import linalg as la
from . import sampling as sp
from . import segalgebra as sg
from . import states as st
from .errors import BeableLabError, ValidationError

__all__ = ["SuiteResult", "TheoremReport", "SUITES", "verify_theorems", "pauli_residuals"]

TOL = 1e-9


@dataclasses.dataclass
class SuiteResult:
    name: str
    claim: str
    passed: int = 0
    total: int = 0
    worst_residual: float = 0.0
    min_margin: float | None = None
    failures: list = dataclasses.field(default_factory=list)

    def record(self, ok: bool, residual: float = 0.0, margin: float | None = None, note: str = "") -> None:
        self.total += 1
        self.passed += bool(ok)
        self.worst_residual = max(self.worst_residual, float(residual))
        if margin is not None:
            self.min_margin = float(margin) if self.min_margin is None else min(self.min_margin, float(margin))
        if not ok and len(self.failures) < 5:
            self.failures.append(note or f"trial {self.total - 1}")

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def to_dict(self) -> dict:
        out = {
            "claim": self.claim,
            "passed": self.passed,
            "total": self.total,
            "worst_residual": self.worst_residual,
            "ok": self.ok,
        }
        if self.min_margin is not None:
            out["min_margin"] = self.min_margin
        if self.failures:
            out["failures"] = list(self.failures)
        return out


@dataclasses.dataclass
class TheoremReport:
    dims: tuple[int, ...]
    trials: int
    rng_seed: int
    suites: dict[str, SuiteResult]

    @property
    def all_passed(self) -> bool:
        return all(s.ok for s in self.suites.values())

    @property
    def worst_residual(self) -> float:
        return max((s.worst_residual for s in self.suites.values()), default=0.0)

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "trials": self.trials,
            "seed": self.rng_seed,
            "all_passed": self.all_passed,
            "worst_residual": self.worst_residual,
            "suites": {k: v.to_dict() for k, v in self.suites.items()},
        }


def _rel(x, scale=1.0) -> float:
    return float(np.linalg.norm(la.as_matrix(x))) / max(1.0, float(scale))


# --- Pauli identities -------------------------------------------------------


def pauli_residuals() -> dict[str, float]:
    """Residuals of the worked Pauli examples; all vanish exactly."""
    x, y, z = (la.pauli(a) for a in "xyz")
    i2 = la.identity(2)
    zero = np.zeros((2, 2))
    checks = {
        "x o y = 0": (la.jordan(x, y), zero),
        "(x o x) o y = y": (la.jordan(la.jordan(x, x), y), y.mat),
        "x o (x o y) = 0": (la.jordan(x, la.jordan(x, y)), zero),
        "x o x = I": (la.jordan(x, x), i2.mat),
        "x . y = -z": (la.lie(x, y), -z.mat),
        "x . (x . y) = -y": (la.lie(x, la.lie(x, y)), -y.mat),
        "(x . x) . y = 0": (la.lie(la.lie(x, x), y), zero),
    }
    return {k: float(np.max(np.abs(la.as_matrix(a) - b))) for k, (a, b) in checks.items()}


def _suite_pauli(rng, n, res: SuiteResult):
    for name, r in pauli_residuals().items():
        res.record(r <= 1e-12, r, note=name)


# --- linear algebra substrate ------------------------------------------------


def _product_split_residual(a, b) -> float:
    """``AB = A o B - i A . B``; sensitive to the sign convention of ``lie``."""
    am, bm = la.as_matrix(a), la.as_matrix(b)
    split = la.as_matrix(la.jordan(a, b)) - 1j * la.as_matrix(la.lie(a, b))
    return _rel(am @ bm - split, np.linalg.norm(am) * np.linalg.norm(bm))


def _suite_linalg(rng, n, res: SuiteResult):
    a, b = la.random_hermitian(rng, n), la.random_hermitian(rng, n)
    am, bm = a.mat, b.mat
    scale = np.linalg.norm(am) * np.linalg.norm(bm)
    polar = 0.25 * ((am + bm) @ (am + bm) - (am - bm) @ (am - bm))
    r_j = _rel(la.jordan(a, b).mat - polar, scale)
    r_l = _rel(la.lie(a, a), np.linalg.norm(am) ** 2)
    r_s = _product_split_residual(a, b)
    dec = la.decompose(a)
    r_d = _rel((dec.eigenvectors * dec.eigenvalues) @ dec.eigenvectors.conj().T - am, np.linalg.norm(am))
    poly = la.op_function(a, lambda t: t**3 - 2 * t + 1).mat
    r_f = _rel(poly - (am @ am @ am - 2 * am + np.eye(n)), np.linalg.norm(am) ** 3)
    r_n = abs(la.op_norm(a) - float(np.max(np.abs(dec.eigenvalues))))
    worst = max(r_j, r_l, r_s, r_d, r_f, r_n)
    res.record(worst <= TOL, worst, note=f"dim {n}: substrate residual {worst:.3e}")


# --- closure (T + iT is an algebra) ------------------------------------------


def _closure_defect(space: sg.Subspace) -> float:
    b = space.basis
    parts = np.concatenate([la.jordan_stack(b, b), la.lie_stack(b, b)]).reshape(-1, space.dim_h, space.dim_h)
    return float(np.max(space.residuals(parts) / np.maximum(1.0, np.linalg.norm(parts, axis=(-2, -1)))))


def _suite_thm1(rng, n, res: SuiteResult):
    host = sp.random_block_algebra(rng, n).algebra
    seeds = [sp.random_element(rng, host) for _ in range(int(rng.integers(1, 3)))]
    gen = sg.generate(seeds)
    again = sg.generate(gen.basis)
    inside = host.inclusion_residual(gen)
    idem = gen.span_distance(again)
    ok = sg.complexified_closure_check(gen) and idem <= TOL and inside <= TOL
    res.record(ok, max(idem, inside, _closure_defect(gen)), note=f"dim {n}: generated algebra failed closure")
    loose = sp.random_subspace(rng, n, 2)
    defect = _closure_defect(loose)
    res.record(not sg.complexified_closure_check(loose), margin=defect, note=f"dim {n}: random span passed closure")


# --- characters ---------------------------------------------------------------


def _spectrum_gap(value: float, a) -> float:
    return float(np.min(np.abs(la.decompose(a).eigenvalues - value)))


def _suite_thm2(rng, n, res: SuiteResult):
    algebra = sp.random_block_algebra(rng, n).algebra
    chars = st.dispersion_free_states(algebra)
    if not chars:
        algebra = sp.random_commutative_algebra(rng, n)
        chars = st.characters(algebra)
    # the extension to the complexification rests on AB = A o B - i A . B;
    # check it on a generic (noncommuting) pair as well
    r_split = _product_split_residual(la.random_hermitian(rng, n), la.random_hermitian(rng, n))
    for chi in chars[:3]:
        a, b = sp.random_element(rng, algebra), sp.random_element(rng, algebra)
        ca, cb = chi(a), chi(b)
        scale = max(1.0, abs(ca) * abs(cb))
        r_mult = abs(chi(la.jordan(a, b)) - ca * cb) / scale
        r_lie = abs(chi(la.lie(a, b))) / scale
        gap = _spectrum_gap(ca, a)
        worst = max(r_mult, r_lie, r_split, _product_split_residual(a, b))
        ok = worst <= TOL and gap <= 1e-8
        res.record(ok, max(worst, gap), note=f"dim {n}: character residual {worst:.3e}, spectrum gap {gap:.3e}")


def _evaluation_matrix(chars, space: sg.Subspace) -> np.ndarray:
    return np.array([[chi(b) for b in space.basis] for chi in chars]).reshape(len(chars), space.dim)


def _suite_thm3(rng, n, res: SuiteResult):
    algebra = sp.random_block_algebra(rng, n).algebra
    chars = st.dispersion_free_states(algebra)
    values = _evaluation_matrix(chars, algebra)
    unseen = la.null_space(values, 1e-8, scale=1.0) if chars else np.eye(algebra.dim)
    separates = unseen.shape[1] == 0
    commutative = sg.is_commutative(algebra)
    if commutative:
        res.record(separates, note=f"dim {n}: characters of a commutative algebra do not separate it")
        return
    # every dispersion-free state kills every Lie product, yet some Lie product is nonzero
    lies = la.lie_stack(algebra.basis, algebra.basis).reshape(-1, n, n)
    seen = max((abs(chi(m)) for chi in chars for m in lies), default=0.0)
    res.record(
        not separates and seen <= TOL,
        seen,
        margin=float(sg.lie_norms(algebra).max()),
        note=f"dim {n}: noncommutative algebra separated by characters",
    )


# --- ideals and quotients ------------------------------------------------------


def _suite_thm4(rng, n, res: SuiteResult):
    ba = sp.random_block_algebra(rng, n)
    algebra = ba.algebra
    k = len(ba.blocks)
    verdicts = {}
    for r in range(k):
        for which in itertools.combinations(range(k), r):
            ideal = ba.ideal(which)
            if not sg.is_ideal(algebra, ideal):
                res.record(False, note=f"dim {n}: block sum {which} rejected as ideal")
                continue
            q = sg.quotient(algebra, ideal)
            qc = sg.is_quasicommutative(algebra, ideal)
            exact = ba.is_quasicommutative_over(which)
            verdicts[which] = qc
            a, b = sp.random_element(rng, algebra), sp.random_element(rng, algebra)
            hom = q.homomorphism_residual(a, b)
            ok = q.is_commutative() == qc == exact and hom <= TOL
            if ok and qc:
                # condition 2: some dispersion-free state sees each element outside the ideal
                chars = st.quotient_characters(q)
                x = q.hat(sp.random_element(rng, algebra))
                ok = max(abs(chi(x)) for chi in chars) > 1e-8 or np.linalg.norm(x.mat) <= 1e-8
            res.record(ok, hom, note=f"dim {n}: blocks {ba.blocks}, ideal {which}")
    for i, j in itertools.combinations(sorted(verdicts, key=len), 2):
        if set(i) <= set(j) and verdicts[i]:
            res.record(verdicts[j], note=f"dim {n}: quasicommutativity lost from {i} to {j}")
    line = sg.Subspace.span([sp.random_element(rng, algebra)], n)
    if algebra.dim > 1:
        res.record(not sg.is_ideal(algebra, line), note=f"dim {n}: random line accepted as ideal")


# --- states -----------------------------------------------------------------------


def _suite_thm5(rng, n, res: SuiteResult):
    c = sp.random_commutative_algebra(rng, n)
    state = sp.random_state(rng, n)
    mix = st.decompose_state(state, c)
    recon = mix.reconstruction_residual(state, c)
    total = abs(float(mix.weights.sum()) - 1.0)
    ok = recon <= TOL and total <= 1e-10 and bool(bb.has_beable_status(c, state))
    res.record(ok, max(recon, total), note=f"dim {n}: reconstruction {recon:.3e}")


def _suite_thm6(rng, n, res: SuiteResult):
    algebra = sp.random_block_algebra(rng, n).algebra
    state = sp.random_state(rng, n)
    ideal = st.state_ideal(state, algebra)
    worst = 0.0
    if ideal.dim:
        b = ideal.basis
        combo = ideal.combine(rng.normal(size=ideal.dim)).mat
        elems = np.concatenate([b, combo[None]])
        worst = max(abs(st.evaluate(state, m)) + abs(st.evaluate(state, m @ m)) for m in elems)
        inner = np.concatenate([la.jordan_stack(b, b), la.lie_stack(b, b)]).reshape(-1, n, n)
        worst = max(worst, float(np.max(ideal.residuals(inner))))
    excl = ideal.residual(np.eye(n)) / math.sqrt(n)
    verdict = bb.has_beable_status(algebra, state)
    ok = worst <= TOL and excl > 1e-8 and (ideal.is_ideal or not verdict.has_status)
    res.record(ok, worst, margin=excl, note=f"dim {n}: state ideal check failed")


def _structured_instance(rng, n, mode):
    if mode == 0:
        return sp.random_block_algebra(rng, n).algebra, sp.random_state(rng, n)
    if mode == 1:
        pure = sp.random_pure_state(rng, n)
        algebra = st.definite_set(pure, sg.full_algebra(n))
        return algebra, pure if rng.random() < 0.5 else sp.random_state(rng, n)
    algebra = sp.random_block_algebra(rng, n).algebra
    w0 = bb._joint_kernel_of_lies(algebra)
    if w0.shape[1] == 0:
        return algebra, sp.random_state(rng, n)
    g = w0 @ (rng.normal(size=(w0.shape[1], w0.shape[1])) + 1j * rng.normal(size=(w0.shape[1], w0.shape[1])))
    rho = g @ g.conj().T
    return algebra, st.AlgState(rho / np.trace(rho).real)


def _suite_thm7(rng, n, res: SuiteResult):
    algebra, state = _structured_instance(rng, n, int(rng.integers(0, 3)))
    verdict = bb.has_beable_status(algebra, state)
    oracle = sg.is_quasicommutative(algebra, st.state_ideal(state, algebra))
    agree = verdict.has_status == oracle
    if verdict.has_status:
        r = verdict.decomposition.reconstruction_residual(state, algebra)
        res.record(agree and r <= TOL, r, note=f"dim {n}: positive verdict residual {r:.3e}, oracle {oracle}")
    else:
        w = verdict.witness_value
        res.record(agree and w > 1e-16, margin=w, note=f"dim {n}: negative verdict, oracle {oracle}")


def _suite_thm8(rng, n, res: SuiteResult):
    algebra = sp.random_block_algebra(rng, n).algebra
    state = sp.random_pure_state(rng, n) if rng.random() < 0.5 else sp.random_state(rng, n)
    d = st.definite_set(state, algebra)
    ideal = st.state_ideal(state, algebra)
    plus = sg.Subspace.span(list(ideal.basis) + [np.eye(n)], n)
    dist = d.span_distance(plus)
    ok = d.contains(np.eye(n)).is_member and dist <= TOL and st.is_dispersion_free(state, d)
    ok = ok and bb.has_beable_status(d, state).has_status
    if state.vector is not None:
        v = state.vector
        shifted = np.array([(m - np.vdot(v, m @ v).real * np.eye(n)) @ v for m in d.basis])
        r = float(np.max(np.abs(shifted))) if d.dim else 0.0
        dist = max(dist, r)
        ok = ok and r <= TOL
    res.record(ok, dist, note=f"dim {n}: definite set check failed")


def _suite_thm9(rng, n, res: SuiteResult):
    fam = sp.random_family(rng, n)
    target = st.AlgState.from_vector(fam.target)
    members = [st.AlgState.from_vector(x) for x in fam.vectors]
    full = sg.full_algebra(n)
    common = bb.intersect_definite_sets(members, target, full)
    dist = common.span_distance(bb.family_algebra(fam))
    ok = dist <= TOL and bb.has_beable_status(common, target).has_status
    res.record(ok, dist, note=f"dim {n}: intersection of definite sets differs from family algebra")

    # Bub-definite: random degenerate preferred observable
    labels = rng.integers(0, max(1, n - 1), size=n).astype(float)
    u = sp.random_unitary(rng, n)
    r = (u * labels) @ u.conj().T
    v = sp.random_pure_state(rng, n).vector
    fam_b, alg_b = bb.bub_definite(v, r)
    ok = bb.has_beable_status(alg_b, st.AlgState.from_vector(v)).has_status
    res.record(ok, note=f"dim {n}: Bub-definite algebra lacks beable status")
    # eigenstate case
    col = u[:, int(rng.integers(0, n))]
    _, alg_e = bb.bub_definite(col, r)
    dist = alg_e.span_distance(st.definite_set(st.AlgState.from_vector(col), full))
    res.record(dist <= TOL, dist, note=f"dim {n}: eigenstate Bub algebra differs from definite set")
    # nondegenerate with full support
    r_nd = (u * np.arange(n, dtype=float)) @ u.conj().T
    _, alg_nd = bb.bub_definite(v, r_nd)
    res.record(sg.is_commutative(alg_nd), note=f"dim {n}: nondegenerate Bub algebra not commutative")


def _suite_thm10(rng, n, res: SuiteResult, adjoin_trials: int = 20):
    fam = sp.random_family(rng, n)
    algebra = bb.family_algebra(fam)
    target = st.AlgState.from_vector(fam.target)
    cert = bb.maximality_certificate(algebra, target, adjoin_trials, int(rng.integers(0, 2**31)))
    back = bb.recover_family(algebra, fam.target)
    dist = bb.family_algebra(back).span_distance(algebra)
    ok = cert.maximal and back.same_rays(fam) and dist <= TOL
    res.record(ok, dist, note=f"dim {n}: family of size {len(fam)} not maximal or not recovered")
    scal = bb.maximality_certificate(sg.scalar_algebra(n), target, adjoin_trials, int(rng.integers(0, 2**31)))
    res.record(not scal.maximal, note=f"dim {n}: scalars certified maximal")


def _full_state_set(rng, n) -> list[st.AlgState]:
    return [sp.random_pure_state(rng, n) for _ in range(n * n)]


def _suite_thm11(rng, n, res: SuiteResult):
    blocks = sp.random_partition(rng, n)
    if all(k == 1 for k, _ in blocks):
        blocks = [(2, 1)] + [(1, 1)] * (n - 2)
    algebra = sp.random_block_algebra(rng, n, blocks).algebra
    faithful = sp.random_state(rng, n, rank=n)
    verdict = bb.has_beable_status(algebra, faithful)
    res.record(not verdict.has_status, margin=verdict.residual, note=f"dim {n}: faithful state, noncommutative")
    d = st.definite_set(faithful, sg.full_algebra(n))
    res.record(d.same_span(sg.scalar_algebra(n)), note=f"dim {n}: faithful definite set beyond scalars")
    forced = bb.forced_commutativity(algebra, _full_state_set(rng, n))
    res.record(not forced.has_status_for_all and forced.full, note=f"dim {n}: noncommutative algebra beable for full set")
    c = sp.random_commutative_algebra(rng, n)
    forced = bb.forced_commutativity(c, _full_state_set(rng, n))
    res.record(forced.has_status_for_all and forced.commutative, note=f"dim {n}: commutative algebra not beable")


SUITES: dict[str, tuple[str, Callable]] = {
    "pauli": ("worked Pauli identities, exact", _suite_pauli),
    "linalg": ("product identities, spectral decomposition, functional calculus", _suite_linalg),
    "thm1": ("generated algebras are closed under both parts of the product; random spans are not", _suite_thm1),
    "thm2": ("dispersion-free states are multiplicative, kill Lie products, take spectral values", _suite_thm2),
    "thm3": ("characters separate an algebra exactly when it is commutative", _suite_thm3),
    "thm4": ("quotient commutative iff quasicommutative, checked on every block ideal", _suite_thm4),
    "thm5": ("commutative algebras: state is a mixture of characters", _suite_thm5),
    "thm6": ("state null set is annihilated, excludes I, and is an ideal whenever beable", _suite_thm6),
    "thm7": ("beable status iff quasicommutative over the state ideal", _suite_thm7),
    "thm8": ("definite set is a beable algebra equal to state ideal plus scalars", _suite_thm8),
    "thm9": ("intersections of definite sets and Bub-definite algebras are beable", _suite_thm9),
    "thm10": ("eigenvector-family algebras are maximal and recoverable", _suite_thm10),
    "thm11": ("beable for a full set or a faithful state forces commutativity", _suite_thm11),
}


def verify_theorems(
    dims=(2, 3, 4),
    trials: int = 20,
    rng_seed: int = 0,
    max_dim: int = 8,
    adjoin_trials: int = 20,
    suites=None,
) -> TheoremReport:
    """Run the theorem suites for every dimension in ``dims``.

    ``trials`` is per suite and per dimension; the Pauli suite runs once.
    ``adjoin_trials`` sets the random extensions tried per maximality check.
    Library errors raised inside a trial count as failures of that trial.
    """
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 2 for d in dims):
        raise ValidationError("dims must be integers >= 2")
    if max(dims) > max_dim:
        raise ValidationError(f"dimension {max(dims)} exceeds max-dim {max_dim}")
    if trials < 1:
        raise ValidationError("trials must be positive")
    names = list(SUITES) if suites is None else list(suites)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise ValidationError(f"unknown suites: {unknown}")
    results = {}
    for idx, name in enumerate(SUITES):
        if name not in names:
            continue
        claim, fn = SUITES[name]
        res = SuiteResult(name, claim)
        if name == "pauli":
            fn(None, 2, res)
        else:
            for n in dims:
                rng = np.random.default_rng([rng_seed, idx, n])
                for _ in range(trials):
                    try:
                        if name == "thm10":
                            fn(rng, n, res, adjoin_trials)
                        else:
                            fn(rng, n, res)
                    except BeableLabError as exc:
                        res.record(False, note=f"dim {n}: {type(exc).__name__}: {exc}")
        results[name] = res
    return TheoremReport(dims, trials, rng_seed, results)
