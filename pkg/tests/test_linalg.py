import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from beable_lab import linalg as la
from beable_lab.config import tolerances
from beable_lab.errors import NumericalError, ValidationError


def herm_strategy(n):
    entries = hst.floats(-3, 3, allow_nan=False, allow_infinity=False)
    return hst.lists(entries, min_size=2 * n * n, max_size=2 * n * n).map(
        lambda xs: _herm_from(np.array(xs).reshape(2, n, n))
    )


def _herm_from(parts):
    g = parts[0] + 1j * parts[1]
    return 0.5 * (g + g.conj().T)


class TestHermitianOp:
    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError):
            la.HermitianOp(np.array([[0, 1], [0, 0]]))

    def test_rejects_non_square(self):
        with pytest.raises(ValidationError):
            la.HermitianOp(np.zeros((2, 3)))

    def test_symmetrises_within_tolerance(self):
        m = np.array([[1, 1 + 1e-12], [1, 2]])
        op = la.HermitianOp(m)
        assert np.array_equal(op.mat, op.mat.conj().T)

    def test_storage_is_read_only(self):
        op = la.identity(2)
        with pytest.raises(ValueError):
            op.mat[0, 0] = 5

    def test_arithmetic(self, paulis):
        x, y, _ = paulis
        s = x + y * 2.0 - x
        assert s.close_to(2.0 * y.mat)
        assert (-x).close_to(-x.mat)
        with pytest.raises(TypeError):
            x * 1j


class TestProducts:
    def test_pauli_jordan(self, paulis):
        x, y, _ = paulis
        assert np.allclose(la.jordan(x, y).mat, 0, atol=1e-15)
        assert np.allclose(la.jordan(x, x).mat, np.eye(2))

    def test_pauli_lie(self, paulis):
        x, y, z = paulis
        assert np.allclose(la.lie(x, y).mat, -z.mat)
        assert np.allclose(la.lie(x, la.lie(x, y)).mat, -y.mat)

    def test_jordan_identity_unit(self, rng):
        a = la.random_hermitian(rng, 4)
        assert la.jordan(a, la.identity(4)).close_to(a)

    def test_lie_self_vanishes(self, rng):
        a = la.random_hermitian(rng, 5)
        assert np.abs(la.lie(a, a).mat).max() == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            la.jordan(la.identity(2), la.identity(3))
        with pytest.raises(ValidationError):
            la.lie(la.identity(2), la.identity(3))

    def test_re_im_product_reassembles(self, rng):
        a, b = la.random_hermitian(rng, 3), la.random_hermitian(rng, 3)
        re, im = la.re_im_product(a, b)
        assert np.allclose(re.mat + 1j * im.mat, a.mat @ b.mat, atol=1e-13)

    @settings(max_examples=50, deadline=None)
    @given(herm_strategy(3), herm_strategy(3))
    def test_polarisation(self, a, b):
        expected = 0.25 * ((a + b) @ (a + b) - (a - b) @ (a - b))
        scale = max(1.0, np.linalg.norm(a) * np.linalg.norm(b))
        assert np.linalg.norm(la.jordan(a, b).mat - expected) <= 1e-9 * scale

    @settings(max_examples=50, deadline=None)
    @given(herm_strategy(3), herm_strategy(3))
    def test_product_split(self, a, b):
        ab = a @ b
        split = la.jordan(a, b).mat - 1j * la.lie(a, b).mat
        assert np.linalg.norm(ab - split) <= 1e-12 * max(1.0, np.linalg.norm(ab))

    def test_stacks_match_pairwise(self, rng):
        mats = np.stack([la.random_hermitian(rng, 3).mat for _ in range(3)])
        j = la.jordan_stack(mats, mats)
        l = la.lie_stack(mats, mats)
        for p in range(3):
            for q in range(3):
                assert np.allclose(j[p, q], la.jordan(mats[p], mats[q]).mat)
                assert np.allclose(l[p, q], la.lie(mats[p], mats[q]).mat)


class TestDecompose:
    def test_sigma_z(self, paulis):
        dec = la.decompose(paulis[2])
        assert np.allclose(dec.eigenvalues, [-1, 1])

    def test_identity(self):
        assert np.allclose(la.decompose(la.identity(4)).eigenvalues, 1)

    def test_sigma_x_closed_form(self, paulis):
        dec = la.decompose(paulis[0])
        assert np.allclose(dec.eigenvalues, [-1, 1])
        s = 1 / math.sqrt(2)
        minus, plus = np.array([s, -s]), np.array([s, s])
        assert abs(abs(np.vdot(minus, dec.eigenvectors[:, 0])) - 1) < 1e-12
        assert abs(abs(np.vdot(plus, dec.eigenvectors[:, 1])) - 1) < 1e-12

    def test_invariants(self, rng):
        for n in range(1, 7):
            a = la.random_hermitian(rng, n)
            dec = la.decompose(a)
            u = dec.eigenvectors
            assert np.all(np.diff(dec.eigenvalues) >= 0)
            assert np.linalg.norm((u * dec.eigenvalues) @ u.conj().T - a.mat) <= 1e-9 * np.linalg.norm(a.mat)
            assert np.linalg.norm(u.conj().T @ u - np.eye(n)) <= 1e-9

    def test_clusters_and_projectors(self):
        dec = la.decompose(np.diag([2.0, 0.0, 2.0, -1.0]))
        values = [v for v, _ in dec.clusters()]
        assert values == [-1.0, 0.0, 2.0]
        total = sum(p for _, p in dec.projectors())
        assert np.allclose(total, np.eye(4))

    def test_norm_is_largest_magnitude(self):
        assert la.op_norm(np.diag([-3.0, 1.0, 2.0])) == pytest.approx(3.0)

    def test_eigensolver_failure_is_numerical(self):
        bad = np.full((2, 2), np.nan)
        with pytest.raises((NumericalError, ValidationError)):
            la.decompose(bad)

    def test_deterministic_phases(self, rng):
        a = la.random_hermitian(rng, 4)
        u1 = la.decompose(a).eigenvectors
        u2 = la.decompose(la.HermitianOp(a.mat.copy())).eigenvectors
        assert np.array_equal(u1, u2)
        for k in range(4):
            col = u1[:, k]
            lead = col[np.nonzero(np.abs(col) > 1e-12)[0][0]]
            assert abs(lead.imag) < 1e-15 and lead.real > 0


class TestFunctionalCalculus:
    def test_exp_of_sigma_z(self, paulis):
        out = la.op_function(paulis[2], math.exp)
        assert np.allclose(out.mat, np.diag([math.e, 1 / math.e]))

    def test_polynomial_matches(self, rng):
        a = la.random_hermitian(rng, 4).mat
        out = la.op_function(a, lambda t: 2 * t**2 - t + 3).mat
        assert np.linalg.norm(out - (2 * a @ a - a + 3 * np.eye(4))) <= 1e-9 * np.linalg.norm(a) ** 2

    def test_sqrt_of_negative_spectrum(self, paulis):
        with pytest.raises(ValidationError):
            la.op_function(paulis[2], math.sqrt)

    def test_numpy_sqrt_of_negative_spectrum(self, paulis):
        with pytest.raises(ValidationError):
            la.op_function(paulis[2], np.sqrt)

    def test_sqrt_of_psd(self, rng):
        g = la.random_hermitian(rng, 3).mat
        p = g @ g
        r = la.op_function(p, lambda t: math.sqrt(max(t, 0.0))).mat
        assert np.allclose(r @ r, p, atol=1e-10)


class TestCoordinates:
    def test_round_trip_and_inner_product(self, rng):
        a, b = la.random_hermitian(rng, 4).mat, la.random_hermitian(rng, 4).mat
        ca, cb = la.to_coords(a), la.to_coords(b)
        assert np.allclose(la.from_coords(ca, 4), a)
        assert ca @ cb == pytest.approx(np.trace(a @ b).real)

    def test_unit_coordinates_are_orthonormal_hermitian(self):
        basis = la.from_coords(np.eye(9), 3)
        gram = np.einsum("aij,bji->ab", basis, basis).real
        assert np.allclose(gram, np.eye(9))
        assert np.allclose(basis, basis.conj().transpose(0, 2, 1))


class TestJointEigenspaces:
    def test_commuting_family(self, rng):
        u = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
        a = (u * np.array([1.0, 1.0, 2.0, 2.0])) @ u.conj().T
        b = (u * np.array([0.0, 5.0, 5.0, 5.0])) @ u.conj().T
        blocks = la.joint_eigenspaces([a, b])
        assert sorted(blk.shape[1] for blk in blocks) == [1, 1, 2]
        for blk in blocks:
            for m in (a, b):
                h = blk.conj().T @ m @ blk
                assert np.allclose(h, h[0, 0] * np.eye(blk.shape[1]))

    def test_zero_member_does_not_split(self, rng):
        # a member that vanishes up to rounding must not split a block
        noise = 1e-17 * la.random_hermitian(rng, 2).mat
        blocks = la.joint_eigenspaces([np.eye(2), noise])
        assert len(blocks) == 1
