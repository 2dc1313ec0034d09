import json

import numpy as np
import pytest

from beable_lab import literals as lit
from beable_lab import sampling as sp
from beable_lab import segalgebra as sg
from beable_lab.errors import ValidationError


def test_matrix_round_trip(rng):
    a = sp.random_state(rng, 3).rho
    back = lit.parse_matrix(json.loads(json.dumps(lit.matrix_literal(a))))
    assert np.array_equal(back.mat, 0.5 * (a + a.conj().T))


def test_plain_numbers_allowed():
    assert np.array_equal(lit.parse_matrix([[1, 0], [0, -1]]).mat, np.diag([1.0, -1.0]))


@pytest.mark.parametrize(
    "bad",
    [
        [],
        [[1, 0]],
        [[[1, 0], [0, 0]], [[0, 0]]],
        [[["a", 0], [0, 0]], [[0, 0], [1, 0]]],
        [[[1, 0, 0], [0, 0]], [[0, 0], [1, 0]]],
        [[True, 0], [0, 1]],
    ],
)
def test_malformed_matrix(bad):
    with pytest.raises(ValidationError):
        lit.parse_matrix(bad)


def test_non_hermitian_literal():
    with pytest.raises(ValidationError):
        lit.parse_matrix([[[0, 0], [1, 0]], [[0, 0], [0, 0]]])


def test_dimension_check():
    with pytest.raises(ValidationError, match="dimension mismatch"):
        lit.parse_matrix([[1, 0], [0, 1]], dim_h=3)


def test_state_literals():
    s = lit.parse_state({"kind": "vector", "v": [[3, 0], [0, 4]]})
    assert s.vector == pytest.approx(np.array([0.6, 0.8j]))
    rt = lit.parse_state(lit.state_literal(s))
    assert np.allclose(rt.rho, s.rho)
    d = lit.parse_state({"kind": "density", "rho": [[0.5, 0], [0, 0.5]]})
    assert d.is_faithful
    with pytest.raises(ValidationError):
        lit.parse_state({"kind": "vector", "v": [[0, 0], [0, 0]]})
    with pytest.raises(ValidationError):
        lit.parse_state({"kind": "bogus"})
    with pytest.raises(ValidationError):
        lit.parse_state({"kind": "vector", "v": [1, 0]}, dim_h=3)


def test_negative_zero_normalised():
    out = lit.vector_literal(np.array([-0.0 + 0j]))
    assert json.dumps(out) == "[[0.0, 0.0]]"


def test_algebra_round_trip(paulis):
    alg = sg.generate([paulis[0], paulis[2]])
    back = lit.algebra_from_dict(json.loads(json.dumps(lit.algebra_to_dict(alg))))
    assert back.same_span(alg)
    assert np.allclose(back.coords, alg.coords)


def test_algebra_loader_revalidates(paulis):
    data = lit.algebra_to_dict(sg.Subspace.span([np.eye(2), paulis[0], paulis[1]], 2))
    with pytest.raises(ValidationError):
        lit.algebra_from_dict(data)
    with pytest.raises(ValidationError):
        lit.algebra_from_dict({"dim_h": 2, "basis": []})
