import json

import pytest

from beable_lab import linalg
from beable_lab import theorems as th
from beable_lab.errors import ValidationError


def test_smoke_single_trial():
    rep = th.verify_theorems([2], 1, rng_seed=0)
    assert rep.all_passed
    assert set(rep.suites) == set(th.SUITES)
    assert rep.suites["pauli"].total == 7


def test_deterministic_payload():
    a = th.verify_theorems([2, 3], 3, rng_seed=11).to_dict()
    b = th.verify_theorems([2, 3], 3, rng_seed=11).to_dict()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_seed_matters():
    a = th.verify_theorems([3], 2, rng_seed=1, suites=["thm7"]).to_dict()
    b = th.verify_theorems([3], 2, rng_seed=2, suites=["thm7"]).to_dict()
    assert a != b


def test_suite_subset():
    rep = th.verify_theorems([2], 2, suites=["thm5", "pauli"])
    assert list(rep.suites) == ["pauli", "thm5"]


def test_flipped_lie_sign_breaks_character_suite(monkeypatch):
    real = linalg.lie
    monkeypatch.setattr(linalg, "lie", lambda a, b: -real(a, b))
    rep = th.verify_theorems([2, 3], 5, rng_seed=0)
    assert not rep.suites["thm2"].ok
    assert not rep.all_passed


def test_errors_inside_trials_are_failures(monkeypatch):
    from beable_lab import states
    from beable_lab.errors import NumericalError

    def broken(*a, **k):
        raise NumericalError("injected")

    monkeypatch.setattr(states, "decompose_state", broken)
    rep = th.verify_theorems([2], 2, suites=["thm5"])
    assert rep.suites["thm5"].passed == 0
    assert "injected" in rep.suites["thm5"].failures[0]


@pytest.mark.parametrize("kw", [dict(dims=[1]), dict(dims=[9]), dict(dims=[]), dict(trials=0), dict(suites=["x"])])
def test_argument_validation(kw):
    args = dict(dims=[2], trials=1)
    args.update(kw)
    with pytest.raises(ValidationError):
        th.verify_theorems(**args)


def test_pauli_residuals_exact():
    assert max(th.pauli_residuals().values()) == 0.0
