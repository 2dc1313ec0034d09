import json

import numpy as np
import pytest

from beable_lab import cli, scenarios, spin
from beable_lab.errors import NumericalError, PreconditionError, ValidationError
from beable_lab.literals import matrix_literal, vector_literal

CORPUS = ["bub-eigenstate", "diagonal-bohm", "faithful", "maximal-family", "pauli", "singlet"]


def write(tmp_path, data, name="s.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return str(p)


def test_corpus_complete():
    assert scenarios.corpus_names() == CORPUS


@pytest.mark.parametrize("name", CORPUS)
def test_corpus_runs(name):
    report = scenarios.run_scenario(scenarios.load_corpus(name))
    assert report["schema"] == "beable-report/1"
    assert report["residuals"]
    json.loads(scenarios.report_json(report))  # strict JSON, no NaN/inf surprises


def test_pauli_corpus():
    r = scenarios.run_scenario(scenarios.load_corpus("pauli"))["results"]
    assert r["algebra_dim"] == 4 and r["closure_check"]


def test_faithful_corpus():
    r = scenarios.run_scenario(scenarios.load_corpus("faithful"))["results"]
    assert r["has_status"] is False and "witness" in r and r["state_faithful"]


def test_bohm_corpus_born_weights():
    s = scenarios.load_corpus("diagonal-bohm")
    r = scenarios.run_scenario(s)["results"]
    v = s.state.vector
    born = sorted(np.abs(v) ** 2)
    assert sorted(c["weight"] for c in r["decomposition"]) == pytest.approx(born, abs=1e-12)


def test_bub_eigenstate_corpus():
    r = scenarios.run_scenario(scenarios.load_corpus("bub-eigenstate"))["results"]
    assert r["coincides_with_definite_set"] and r["has_status"]


def test_maximal_family_corpus():
    r = scenarios.run_scenario(scenarios.load_corpus("maximal-family"))["results"]
    assert r["algebra_dim"] == 3 and r["maximal"] and r["round_trip"]


def test_singlet_corpus_validates_spin_and_state():
    s = scenarios.load_corpus("singlet")
    assert abs(np.linalg.norm(s.state.vector) - 1) < 1e-12
    raw = json.loads(json.dumps(s.raw))
    raw["spin1"]["Sy"] = raw["spin1"]["Sx"]
    with pytest.raises(ValidationError, match="commutation|Sx, Sy"):
        scenarios.parse_scenario(raw)
    raw = json.loads(json.dumps(s.raw))
    raw["state"]["v"][2], raw["state"]["v"][4] = raw["state"]["v"][4], raw["state"]["v"][2]
    raw["state"]["v"][4] = [-x for x in raw["state"]["v"][4]]
    with pytest.raises(ValidationError, match="singlet"):
        scenarios.parse_scenario(raw)


def test_boolean_claims_carry_residuals():
    for name in CORPUS:
        rep = scenarios.run_scenario(scenarios.load_corpus(name))
        res, resid = rep["results"], rep["residuals"]
        if "has_status" in res:
            assert "lie_annihilation" in resid
        if "is_commutative" in res:
            assert "commutativity" in resid
        if "closure_check" in res:
            assert "closure" in resid
        if "round_trip" in res:
            assert "round_trip" in resid


def test_determinism():
    a = scenarios.run_scenario(scenarios.load_corpus("maximal-family"), seed=3)
    b = scenarios.run_scenario(scenarios.load_corpus("maximal-family"), seed=3)
    assert scenarios.payload(a) == scenarios.payload(b)
    assert "timings" in a and "timings" not in json.loads(scenarios.payload(a))


def test_tol_override_recorded():
    rep = scenarios.run_scenario(scenarios.load_corpus("pauli"), tol=1e-7)
    assert rep["tolerances"]["sub_tol"] == 1e-7 and rep["tolerances"]["herm_tol"] == 1e-7


def test_scenario_tol_overrides():
    data = json.loads(json.dumps(scenarios.load_corpus("pauli").raw))
    data["tol_overrides"] = {"accept_tol": 1e-7}
    assert scenarios.run_scenario(data)["tolerances"]["accept_tol"] == 1e-7
    data["tol_overrides"] = {"nonsense": 1.0}
    with pytest.raises(ValidationError):
        scenarios.parse_scenario(data)


@pytest.mark.parametrize(
    "data, match",
    [
        ({"command": "nope"}, "command"),
        ({"dim_h": 2, "command": "generate", "operators": {"a": [[1, 0], [0, 1], [0, 0]]}}, "operator 'a'"),
        ({"dim_h": 2, "command": "generate", "params": {"seeds": ["missing"]}}, "unknown operator"),
        ({"dim_h": 2, "command": "check-beable", "params": {"algebra": "full"}}, "needs a state"),
        (
            {"dim_h": 2, "command": "bub-definite", "operators": {"R": [[1, 0], [0, 2]]},
             "state": {"kind": "density", "rho": [[0.5, 0], [0, 0.5]]}, "params": {"preferred": "R"}},
            "vector",
        ),
        ({"dim_h": 2, "command": "bub-definite", "state": {"kind": "vector", "v": [1, 0]}}, "preferred"),
        ({"dim_h": 2, "command": "decompose", "state": {"kind": "vector", "v": [1, 0]}, "params": {}}, "algebra"),
        ({"dim_h": 0, "command": "generate"}, "dim_h"),
    ],
)
def test_validation_errors(data, match):
    with pytest.raises(ValidationError, match=match):
        scenarios.run_scenario(data)


def test_unknown_algebra_spec():
    data = {"dim_h": 2, "command": "check-beable", "state": {"kind": "vector", "v": [1, 0]},
            "params": {"algebra": "weird"}}
    with pytest.raises(ValidationError, match="algebra"):
        scenarios.run_scenario(data)


def test_decompose_noncommutative_is_precondition():
    data = {"dim_h": 2, "command": "decompose", "state": {"kind": "vector", "v": [1, 0]},
            "params": {"algebra": "full"}}
    with pytest.raises(PreconditionError):
        scenarios.run_scenario(data)


def test_maximal_command_reports_extension():
    data = {"dim_h": 3, "command": "maximal", "state": {"kind": "vector", "v": [1, 1, 0]},
            "params": {"algebra": "scalar", "trials": 10}}
    r = scenarios.run_scenario(data)["results"]
    assert r["maximal"] is False and r["extension"]["extended_dim"] > 1


def test_generate_span_and_basis_output():
    x = matrix_literal(np.array([[0, 1], [1, 0]]))
    data = {"dim_h": 2, "command": "generate", "operators": {"x": x}, "params": {"seeds": ["x"], "include_basis": True}}
    r = scenarios.run_scenario(data)["results"]
    assert r["algebra_dim"] == 2 and len(r["algebra"]["basis"]) == 2


# --- CLI --------------------------------------------------------------------


def test_cli_corpus(capsys):
    assert cli.main(["--corpus", "pauli", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["results"]["algebra_dim"] == 4


def test_cli_human_summary(capsys):
    assert cli.main(["--corpus", "faithful"]) == 0
    out = capsys.readouterr().out
    assert "has_status: False" in out and "residuals:" in out


def test_cli_list(capsys):
    assert cli.main(["--corpus", "list"]) == 0
    assert capsys.readouterr().out.split() == CORPUS


def test_cli_scenario_file_and_command(tmp_path, capsys):
    path = write(tmp_path, scenarios.load_corpus("pauli").raw)
    assert cli.main([path]) == 0
    assert cli.main(["generate", path]) == 0
    assert cli.main(["decompose", path]) == 2
    assert "runs 'generate'" in capsys.readouterr().err


def test_cli_malformed_json(tmp_path, capsys):
    path = write(tmp_path, '{"dim_h": 2,\n  "command": }')
    assert cli.main([path]) == 2
    err = capsys.readouterr().err
    assert "line 2" in err and "column" in err


def test_cli_missing_file(capsys):
    assert cli.main(["/nonexistent/x.json"]) == 2


def test_cli_dimension_mismatch(tmp_path, capsys):
    data = {"dim_h": 3, "command": "generate", "operators": {"a": [[1, 0], [0, 1]]}}
    assert cli.main([write(tmp_path, data)]) == 2
    assert "dimension mismatch" in capsys.readouterr().err


def test_cli_precondition_names_contract(tmp_path, capsys):
    data = {"dim_h": 2, "command": "maximal", "state": {"kind": "density", "rho": [[0.5, 0], [0, 0.5]]},
            "params": {"algebra": "full"}}
    assert cli.main([write(tmp_path, data), "--json"]) == 2
    out = json.loads(capsys.readouterr().out)
    assert out["error"]["contract"] == "beable-status"


def test_cli_numerical_failure(monkeypatch, capsys):
    def boom(*a, **k):
        raise NumericalError("eigensolver did not converge")

    monkeypatch.setattr(scenarios, "run_scenario", boom)
    assert cli.main(["--corpus", "pauli"]) == 3
    assert "numerical" in capsys.readouterr().err


def test_cli_verify_theorems(capsys):
    assert cli.main(["verify-theorems", "--dims", "2", "--trials", "1", "--seed", "0", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["results"]["all_passed"] and out["seed"] == 0


def test_cli_verify_theorems_failure_exit(monkeypatch, capsys):
    from beable_lab import linalg

    real = linalg.lie
    monkeypatch.setattr(linalg, "lie", lambda a, b: -real(a, b))
    assert cli.main(["verify-theorems", "--dims", "2", "--trials", "2"]) == 4
    assert "FAIL" in capsys.readouterr().out


def test_cli_max_dim(capsys):
    assert cli.main(["verify-theorems", "--dims", "9", "--trials", "1"]) == 2
    assert cli.main(["verify-theorems", "--dims", "3", "--trials", "1", "--max-dim", "2"]) == 2


def test_cli_out_file(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert cli.main(["--corpus", "pauli", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["command"] == "generate"


def test_cli_requires_scenario(capsys):
    assert cli.main(["generate"]) == 2
    assert cli.main([]) == 2


def test_family_scenario_from_file(tmp_path):
    s = 2 ** -0.5
    data = {"dim_h": 2, "command": "family", "state": {"kind": "vector", "v": vector_literal([s, s])},
            "params": {"vectors": [vector_literal([1, 0]), vector_literal([0, 1])], "trials": 20}}
    rep = scenarios.run_scenario(write(tmp_path, data))
    assert rep["results"]["maximal"] and rep["results"]["algebra_dim"] == 2


def test_spin_helpers():
    sx, sy, sz = spin.spin1_matrices()
    assert spin.commutation_residual(sx, sy, sz) < 1e-15
    v = spin.singlet_vector()
    assert abs(np.linalg.norm(v) - 1) < 1e-12
    assert spin.total_spin_residual(v) < 1e-12
    # explicit form: (|+1,-1> - |0,0> + |-1,+1>) / sqrt3
    expected = np.zeros(9)
    expected[[2, 4, 6]] = np.array([1, -1, 1]) / np.sqrt(3)
    assert np.allclose(v, expected, atol=1e-12)
    with pytest.raises(ValidationError):
        spin.check_spin_triple(sx, sx, sz)
