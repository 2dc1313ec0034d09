"""Scenario files and reports.

A scenario is a JSON object::

    {
      "dim_h": 2,
      "command": "generate",
      "operators": {"sx": <matrix>, "sy": <matrix>},
      "state": <state literal>,            # most commands
      "params": {"seeds": ["sx", "sy"]},
      "tol_overrides": {"sub_tol": 1e-9},  # optional
      "spin1": {"Sx": ..., "Sy": ..., "Sz": ...}   # optional, see below
    }

When ``spin1`` is present the three 3x3 matrices are checked against the
spin commutation relations, and a vector state on ``C^9`` must equal the
spin-1 singlet built from them.

Algebra specifications (``params.algebra``) are ``"full"``, ``"diagonal"``,
``"scalar"``, ``"definite-set"`` (of the scenario state), or an object
``{"generate": [names]}`` / ``{"span": [names]}``.
"""
from __future__ import annotations

import copy
import dataclasses
import json
import time
from importlib import resources
from typing import Any

import numpy as np

from . import beables as bb
from . import linalg as la
from . import segalgebra as sg
from . import spin
from . import states as st
from .config import Tolerances, get_tolerances, tolerances
from .errors import PreconditionError, ValidationError
from .literals import algebra_to_dict, matrix_literal, parse_matrix, parse_state, parse_vector, vector_literal
from .theorems import verify_theorems

__all__ = [
    "SCHEMA",
    "COMMANDS",
    "Scenario",
    "parse_scenario",
    "load_scenario",
    "corpus_names",
    "load_corpus",
    "run_scenario",
    "report_json",
    "payload",
]

SCHEMA = "beable-report/1"
COMMANDS = ("generate", "check-beable", "bub-definite", "family", "maximal", "decompose", "verify-theorems")
_NEEDS_STATE = {"check-beable", "bub-definite", "maximal", "decompose"}
_TOL_FIELDS = {f.name for f in dataclasses.fields(Tolerances)}


@dataclasses.dataclass(frozen=True, eq=False)
class Scenario:
    raw: dict
    dim_h: int
    command: str
    operators: dict[str, la.HermitianOp]
    state: st.AlgState | None
    params: dict
    tol_overrides: dict

    def operator(self, name) -> la.HermitianOp:
        if not isinstance(name, str) or name not in self.operators:
            raise ValidationError(f"unknown operator {name!r}; defined: {sorted(self.operators)}")
        return self.operators[name]


def _require(cond, msg):
    if not cond:
        raise ValidationError(msg)


def _check_spin1(block, state, dim_h):
    _require(isinstance(block, dict) and {"Sx", "Sy", "Sz"} <= set(block), 'spin1 needs "Sx", "Sy", "Sz"')
    ops = [parse_matrix(block[k], 3).mat for k in ("Sx", "Sy", "Sz")]
    spin.check_spin_triple(*ops)
    if state is None or state.vector is None:
        return
    _require(dim_h == 9, "spin-1 singlet lives on C^9")
    expected = spin.singlet_vector(*ops)
    err = float(np.max(np.abs(state.vector - expected)))
    _require(err <= 1e-12, f"state vector differs from the spin-1 singlet (max error {err:.3e})")


def parse_scenario(data: Any) -> Scenario:
    """Validate a decoded scenario object."""
    _require(isinstance(data, dict), "scenario must be a JSON object")
    command = data.get("command")
    _require(command in COMMANDS, f"command must be one of {list(COMMANDS)}, got {command!r}")
    params = data.get("params", {})
    _require(isinstance(params, dict), "params must be an object")
    tol = data.get("tol_overrides", {})
    _require(isinstance(tol, dict), "tol_overrides must be an object")
    bad = sorted(set(tol) - _TOL_FIELDS)
    _require(not bad, f"unknown tolerance names {bad}")
    _require(all(isinstance(v, (int, float)) and v > 0 for v in tol.values()), "tolerances must be positive numbers")
    if command == "verify-theorems":
        return Scenario(data, int(data.get("dim_h", 0) or 0), command, {}, None, params, tol)
    dim_h = data.get("dim_h")
    _require(isinstance(dim_h, int) and not isinstance(dim_h, bool) and dim_h >= 1, "dim_h must be a positive integer")
    with tolerances(**tol):
        ops_raw = data.get("operators", {})
        _require(isinstance(ops_raw, dict), "operators must be an object")
        ops = {}
        for name, lit in ops_raw.items():
            try:
                ops[name] = parse_matrix(lit, dim_h)
            except ValidationError as exc:
                raise ValidationError(f"operator {name!r}: {exc}") from None
        state = None
        if "state" in data:
            state = parse_state(data["state"], dim_h)
        elif command in _NEEDS_STATE:
            raise ValidationError(f"command {command!r} needs a state")
        if "spin1" in data:
            _check_spin1(data["spin1"], state, dim_h)
    scen = Scenario(data, dim_h, command, ops, state, params, tol)
    _check_params(scen)
    return scen


def _check_params(s: Scenario) -> None:
    p = s.params
    if s.command == "generate":
        _require(isinstance(p.get("seeds", []), list), "generate: seeds must be a list of operator names")
        for name in p.get("seeds", []):
            s.operator(name)
    elif s.command == "bub-definite":
        _require("preferred" in p, 'bub-definite needs params.preferred naming an operator')
        s.operator(p["preferred"])
        _require(s.state.vector is not None, 'bub-definite needs a "vector" state')
    elif s.command == "family":
        _require(isinstance(p.get("vectors"), list) and p["vectors"], "family needs params.vectors")
        _require(s.state is not None and s.state.vector is not None, 'family needs a "vector" target state')
    elif s.command in ("check-beable", "maximal", "decompose"):
        _require("algebra" in p, f"{s.command} needs params.algebra")


def _decode(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{source}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def load_scenario(path) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    return parse_scenario(_decode(text, str(path)))


def corpus_names() -> list[str]:
    root = resources.files("beable_lab") / "corpus"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_corpus(name: str) -> Scenario:
    name = name[:-5] if name.endswith(".json") else name
    if name not in corpus_names():
        raise ValidationError(f"unknown corpus scenario {name!r}; available: {corpus_names()}")
    text = (resources.files("beable_lab") / "corpus" / f"{name}.json").read_text(encoding="utf-8")
    return parse_scenario(_decode(text, f"corpus/{name}.json"))


# --- commands ---------------------------------------------------------------


def _algebra(s: Scenario, spec) -> sg.Segalgebra:
    n = s.dim_h
    if spec == "full":
        return sg.full_algebra(n)
    if spec == "diagonal":
        return sg.diagonal_algebra(n)
    if spec == "scalar":
        return sg.scalar_algebra(n)
    if spec == "definite-set":
        _require(s.state is not None, "definite-set algebra needs a state")
        return st.definite_set(s.state, sg.full_algebra(n))
    if isinstance(spec, dict) and len(spec) == 1:
        (kind, names), = spec.items()
        _require(isinstance(names, list), f"algebra {kind!r} needs a list of operator names")
        ops = [s.operator(x).mat for x in names]
        if kind == "generate":
            return sg.generate(ops, dim_h=n)
        if kind == "span":
            _require(ops, "span needs at least one operator")
            return sg.Segalgebra.from_subspace(sg.Subspace.span(ops, n))
    raise ValidationError(f"unrecognised algebra specification {spec!r}")


def _commutativity_residual(a: sg.Subspace) -> float:
    norms = sg.lie_norms(a)
    return float(norms.max()) if norms.size else 0.0


def _run_generate(s: Scenario, seed: int):
    alg = sg.generate([s.operator(x).mat for x in s.params.get("seeds", [])], dim_h=s.dim_h)
    results = {
        "algebra_dim": alg.dim,
        "is_commutative": sg.is_commutative(alg),
        "closure_check": sg.complexified_closure_check(alg),
    }
    if s.params.get("include_basis", False):
        results["algebra"] = algebra_to_dict(alg)
    b = alg.basis
    parts = np.concatenate([la.jordan_stack(b, b), -la.lie_stack(b, b)]).reshape(-1, s.dim_h, s.dim_h)
    residuals = {"commutativity": _commutativity_residual(alg), "closure": float(np.max(alg.residuals(parts)))}
    return results, residuals


def _beable_payload(alg, state):
    verdict = bb.has_beable_status(alg, state)
    results = {"algebra_dim": alg.dim, "is_commutative": sg.is_commutative(alg), **verdict.to_dict()}
    residuals = {"lie_annihilation": verdict.residual, "commutativity": _commutativity_residual(alg)}
    if verdict.has_status:
        residuals["reconstruction"] = verdict.reconstruction_residual
    else:
        residuals["witness_value"] = verdict.witness_value
    return verdict, results, residuals


def _run_check_beable(s: Scenario, seed: int):
    alg = _algebra(s, s.params["algebra"])
    _, results, residuals = _beable_payload(alg, s.state)
    results["state_faithful"] = s.state.is_faithful
    return results, residuals


def _run_bub(s: Scenario, seed: int):
    v = s.state.vector
    fam, alg = bb.bub_definite(v, s.operator(s.params["preferred"]))
    verdict, results, residuals = _beable_payload(alg, s.state)
    results["family"] = fam.to_dict()
    dset = st.definite_set(s.state, sg.full_algebra(s.dim_h))
    dist = alg.span_distance(dset)
    results["coincides_with_definite_set"] = dist <= get_tolerances().sub_tol
    residuals["definite_set_distance"] = dist
    residuals["family_orthonormality"] = float(np.max(np.abs(fam.vectors.conj() @ fam.vectors.T - np.eye(len(fam)))))
    residuals["state_norm"] = abs(float(np.linalg.norm(v)) - 1.0)
    # statistics of the preferred observable's eigenspaces under the mixture
    if verdict.has_status:
        probs = []
        for x in fam.vectors:
            p = np.outer(x, x.conj())
            probs.append(abs(verdict.decomposition.expectation(p) - st.evaluate(s.state, p)))
        residuals["family_statistics"] = float(max(probs))
    return results, residuals


def _run_family(s: Scenario, seed: int):
    vecs = np.array([parse_vector(x) for x in s.params["vectors"]])
    _require(vecs.shape[1] == s.dim_h, f"family vectors must have length {s.dim_h}")
    fam = bb.EigenFamily(vecs, s.state.vector)
    alg = bb.family_algebra(fam)
    verdict, results, residuals = _beable_payload(alg, s.state)
    results["family"] = fam.to_dict()
    trials = int(s.params.get("trials", 200))
    cert = bb.maximality_certificate(alg, s.state, trials, seed)
    results["maximal"] = cert.maximal
    results["maximality_trials"] = cert.trials_run
    back = bb.recover_family(alg, s.state.vector)
    dist = bb.family_algebra(back).span_distance(alg)
    results["recovered_family"] = back.to_dict()
    results["round_trip"] = dist <= get_tolerances().sub_tol and back.same_rays(fam)
    residuals["round_trip"] = dist
    return results, residuals


def _run_maximal(s: Scenario, seed: int):
    alg = _algebra(s, s.params["algebra"])
    trials = int(s.params.get("trials", 200))
    verdict, results, residuals = _beable_payload(alg, s.state)
    if not verdict.has_status:
        raise PreconditionError("beable-status", "algebra does not have beable status for the state")
    cert = bb.maximality_certificate(alg, s.state, trials, seed)
    results.update(maximal=cert.maximal, maximality_trials=cert.trials_run)
    if not cert.maximal:
        results["extension"] = {
            "operator": matrix_literal(cert.extension),
            "sampler": cert.sampler,
            "extended_dim": cert.extended_dim,
        }
    return results, residuals


def _run_decompose(s: Scenario, seed: int):
    alg = _algebra(s, s.params["algebra"])
    mix = st.decompose_state(s.state, alg)
    results = {
        "algebra_dim": alg.dim,
        "decomposition": mix.to_dict(),
        "dropped_mass": mix.dropped_mass,
        "n_characters": len(mix.components),
    }
    residuals = {
        "reconstruction": mix.reconstruction_residual(s.state, alg),
        "weight_sum": abs(float(mix.weights.sum()) - 1.0),
        "commutativity": _commutativity_residual(alg),
    }
    return results, residuals


def _run_verify(s: Scenario, seed: int, max_dim: int = 8):
    p = s.params
    report = verify_theorems(
        dims=p.get("dims", [2, 3, 4]),
        trials=int(p.get("trials", 20)),
        rng_seed=seed,
        max_dim=max_dim,
        adjoin_trials=int(p.get("adjoin_trials", 20)),
        suites=p.get("suites"),
    )
    out = report.to_dict()
    residuals = {name: suite["worst_residual"] for name, suite in out["suites"].items()}
    return out, residuals


_RUNNERS = {
    "generate": _run_generate,
    "check-beable": _run_check_beable,
    "bub-definite": _run_bub,
    "family": _run_family,
    "maximal": _run_maximal,
    "decompose": _run_decompose,
}


def run_scenario(scenario, *, seed: int | None = None, tol: float | None = None, max_dim: int = 8) -> dict:
    """Run a scenario (path, decoded dict, or :class:`Scenario`) and build a report.

    ``tol`` overrides the Hermiticity, eigen-decomposition and subspace
    tolerances; scenario ``tol_overrides`` apply on top of the defaults
    and ``tol`` wins over both.  ``seed`` overrides ``params.seed``.
    """
    t0 = time.perf_counter()
    if isinstance(scenario, Scenario):
        s = scenario
    elif isinstance(scenario, dict):
        s = parse_scenario(scenario)
    else:
        s = load_scenario(scenario)
    t_load = time.perf_counter()
    if seed is None:
        seed = int(s.params.get("seed", 0))
    overrides = dict(s.tol_overrides)
    if tol is not None:
        _require(tol > 0, "--tol must be positive")
        overrides.update(herm_tol=tol, eig_tol=tol, sub_tol=tol)
    with tolerances(**overrides):
        if s.command == "verify-theorems":
            results, residuals = _run_verify(s, seed, max_dim)
        else:
            results, residuals = _RUNNERS[s.command](s, seed)
        used = dataclasses.asdict(get_tolerances())
    t_run = time.perf_counter()
    return {
        "schema": SCHEMA,
        "command": s.command,
        "scenario_echo": copy.deepcopy(s.raw),
        "results": results,
        "residuals": residuals,
        "seed": seed,
        "tolerances": used,
        "timings": {"load_ms": 1e3 * (t_load - t0), "run_ms": 1e3 * (t_run - t_load)},
    }


def _plain(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not JSON serialisable: {type(x).__name__}")


def report_json(report: dict, indent: int | None = 2) -> str:
    return json.dumps(report, sort_keys=True, indent=indent, default=_plain)


def payload(report: dict) -> str:
    """Canonical JSON of everything except timings (the determinism contract)."""
    return report_json({k: v for k, v in report.items() if k != "timings"}, indent=None)
