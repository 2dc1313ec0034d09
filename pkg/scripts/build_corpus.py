"""Regenerate the bundled scenario corpus under src/beable_lab/corpus/."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from beable_lab import linalg as la
from beable_lab import spin
from beable_lab.literals import matrix_literal, vector_literal

OUT = Path(__file__).resolve().parents[1] / "src" / "beable_lab" / "corpus"


def vec_state(v):
    v = np.asarray(v, dtype=complex)
    return {"kind": "vector", "v": vector_literal(v / np.linalg.norm(v))}


def pauli():
    return {
        "description": "Segalgebra generated by two anticommuting Pauli matrices",
        "dim_h": 2,
        "command": "generate",
        "operators": {"sx": matrix_literal(la.pauli("x")), "sy": matrix_literal(la.pauli("y"))},
        "params": {"seeds": ["sx", "sy"]},
    }


def diagonal_bohm():
    x = np.arange(-2.0, 3.0)
    psi = np.exp(-(x**2) / 2) * (1 + 0.5j * x)
    return {
        "description": "functions of a position operator on a 5-point lattice: commutative, Born-rule weights",
        "dim_h": 5,
        "command": "decompose",
        "operators": {"X": matrix_literal(np.diag(x))},
        "state": vec_state(psi),
        "params": {"algebra": {"generate": ["X"]}},
    }


def singlet():
    sx, sy, sz = spin.spin1_matrices()
    return {
        "description": "two spin-1 particles in the singlet; Bub-definite algebra for Sz^2 of particle 1",
        "dim_h": 9,
        "command": "bub-definite",
        "spin1": {"Sx": matrix_literal(sx), "Sy": matrix_literal(sy), "Sz": matrix_literal(sz)},
        "operators": {"Sz2_I": matrix_literal(np.kron(sz @ sz, np.eye(3)))},
        "state": {"kind": "vector", "v": vector_literal(spin.singlet_vector(sx, sy, sz))},
        "params": {"preferred": "Sz2_I"},
    }


def faithful():
    rho = np.array([[0.5, 0.1, 0.0], [0.1, 0.3, 0.05j], [0.0, -0.05j, 0.2]])
    return {
        "description": "full-rank density matrix on the full 3x3 algebra: no beable status",
        "dim_h": 3,
        "command": "check-beable",
        "state": {"kind": "density", "rho": matrix_literal(rho)},
        "params": {"algebra": "full"},
    }


def bub_eigenstate():
    return {
        "description": "state vector inside a degenerate eigenspace of the preferred observable",
        "dim_h": 3,
        "command": "bub-definite",
        "operators": {"R": matrix_literal(np.diag([1.0, 1.0, 2.0]))},
        "state": vec_state([1.0, 1.0, 0.0]),
        "params": {"preferred": "R"},
    }


def maximal_family():
    s = 1 / math.sqrt(2)
    return {
        "description": "orthonormal family {|0>, |1>} with target (|0>+|1>)/sqrt2 in C^3",
        "dim_h": 3,
        "command": "family",
        "state": vec_state([s, s, 0.0]),
        "params": {"vectors": [vector_literal([1, 0, 0]), vector_literal([0, 1, 0])], "trials": 200},
    }


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, fn in [
        ("pauli", pauli),
        ("diagonal-bohm", diagonal_bohm),
        ("singlet", singlet),
        ("faithful", faithful),
        ("bub-eigenstate", bub_eigenstate),
        ("maximal-family", maximal_family),
    ]:
        (OUT / f"{name}.json").write_text(json.dumps(fn(), indent=1) + "\n", encoding="utf-8")
        print("wrote", name)


if __name__ == "__main__":
    main()
