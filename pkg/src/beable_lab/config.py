"""Global numerical tolerances.

All thresholds are relative (scaled by a Frobenius or operator norm where the
operation says so).  Values are read at call time, so :func:`tolerances` can
override them for a block of code::

    with tolerances(sub_tol=1e-7):
        ...
"""
from __future__ import annotations

import contextlib
import dataclasses


@dataclasses.dataclass(frozen=True)
class Tolerances:
    herm_tol: float = 1e-9
    eig_tol: float = 1e-9
    # membership / closure residuals
    sub_tol: float = 1e-9
    # rank decisions when adjoining new directions or computing null spaces
    accept_tol: float = 1e-8
    # eigenvalue clustering, relative to the operator norm
    degeneracy_tol: float = 1e-8
    df_tol: float = 1e-8
    fam_tol: float = 1e-8
    weight_floor: float = 1e-12
    proj_floor: float = 1e-12
    # positivity and normalisation of density matrices
    state_tol: float = 1e-10


_current = Tolerances()


def get_tolerances() -> Tolerances:
    return _current


def set_tolerances(**overrides) -> Tolerances:
    """Replace the global tolerances; returns the previous settings."""
    global _current
    previous = _current
    _current = dataclasses.replace(_current, **overrides)
    return previous


@contextlib.contextmanager
def tolerances(**overrides):
    previous = set_tolerances(**overrides)
    try:
        yield _current
    finally:
        set_tolerances(**dataclasses.asdict(previous))
