"""Segalgebras of Hermitian matrices, dispersion-free states and beable subalgebras."""
from .beables import (
    BeableVerdict,
    EigenFamily,
    ForcedCommutativity,
    MaximalityCertificate,
    bub_definite,
    check_maximality,
    commutant,
    family_algebra,
    forced_commutativity,
    has_beable_status,
    intersect_definite_sets,
    maximality_certificate,
    recover_family,
)
from .config import Tolerances, get_tolerances, set_tolerances, tolerances
from .errors import BeableLabError, NumericalError, PreconditionError, ValidationError
from .linalg import (
    HermitianOp,
    SpectralDecomposition,
    decompose,
    identity,
    jordan,
    lie,
    op_function,
    op_norm,
    pauli,
    re_im_product,
)
from .scenarios import run_scenario
from .segalgebra import (
    IdealSubspace,
    QuotientAlgebra,
    Segalgebra,
    Subspace,
    complexified_closure_check,
    diagonal_algebra,
    full_algebra,
    generate,
    is_commutative,
    is_ideal,
    is_quasicommutative,
    member,
    quotient,
    scalar_algebra,
)
from .states import (
    AlgState,
    DispersionFreeState,
    MixtureDecomposition,
    StateIdeal,
    characters,
    decompose_state,
    definite_set,
    dispersion_free_states,
    evaluate,
    is_dispersion_free,
    state_ideal,
)
from .theorems import verify_theorems

__version__ = "0.1.0"
