"""Exception hierarchy.

The CLI maps :class:`ValidationError` (and its subclasses) to exit code 2 and
:class:`NumericalError` to exit code 3.
"""


class BeableLabError(Exception):
    """Base class for all library errors."""


class ValidationError(BeableLabError, ValueError):
    """Malformed input: bad literal, dimension mismatch, non-Hermitian matrix."""


class PreconditionError(ValidationError):
    """A documented operation contract was violated by the caller.

    ``contract`` names the violated contract so reports can surface it.
    """

    def __init__(self, contract, message):
        super().__init__(f"{contract}: {message}")
        self.contract = contract


class NumericalError(BeableLabError, ArithmeticError):
    """A numerical routine failed (eigensolver divergence, broken invariant)."""
