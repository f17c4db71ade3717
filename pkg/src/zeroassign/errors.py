"""Exception hierarchy.

Errors fall into three families so that front ends can map them to exit
codes: bad input, an unsolvable request, and internal failures.
"""


class ZeroAssignError(Exception):
    """Base class for every error raised by the package."""


class InputError(ZeroAssignError):
    """Malformed or inconsistent input data."""


class SolvabilityError(ZeroAssignError):
    """The request is well formed but has no solution."""


class NumericalError(ZeroAssignError):
    """A numerical kernel could not deliver its contract."""


class SingularMatrix(NumericalError):
    pass


class DegreeOverflow(NumericalError):
    pass


class ZeroPolynomial(InputError):
    pass


class ZeroVector(InputError):
    pass


class ParseError(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NotSquare(InputError):
    pass


class DegenerateSystem(InputError):
    """The system matrix loses rank for every ``s``."""


class RankDeficientB(SolvabilityError):
    pass


class SingularB2(NumericalError):
    pass


class Uncontrollable(SolvabilityError):
    pass


class DegreeTooHigh(SolvabilityError):
    pass


class EigenvalueCollision(SolvabilityError):
    pass


class ZeroTargetPolynomial(SolvabilityError):
    pass


class AttemptsExhausted(NumericalError):
    pass


class VerificationFailed(ZeroAssignError):
    """Internal consistency breach; carries a diagnostic dump."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
