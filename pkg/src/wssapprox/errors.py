"""Exception types raised across the package."""


class WSSApproxError(Exception):
    """Base class for all package errors."""


class InvalidCovariance(WSSApproxError, ValueError):
    """Lag sequence is not a valid (positive semidefinite) covariance."""


class NonStationary(WSSApproxError, ValueError):
    """AR polynomial has a root on or inside the unit circle."""


class NonInvertible(WSSApproxError, ValueError):
    """MA polynomial has a root inside the unit circle, so it is not a Wold filter."""


class NotAvailable(WSSApproxError):
    """Operation is undefined for this kind of process spec."""


class PreconditionError(WSSApproxError, ValueError):
    """An argument violates a documented precondition."""


class SpecParseError(WSSApproxError, ValueError):
    """A process spec or covariance file could not be parsed.

    ``field`` names the offending entry when one can be identified.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class QuadratureNonConvergence(WSSApproxError, ArithmeticError):
    """Doubling the quadrature grid moved the result by more than the tolerance."""


class SingularSystem(WSSApproxError, ArithmeticError):
    """Dense Toeplitz solve hit a pivot below the relative threshold."""


class NumericalFailure(WSSApproxError, ArithmeticError):
    """Failure tied to a specific model order ``order``."""

    def __init__(self, message, order):
        super().__init__(message)
        self.order = order


class Breakdown(NumericalFailure):
    """Levinson recursion produced a residual variance at the determinism boundary."""


class NearUnitRoot(NumericalFailure):
    """1 - sum(b) is too small to evaluate the AR model spectrum at the origin."""
