"""Exception hierarchy shared by all modules."""


class GreedyInverseError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(GreedyInverseError, ValueError):
    """Invalid configuration or argument."""


class NumericalError(GreedyInverseError, ArithmeticError):
    """Base class for numerical failures (exit code 3 on the CLI)."""


class DuplicateNodes(NumericalError):
    pass


class SingularMatrix(NumericalError):
    pass


class NumericalBreakdown(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class DivergenceDetected(NumericalError):
    pass


class SourceOutOfField(ValidationError):
    pass


class DivisionByZero(NumericalError, ZeroDivisionError):
    pass


class ReconstructorFailure(GreedyInverseError):
    """Raised by the residual-based greedy loop when the reconstructor fails.

    The selection accumulated so far is available as ``partial``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class IoError(GreedyInverseError, OSError):
    """Reading or writing an artifact failed (exit code 4 on the CLI)."""
