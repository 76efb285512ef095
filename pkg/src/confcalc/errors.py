"""Exception types shared across the package."""


class ConfcalcError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(ConfcalcError):
    """Operands have incompatible or unsupported shapes."""


class AlgebraError(ConfcalcError):
    """Operation needs an algebra value (scalar or square matrix)."""


class DomainError(ConfcalcError):
    """Function evaluated outside its domain of definition."""


class LowerTerminalError(ConfcalcError):
    """Operator evaluated at or below its lower terminal."""


class QuadratureError(ConfcalcError):
    """Adaptive quadrature could not meet the requested tolerance.

    The ``achieved`` attribute carries the error estimate that was reached.
    """

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class ConvergenceError(ConfcalcError):
    """An iteration failed to converge within its budget."""


class ExprSyntaxError(ConfcalcError):
    """Malformed expression text.

    ``offset`` is the byte offset into the source string at which the
    problem was detected (end of string for truncated input).
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownIdentifierError(ExprSyntaxError):
    """Expression uses a name that is neither a variable nor a function."""
