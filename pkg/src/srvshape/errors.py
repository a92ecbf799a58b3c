"""Exception hierarchy.

Two families matter to the CLI: :class:`DataError` (bad inputs, exit code 3)
and :class:`NumericalError` (the computation itself failed, exit code 4).
"""


class ShapeError(Exception):
    """Base class for every error raised by srvshape."""


class DataError(ShapeError, ValueError):
    pass


class NumericalError(ShapeError, ArithmeticError):
    pass


class ZeroLengthCurve(DataError):
    pass


class ZeroNorm(NumericalError):
    pass


class DimensionMismatch(DataError):
    pass


class AntipodalPoints(NumericalError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NonMonotoneGamma(DataError):
    pass


class GridTooSmall(DataError):
    pass


class AliasRisk(DataError):
    pass


class InsufficientRank(NumericalError):
    pass


class BasepointMismatch(DataError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class EmptyInput(DataError):
    pass


class NoConvergence(NumericalError):
    """Raised when an iteration hits its cap; ``result`` holds the partial state."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class SingletonClass(DataError):
    pass


class SingularCovariance(NumericalError):
    pass


class UnknownLabel(DataError, KeyError):
    pass


class TooFewPerClass(DataError):
    pass


class VersionMismatch(DataError):
    pass


class DegenerateCovarianceWarning(RuntimeWarning):
    """The alignment cross-covariance vanished; identity rotation returned."""
