"""Exception types raised across the package."""


class SplineDictError(ValueError):
    """Base class for all domain errors."""


class NonIncreasing(SplineDictError):
    pass


class TooFewPoints(SplineDictError):
    pass


class NonDivisible(SplineDictError):
    pass


class BadCount(SplineDictError):
    pass


class EndpointMismatch(SplineDictError):
    pass


class UnionMismatch(SplineDictError):
    pass


class IndexOutOfRange(SplineDictError, IndexError):
    pass


class XOutOfDomain(SplineDictError):
    pass


class SignalTooShort(SplineDictError):
    pass


class ParseError(SplineDictError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class IOFailure(SplineDictError, OSError):
    pass


class Stagnation(SplineDictError):
    """Greedy selection cannot reduce the residual any further.

    The best decomposition reached before stalling is kept on
    ``decomposition`` so callers can still use it.
    """

    def __init__(self, message, decomposition=None):
        super().__init__(message)
        self.decomposition = decomposition


class NonFiniteCurvature(RuntimeWarning):
    """Curvature denominator vanished or changed sign (|f'| >= 1)."""
