"""Exception hierarchy shared by all layers."""


class BKMError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(BKMError, ValueError):
    pass


class DomainError(BKMError, ValueError):
    """A jet primitive was applied outside its domain."""

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class ConvergenceError(BKMError, RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, worst=None):
        super().__init__(message)
        self.worst = worst


class SizeError(ConfigError):
    pass


class BoundaryError(ConfigError):
    pass


class EigenError(BKMError, RuntimeError):
    pass


class PrecisionError(BKMError, RuntimeError):
    """Finite-difference Richardson levels disagree beyond tolerance."""

    def __init__(self, message, worst=None):
        super().__init__(message)
        self.worst = worst


class DegenerateMetricError(BKMError, ArithmeticError):
    pass


class InternalMismatchError(BKMError, ArithmeticError):
    """The determinant and contraction curvature formulas disagree."""


class InsufficientDataError(BKMError, ValueError):
    pass


class NonPositiveCurvatureError(BKMError, ValueError):
    pass
