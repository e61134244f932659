"""Exception types shared across the package."""


class SystoleLabError(Exception):
    """Base class for all errors raised by :mod:`systolelab`."""


class NonHyperbolicElement(SystoleLabError, ValueError):
    """A matrix with ``|trace| <= 2`` was used where a hyperbolic one is required."""


class InvalidSideLength(SystoleLabError, ValueError):
    pass


class TangentAtInfinity(SystoleLabError, ValueError):
    """Two geodesics share an endpoint on the boundary circle."""


class CatalogError(SystoleLabError, ValueError):
    """Malformed or inconsistent curve catalog."""


class EmptySystem(SystoleLabError, ValueError):
    pass


class NotFilling(SystoleLabError, ValueError):
    pass


class CatalogIncomplete(SystoleLabError, LookupError):
    """No catalog curve satisfies the requested combinatorial property."""


class WeightMismatch(SystoleLabError, ValueError):
    pass


class AngleSearchFailed(SystoleLabError, RuntimeError):
    pass


class DegenerateGradient(SystoleLabError, ValueError):
    """An all-zero gradient row reached the cone engine."""


class EmptySubspace(SystoleLabError, ValueError):
    pass


class NotCritical(SystoleLabError, ValueError):
    pass


class Indeterminate(SystoleLabError, ArithmeticError):
    """An LP margin fell inside the tolerance band around zero."""

    def __init__(self, message, report=None, certificate=None):
        super().__init__(message)
        self.report = report
        self.certificate = certificate


class DivergedAsExpected(SystoleLabError, RuntimeError):
    """The iterate left the search box while minimizing a non-filling system."""

    def __init__(self, message, point=None, iterations=0):
        super().__init__(message)
        self.point = point
        self.iterations = iterations


class MinimizationFailed(SystoleLabError, RuntimeError):
    pass


class LocusProjectionFailed(SystoleLabError, RuntimeError):
    pass
