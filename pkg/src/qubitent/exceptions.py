"""Exception types raised across the package."""


class QubitEntError(Exception):
    """Base class for all package errors."""


class NonIntegerOrderOnSigned(QubitEntError, ValueError):
    """A negative weight would be raised to a non-integer power."""


class ShannonOnSigned(QubitEntError, ValueError):
    """Shannon entropy (order 1) was requested for a distribution with a negative weight."""


class OrderTooLarge(QubitEntError, ValueError):
    """Rényi order above the supported maximum."""


class OutOfCube(QubitEntError, ValueError):
    """Empirical model coordinates outside [-1, 1]^3."""


class NotConverged(QubitEntError, RuntimeError):
    """The entropy maximizer failed to meet its convergence certificate."""

    def __init__(self, message, r=None, k=None):
        super().__init__(message)
        self.r = r
        self.k = k
