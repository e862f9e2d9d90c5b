"""Exception types shared across the package."""


class QFunctionError(Exception):
    """Base class for numeric-domain errors raised by this package."""


class DomainError(QFunctionError):
    """An argument lies outside the documented domain of the operation."""


class ZeroDivisor(QFunctionError):
    """A negative-index product ran into a vanishing factor."""


class Overflow(QFunctionError):
    """A finite product with growing factors exceeded the term budget."""


class DivergenceError(QFunctionError):
    """No stopping rule applies to the requested series."""


class PoleError(QFunctionError):
    """A denominator factor vanished before the series terminated."""


class BudgetExceeded(QFunctionError):
    """The term budget ran out before the stopping rule fired."""


class BranchError(QFunctionError):
    """A fractional power was requested outside the principal branch's domain."""


class NegativeRadicand(QFunctionError):
    """A square root of a negative quantity was requested."""
