"""Exception types raised across the package."""


class MonotrendError(Exception):
    """Base class for all package errors."""


class InvalidInput(MonotrendError, ValueError):
    """Input violates a documented precondition."""


class OutOfRange(MonotrendError, ValueError):
    """A query point lies outside the domain of the object queried."""


class DegenerateConstraint(MonotrendError, ValueError):
    """The point constraint leaves one side of the split empty."""


class NumericalFailure(MonotrendError, ArithmeticError):
    """A numerical routine could not produce a valid result."""


class InvalidNuisance(MonotrendError, ValueError):
    """A nuisance-parameter estimate is unusable (e.g. non-positive)."""


class Unsupported(MonotrendError, ValueError):
    """The requested combination of options is not supported."""
