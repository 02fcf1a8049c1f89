"""Exception and warning types shared across the package."""


class HsicoptError(Exception):
    """Base class for all package errors."""


class ArgumentError(HsicoptError, ValueError):
    """Invalid argument value (counts, fractions, unknown names)."""


class ShapeError(ArgumentError):
    """Array dimensions do not match."""


class DomainError(ArgumentError):
    """A point lies outside the box domain."""


class DegenerateError(HsicoptError):
    """The data do not support the requested quantity."""


class DegenerateSetError(DegenerateError):
    """The sublevel set (or the feasible set) is empty."""


class DegenerateVarianceError(DegenerateError):
    """Output variance is zero, variance-based indices are undefined."""


class DegenerateScaleError(DegenerateError):
    """All samples coincide, no length scale can be derived."""


class InfeasibleError(DegenerateError):
    """No feasible point available where one is required."""


class EvaluationError(HsicoptError, ArithmeticError):
    """Objective or constraint returned NaN or infinity."""


class DegenerateOutputWarning(UserWarning):
    """Indicator output is constant; indices reported as zero."""
