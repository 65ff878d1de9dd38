"""Exception types raised across the package.

Everything derives from :class:`InputError` (itself a ``ValueError``) so callers
can catch one type at an API boundary while tests and error messages stay
specific about what went wrong.
"""


class InputError(ValueError):
    """Base class for invalid data, configuration, or arguments."""


class EmptyInput(InputError):
    """A sample vector or table slice contained no values."""


class NonFiniteValue(InputError):
    """A NaN or infinity showed up where a finite number is required."""


class DomainError(InputError):
    """An argument lies outside its mathematical domain."""


class NeedAtLeastTwo(InputError):
    """An operation over several distributions got fewer than two."""


class UnequalSampleSizes(InputError):
    """Relative comparisons require one common sample size across models."""


class UnknownRisk(InputError):
    """Risk selector does not name one of the supported risk functionals."""


class WeightMismatch(InputError):
    """Weight vector length does not match what it is weighting."""


class ParseError(InputError):
    """Input file could not be parsed into a metrics table."""


class RaggedTable(InputError):
    """Metrics table cells do not share one common sample grid."""


class DuplicateCell(InputError):
    """The same (model, metric, sample) coordinate appeared twice."""


class InvalidPermutation(InputError):
    """A ranking is not a permutation of 0..k-1."""


class TooLarge(InputError):
    """Problem size exceeds what an exact method will attempt."""
