"""
Exception hierarchy for the string-orientation algebra package.
All errors derive from ValueError so callers can treat bad input uniformly.
"""

from typing import Optional


class StringOrientationError(ValueError):
    """Base class for every error raised by this package."""

    kind = "error"


class RingMismatchError(StringOrientationError):
    """Operands live over different coefficient rings."""

    kind = "ring-mismatch"


class VariableMismatchError(StringOrientationError):
    """Operands use different variable sets or parameter caps."""

    kind = "variable-mismatch"


class NonUnitError(StringOrientationError):
    """A constant term that must be invertible is not a unit of the ring."""

    kind = "non-unit"


class ConstantTermError(StringOrientationError):
    """A series has the wrong constant term for the requested operation."""

    kind = "constant-term"


class UndecidableValuationError(StringOrientationError):
    """The series vanishes to its truncation, so its valuation cannot be read off."""

    kind = "undecidable-valuation"


class DivisorMismatchError(StringOrientationError):
    """Two sides of a section identity carry different divisor vectors."""

    kind = "divisor-mismatch"


class BoundsExceededError(StringOrientationError):
    """A brute-force computation was asked to go beyond its size bound."""

    kind = "bounds-exceeded"


class NotPrimeError(StringOrientationError):
    """An operator that needs a prime was given a composite or unit."""

    kind = "not-prime"


class DecompositionError(StringOrientationError):
    """A q-expansion is not a combination of the basis of its weight."""

    kind = "decomposition"


class InsufficientPrecisionError(StringOrientationError):
    """The truncation is too small to determine the answer."""

    kind = "insufficient-precision"

    def __init__(self, message: str, required: Optional[int] = None):
        super().__init__(message)
        self.required = required


class MalformedInputError(StringOrientationError):
    """Input text could not be parsed."""

    kind = "malformed-input"

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
