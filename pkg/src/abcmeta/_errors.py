from __future__ import annotations


class AbcMetaError(Exception):
    """Base class for all abcmeta errors."""


class ValidationError(AbcMetaError, ValueError):
    """Bad input: the CLI maps these to exit code 2."""


class OrderingViolation(ValidationError):
    pass


class UnsupportedPattern(ValidationError):
    pass


class BadSampleSize(ValidationError):
    pass


class NonFiniteValue(ValidationError):
    pass


class NonPositiveSupport(ValidationError):
    pass


class InvalidParam(ValidationError):
    pass


class InvalidPrior(ValidationError):
    pass


class InvalidConfig(ValidationError):
    pass


class OutOfBounds(ValidationError):
    pass


class ShiftInsufficient(ValidationError):
    pass


class EmptySample(ValidationError):
    pass


class TooFewPoints(ValidationError):
    pass


class InsufficientCandidates(ValidationError):
    pass


class BatchFormatError(ValidationError):
    """Batch file could not be parsed.

    Carries every problem found as (row, column, message). Rows count from 1
    at the first data row; row 0 means the header or the file as a whole.
    """

    def __init__(self, diagnostics: list[tuple[int, str, str]]):
        self.diagnostics = diagnostics
        lines = [f"row {row}, column {col!r}: {msg}" for row, col, msg in diagnostics]
        super().__init__("invalid batch file:\n  " + "\n  ".join(lines))
