"""Exception types shared across the package.

Every error raised deliberately by this package derives from
:class:`StereochainError`, so callers can catch one base class at the
boundary (the CLI does exactly that).
"""

from __future__ import annotations


class StereochainError(Exception):
    """Base class for all errors raised by this package."""


class ZeroVectorError(StereochainError):
    """A vector with norm at or below the zero cutoff cannot be normalized."""


class PoleRayError(StereochainError):
    """The input direction points at the projection pole, so its image is undefined."""


class PoleBandError(StereochainError):
    """A sphere point lies inside the numerical exclusion band under the pole."""


class PoleProximityError(StereochainError):
    """A finite-difference probe around this point would cross the pole band."""


class NormOverflowError(StereochainError):
    """A squared norm is not representable as a finite float64."""


class DegenerateTripleError(StereochainError):
    """An angle vertex coincides with one of its legs."""


class TooFewPointsError(StereochainError):
    """The dataset has too few rows for the requested statistic."""


class EmptyCircleError(StereochainError):
    """The requested plane misses the sphere, or no usable sample remains."""


class EmptyResultError(StereochainError):
    """Every row was discarded, leaving nothing to return."""


class InfeasibleGridError(StereochainError):
    """A benchmark grid contains a dimension for which the chain is undefined."""


class DatasetFormatError(StereochainError):
    """Base class for dataset file problems, carrying a file location.

    ``line`` and ``column`` are 1-based; either may be None when the
    problem is not tied to a single cell.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        at = ""
        if line is not None:
            at = f" (line {line}" + (f", field {column})" if column is not None else ")")
        super().__init__(message + at)
        self.line = line
        self.column = column


class ParseError(DatasetFormatError):
    """A cell could not be read as a number."""


class RaggedRowsError(DatasetFormatError):
    """A row has a different number of fields than the first data row."""


class NonFiniteValueError(DatasetFormatError):
    """A cell parsed to NaN or an infinity."""


class EmptyFileError(DatasetFormatError):
    """The file holds no data rows."""


class DatasetIoError(StereochainError):
    """A dataset or report file could not be written."""
