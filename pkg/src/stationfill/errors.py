"""Exception types shared across the package.

Every error that callers are expected to catch has its own class so that the
CLI can map failure modes to stable exit codes and tests can assert on the
exact failure instead of matching message strings.
"""

from __future__ import annotations


class StationFillError(Exception):
    """Base class for all package-specific errors."""


class EmptyInput(StationFillError):
    """An operation received zero records/values where at least one is required."""


class InvalidStamp(StationFillError):
    """A timestamp does not denote a real calendar hour."""


class CsvFormatError(StationFillError):
    """An ingestion CSV is malformed (missing header, bad field, short row)."""


class ParameterMismatch(StationFillError):
    """Series of different physical parameters were combined."""


class WrongInputCount(StationFillError):
    """A network was built with a number of input stations other than six."""


class EmptyNetwork(StationFillError):
    """A network operation was asked to run over zero aligned hours."""


class OutOfIndex(StationFillError):
    """A feature row was requested for an hour whose lags precede the index."""


class EmptyDataset(StationFillError):
    """Dataset assembly or training produced/received zero usable rows."""


class DirtyTestPeriod(StationFillError):
    """A requested test period contains sentinels in its features or target."""


class PeriodNotFound(StationFillError):
    """A requested test period has no rows in the dataset."""


class NoCleanWindow(StationFillError):
    """No sentinel-free window of the requested length exists."""


class SingularSystem(StationFillError):
    """A linear solve failed to produce a solution."""


class CholeskyFailure(SingularSystem):
    """A kernel matrix stayed non-positive-definite after jitter retries."""


class JacobianNonFinite(StationFillError):
    """A Jacobian evaluation produced NaN/Inf entries."""


class SchemaMismatch(StationFillError):
    """Data presented to a model does not match the trained feature schema."""


class LengthMismatch(StationFillError):
    """Two vectors that must be parallel have different lengths."""


class GapTooLong(StationFillError):
    """A synthetic gap does not fit inside the test period."""


class NonConvergenceWarning(UserWarning):
    """An iterative solver hit its iteration cap before reaching tolerance."""
