"""Exception types shared across the library."""


class SparseGpError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(SparseGpError):
    """Array shapes are inconsistent with each other or with a model."""


class FactorizationFailed(SparseGpError):
    """Cholesky failed at every rung of the jitter ladder."""


class NoConvergence(SparseGpError):
    """An iterative routine exhausted its iteration budget."""


class UnsupportedKernel(SparseGpError):
    """The requested operation is not implemented for this kernel family."""


class InvalidCount(SparseGpError):
    """An inducing-point count is out of range or points are duplicated."""


class ParseError(SparseGpError):
    """A CSV row could not be parsed; carries the offending line number."""

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class EmptyFile(SparseGpError):
    """A CSV file contained no data rows."""


class InternalInconsistency(SparseGpError):
    """Two mathematically equivalent computation paths disagreed."""


class PointCollision(SparseGpError):
    """A test point coincides with a training input where it must not."""
