"""Exception hierarchy shared by all gazekit modules.

The CLI maps these onto exit codes: UsageError -> 1, DataError -> 2,
NumericError (and subclasses) -> 3.
"""


class GazekitError(Exception):
    """Base class for all errors raised by gazekit."""


class UsageError(GazekitError):
    """Bad command-line arguments or configuration keys."""


class DataError(GazekitError):
    """Malformed or inconsistent input data (manifests, checkpoints, images)."""


class NumericError(GazekitError):
    """Numerical failure: degenerate geometry, singular matrices, non-finite values."""


class ShapeError(NumericError):
    """Tensor shapes do not conform to a primitive's contract."""
