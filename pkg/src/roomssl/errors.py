"""Exception hierarchy shared across the package.

CLI exit-code mapping: ConfigurationError -> 2, numeric failures
(EstimationError, NumericError) -> 3, everything else -> 1.
"""


class RoomsslError(Exception):
    """Base class for all package errors."""


class ConfigurationError(RoomsslError):
    """A config object or file is invalid or unsatisfiable."""


class GeometryError(RoomsslError):
    """Degenerate scene geometry (coincident points, positions outside room)."""


class InputError(RoomsslError):
    """Runtime input violates an operation's precondition (silent signal, shape mismatch)."""


class EstimationError(RoomsslError):
    """An estimator cannot produce a reliable value (e.g. insufficient decay range)."""


class NumericError(RoomsslError):
    """Non-finite values where finite ones are required."""
