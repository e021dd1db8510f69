"""Exception types shared across the package."""


class NetlogitError(Exception):
    """Base class for all netlogit errors."""


class DimensionMismatchError(NetlogitError, ValueError):
    """Input shapes do not line up."""


class EmptyGraphError(NetlogitError, ValueError):
    """Operation undefined on a graph with no edges."""


class ZeroMatrixError(NetlogitError, ValueError):
    """Operation undefined on an all-zero matrix."""


class TooLargeError(NetlogitError, ValueError):
    """Problem size exceeds an enumeration or materialization guard."""


class NonFiniteError(NetlogitError, FloatingPointError):
    """NaN or infinity where finite values are required."""


class NoConvergedFitError(NetlogitError, RuntimeError):
    """No grid point produced a converged fit."""


class InsufficientDataError(NetlogitError, ValueError):
    """Not enough data points for the requested computation."""
