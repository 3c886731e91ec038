"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when an input fails a construction- or parse-time check."""


class NumericalError(RuntimeError):
    """Raised when a numerical routine fails (non-convergence, bad residue)."""


class ResourceLimitError(RuntimeError):
    """Raised when a computation would exceed a configured resource cap."""
