"""Shared exception types."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to reach the requested residual."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class DegeneracyError(RuntimeError):
    """A nondegenerate eigenstate was required but the level is (near-)degenerate."""


class TruncationError(RuntimeError):
    """A basis cutoff is too small, or a requested dimension exceeds its guard."""


class StencilError(RuntimeError):
    """A finite-difference stencil straddles a level crossing or is too wide."""
