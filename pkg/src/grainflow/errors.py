"""Exception hierarchy used across the package."""


class GrainflowError(Exception):
    """Base class for all package errors."""


class InvalidGeometryError(GrainflowError, ValueError):
    """Anchors are coincident, collinear, or otherwise degenerate."""


class NoInteriorEquilibriumError(GrainflowError):
    """Some triangle angle is >= 120 degrees, so the Fermat point is a vertex."""


class ConvergenceError(GrainflowError):
    """An iterative solver ran out of iterations.

    The last iterate is kept on ``last_iterate`` so callers can inspect it.
    """

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class ContractViolationError(GrainflowError, ValueError):
    pass


class DomainError(GrainflowError, ValueError):
    pass


class DegenerateKernelError(DomainError):
    """Raised when the coupling matrix is not guaranteed a simple zero eigenvalue."""

    def __init__(self, message, kernel_dim):
        super().__init__(message)
        self.kernel_dim = kernel_dim


class JunctionCollisionError(GrainflowError):
    """The triple junction reached (or came too close to) a fixed anchor."""

    def __init__(self, message, edge):
        super().__init__(message)
        self.edge = edge


class CriticalEventError(GrainflowError):
    """A network boundary degenerated to zero length."""

    def __init__(self, message, boundary):
        super().__init__(message)
        self.boundary = boundary


class ContractionFailureError(GrainflowError):
    def __init__(self, message, ratios):
        super().__init__(message)
        self.ratios = ratios


class UsageError(GrainflowError, ValueError):
    """Bad user input: malformed config, mismatched grids, unknown keys."""
