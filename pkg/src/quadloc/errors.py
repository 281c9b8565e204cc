"""Exception types raised across the package."""


class ConfigurationError(ValueError):
    """Invalid run or discretization parameters."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class NumericalError(RuntimeError):
    """A numerical routine failed (SVD, refinement, eigensolver)."""


class TrackingError(RuntimeError):
    """Mode tracking across a parameter sweep broke down."""


class BoundaryWarning(UserWarning):
    """A minimum was found at the edge of the searched interval."""
