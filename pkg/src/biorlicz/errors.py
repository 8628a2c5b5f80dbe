"""Exception types raised across the package."""


class BiOrliczError(Exception):
    """Base class for all package errors."""


class DomainError(BiOrliczError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigurationError(BiOrliczError, ValueError):
    """Parameters or grids are inconsistent or too small."""


class DataError(BiOrliczError, ValueError):
    """Input data violate a structural requirement (monotonicity, lengths)."""


class ConstructionError(BiOrliczError, RuntimeError):
    """The piecewise-linear construction produced a degenerate element."""


class OrientationError(ConstructionError):
    """An affine element reverses orientation or is singular."""


class ResolutionError(BiOrliczError, ValueError):
    """A quadrature grid cannot resolve the requested scale."""


class PreconditionError(BiOrliczError, ValueError):
    """An N-function fails a hypothesis required by the experiment."""
