"""Exception types shared across the package."""


class FermirepError(Exception):
    """Base class for all fermirep-specific errors."""


class DimensionCapError(FermirepError):
    """Requested determinant basis exceeds the supported size cap."""


class NormalizationError(FermirepError):
    """State amplitudes deviate from unit norm beyond tolerance."""


class ConvergenceError(FermirepError):
    """The Jacobi sweep loop failed to reach the convergence threshold."""


class DegeneracyError(FermirepError):
    """Spectrum too degenerate to pick a basis deterministically."""


class RepresentabilityError(FermirepError):
    """Input spectrum violates the condition required by a constructor."""


class AnomalyError(FermirepError):
    """A consequence guaranteed by theory failed numerically."""
