"""Exception types shared across the package."""


class HybridsdError(Exception):
    """Base class for all package-specific errors."""


class InvalidResolution(HybridsdError, ValueError):
    """Bit resolution outside the supported range."""


class InvalidDelta(HybridsdError, ValueError):
    """Quantizer step size must be positive."""


class EmptySamples(HybridsdError, ValueError):
    """Calibration needs a non-degenerate sample set."""


class NotPositiveDefinite(HybridsdError, ValueError):
    """Cholesky pivot fell below tolerance even after the ridge retry."""


class SingularDiagonal(HybridsdError, ValueError):
    """Triangular system has a diagonal entry below the numeric floor."""


class TooLarge(HybridsdError, ValueError):
    """Enumeration guard tripped (search space too big for brute force)."""


class ShapeMismatch(HybridsdError, ValueError):
    """Operands have inconsistent dimensions."""


class Diverged(HybridsdError, RuntimeError):
    """Iterative solver objective decreased repeatedly (implementation bug)."""


class InfeasiblePower(HybridsdError, RuntimeError):
    """Power constraint unattainable even with an extreme penalty."""


class UnknownScheme(HybridsdError, ValueError):
    """Scheme tag is not one of the supported benchmark identifiers."""
