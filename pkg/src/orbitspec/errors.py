"""Exception and warning types shared across the library."""


class OrbitspecError(Exception):
    """Base class for all library-specific errors."""


class PoleError(OrbitspecError):
    """A gamma-type special function was evaluated at a pole."""


class DivergentExponent(OrbitspecError):
    """Sphere-slice exponent outside the convergence region."""


class DivergentRegion(OrbitspecError):
    """Transform requested outside the region where its integral converges."""


class PoleOfContinuation(OrbitspecError):
    """Analytic continuation evaluated at one of its poles."""


class InsufficientSmoothness(OrbitspecError):
    """More derivatives requested than the profile provides."""


class MaxSubdivisionsExceeded(OrbitspecError):
    """Adaptive quadrature hit the subdivision budget before converging."""


class NonIntegrableSingularity(OrbitspecError):
    """Declared singularity exponent makes the integral divergent."""


class DimensionTooLarge(OrbitspecError):
    """Quadrature requested in more dimensions than supported."""


class ZeroVector(OrbitspecError):
    """A nonzero vector was required."""


class NotPSD(OrbitspecError):
    """Matrix expected to be positive semidefinite has a negative eigenvalue."""


class SingularMatrix(OrbitspecError):
    """Group element matrix is singular or numerically non-invertible."""


class ChartSingularity(OrbitspecError):
    """Chart action evaluated on the lower-dimensional exceptional set."""


class TruncationWarning(UserWarning):
    """Spectral samples do not decay enough at the grid edge."""
