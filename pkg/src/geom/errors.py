"""Exception types shared across the library."""


class GeomError(Exception):
    """Base class for all library errors."""


class DegenerateProjection(GeomError):
    """Nearest-point projection is not unique (point outside the reach tube)."""


class NonUniqueGeodesic(GeomError):
    """Endpoints admit more than one minimizing geodesic (antipodal sphere points)."""


class AnnulusExceedsReach(GeomError):
    """Requested evaluation annulus extends beyond the manifold's reach tube."""


class QuadratureUnderResolved(GeomError):
    """Quadrature self-check failed: doubling the grid changed the result."""


class NoCrossing(GeomError):
    """Density stays strictly below the level along the probed ray."""


class DegenerateCovariance(GeomError):
    """Sample covariance has rank below the requested dimension."""


class DensityUnderflow(GeomError):
    """Density value at or below the floor; log-derivatives unreliable."""


class GradientTooSmall(GeomError):
    """Log-density gradient below threshold; gradient-based formula invalid."""


class EigengapCollapse(GeomError):
    """Hessian eigengap between tangential and normal clusters has collapsed."""


class NonFiniteObjective(GeomError):
    """Path optimization encountered non-finite objective or gradient values."""


class InsufficientLocalMass(GeomError):
    """Too little effective kernel mass near the query point for local PCA."""


class EmptyGroup(GeomError):
    """Summary requested for a group with no usable records."""


class ConfigError(GeomError):
    """Experiment configuration failed validation."""
