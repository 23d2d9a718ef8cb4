"""Exception types shared across the library."""


class CurvradiiError(Exception):
    """Base class for all library-specific errors."""


class DomainError(CurvradiiError):
    """A chart point lies outside the model's chart domain."""


class SingularMetric(CurvradiiError):
    """The metric matrix is not invertible to working precision."""


class LeftChart(CurvradiiError):
    """An integration left the chart domain mid-flow."""


class InsufficientSamples(CurvradiiError):
    """A sampled curve has too few nodes for the derivative stencils."""


class DegeneratePlane(CurvradiiError):
    """Two vectors do not span a 2-plane (sectional curvature undefined)."""


class DegenerateSpeed(CurvradiiError):
    """Curve speed fell below the regularity threshold."""


class KappaVanishes(CurvradiiError):
    """Geodesic curvature below threshold: the curvature radius is undefined.

    Carries the offending sample index when raised from a whole-curve lift.
    """

    def __init__(self, message, sample_index=None):
        super().__init__(message)
        self.sample_index = sample_index


class DegenerateFrame(CurvradiiError):
    """No chart pair yields a usable complement basis (corrupted state)."""


class IllConditionedBasis(CurvradiiError):
    """The bracket-generated basis matrix is numerically ill-conditioned."""


class NotAdmissible(CurvradiiError):
    """A state path's velocity leaves the span of the frame fields."""


class NoConvergence(CurvradiiError):
    """A shooting iteration failed to converge within its budget."""


class Unreachable(CurvradiiError):
    """The requested constant-curvature arc cannot reach the target point."""


class ZeroRadius(CurvradiiError):
    """A zero radius vector cannot be converted to circle coordinates."""


class UndefinedAngle(CurvradiiError):
    """The momentum angle is undefined because its magnitude vanishes.

    The magnitude is still available as the ``epsilon`` attribute.
    """

    def __init__(self, message, epsilon=0.0):
        super().__init__(message)
        self.epsilon = epsilon


class NonFinite(CurvradiiError):
    """A state overflowed or became non-finite during integration."""


class ConfigError(CurvradiiError):
    """Invalid run configuration (bad model spec, field, or value)."""
