"""Curvature-radius geometry toolkit.

Chart-based Riemannian models, curvature-radius lifts of curves, the frame
fields spanning the lift distribution with their Lie-bracket structure,
homothety-invariant sub-Riemannian length functionals, distance
reconstruction by constant-curvature shooting, and the similarity-group
Hamiltonian model of the flat plane.
"""

from .errors import (
    ConfigError,
    CurvradiiError,
    DegenerateFrame,
    DegeneratePlane,
    DegenerateSpeed,
    DomainError,
    IllConditionedBasis,
    InsufficientSamples,
    KappaVanishes,
    LeftChart,
    NoConvergence,
    NonFinite,
    NotAdmissible,
    SingularMetric,
    Unreachable,
    UndefinedAngle,
    ZeroRadius,
)
from .geometry import (
    MetricModel,
    SampledCurve,
    TangentPoint,
    christoffel,
    christoffel_contract,
    covariant_derivative,
    euclidean,
    exp_map,
    geodesic_between,
    hyperbolic2,
    parse_model,
    riemann,
    scale_metric,
    sectional_curvature,
    sphere2,
)
from .lifts import (
    LiftedCurve,
    RadiusPoint,
    curvature_radius,
    geodesic_curvature,
    homothety_invariance_check,
    lift,
)
from .frames import (
    ComplementBasis,
    FrameVector,
    complement_basis,
    complete_lift,
    composite_field,
    flow,
    flow_trajectory,
    frame_eval,
    frame_field,
    geodesic_factorization_residual,
    growth_vector,
    homothety_generator_residual,
    lie_bracket,
    random_radius_point,
    riemann_bracket_residual,
    sectional_coefficient,
    surface_circling_field,
)
from .srmetric import (
    ControlTrajectory,
    MetricProfile,
    constant_profile,
    controls_from_path,
    length,
    lower_bound_check,
    parse_profile,
    radial_profile,
)
from .reconstruct import (
    ConnectorCurve,
    DistanceEstimate,
    ShootingProblem,
    connector_lift,
    constant_curvature_connect,
    distance_estimate,
    distance_report,
    minimizing_sequence_convergence,
)
from .sim2 import (
    CircleCoords,
    CovectorState,
    GroupElement,
    SimTrajectory,
    embed_group,
    first_integrals,
    from_circle_coords,
    hamiltonian,
    hamiltonian_flow,
    left_invariant_frame,
    projected_curvature_residual,
    to_circle_coords,
)

__version__ = "0.1.0"
