"""Simulation and analysis toolkit for the three-body problem on curved surfaces.

The surface is the sphere (kappa > 0) or the upper hyperboloid sheet
(kappa < 0) of curvature kappa.  The package exposes the full constrained
equations of motion, the planar reduced systems of the rotating triangle
and line families, exact fixed-point counting and classification, phase
portrait sweeps, and a verification suite tying everything together.
"""
from ._backend import backend_name
from .geometry import (
    Curvature,
    signed_dot,
    signed_cross,
    manifold_residual,
    project_position,
    project_velocity,
)
from .dynamics import (
    Body,
    SystemState,
    StepControl,
    TrajectorySeries,
    ConservedLedger,
    SingularConfiguration,
    StepUnderflow,
    T_END,
    COLLISION_APPROACH,
    STEP_BUDGET,
    BOUNDARY_APPROACH,
    ESCAPE,
    force_function,
    force_gradient,
    accelerations,
    energy,
    angular_momentum,
    integrate,
)
from .homographic import (
    LAGRANGIAN,
    EULERIAN,
    REDUCED_KINDS,
    DomainError,
    ReducedState,
    HyperbolicState,
    ReducedSeries,
    embed_lagrangian,
    embed_eulerian,
    embed_hyperbolic,
    lagrangian_rhs,
    eulerian_rhs,
    integrate_reduced,
    lagrangian_residuals,
    eulerian_residuals,
    unequal_mass_residuals,
    hyperbolic_residuals,
    hyperbolic_re_rate,
)
from .fixedpoints import (
    Polynomial,
    FixedPointRecord,
    NotAFixedPoint,
    CENTER,
    SADDLE,
    DEGENERATE,
    BOUNDARY_NONHYPERBOLIC,
    INTERIOR,
    EQUATOR_BOUNDARY,
    lagrangian_polynomial,
    eulerian_polynomial,
    sturm_count,
    positive_roots,
    resultant,
    classify,
    lagrangian_fixed_points,
    eulerian_fixed_points,
    nullcline_nu2,
    slope,
    lagrangian_threshold,
    eulerian_existence,
)
from .flowatlas import (
    ORBIT_CLASSES,
    INVALID,
    EQUILIBRIUM,
    RELATIVE_EQUILIBRIUM,
    HOMOTHETIC,
    PERIODIC,
    HOMOCLINIC_CANDIDATE,
    UNBOUNDED,
    EQUATOR_ASYMPTOTIC,
    PortraitData,
    classify_trajectory,
    detect_period,
    sweep,
)
from .verification import CheckResult, ALL_CHECKS, run_checks

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "__version__",
    "Curvature",
    "signed_dot",
    "signed_cross",
    "manifold_residual",
    "project_position",
    "project_velocity",
    "Body",
    "SystemState",
    "StepControl",
    "TrajectorySeries",
    "ConservedLedger",
    "SingularConfiguration",
    "StepUnderflow",
    "T_END",
    "COLLISION_APPROACH",
    "STEP_BUDGET",
    "BOUNDARY_APPROACH",
    "ESCAPE",
    "force_function",
    "force_gradient",
    "accelerations",
    "energy",
    "angular_momentum",
    "integrate",
    "LAGRANGIAN",
    "EULERIAN",
    "REDUCED_KINDS",
    "DomainError",
    "ReducedState",
    "HyperbolicState",
    "ReducedSeries",
    "embed_lagrangian",
    "embed_eulerian",
    "embed_hyperbolic",
    "lagrangian_rhs",
    "eulerian_rhs",
    "integrate_reduced",
    "lagrangian_residuals",
    "eulerian_residuals",
    "unequal_mass_residuals",
    "hyperbolic_residuals",
    "hyperbolic_re_rate",
    "Polynomial",
    "FixedPointRecord",
    "NotAFixedPoint",
    "CENTER",
    "SADDLE",
    "DEGENERATE",
    "BOUNDARY_NONHYPERBOLIC",
    "INTERIOR",
    "EQUATOR_BOUNDARY",
    "lagrangian_polynomial",
    "eulerian_polynomial",
    "sturm_count",
    "positive_roots",
    "resultant",
    "classify",
    "lagrangian_fixed_points",
    "eulerian_fixed_points",
    "nullcline_nu2",
    "slope",
    "lagrangian_threshold",
    "eulerian_existence",
    "ORBIT_CLASSES",
    "INVALID",
    "EQUILIBRIUM",
    "RELATIVE_EQUILIBRIUM",
    "HOMOTHETIC",
    "PERIODIC",
    "HOMOCLINIC_CANDIDATE",
    "UNBOUNDED",
    "EQUATOR_ASYMPTOTIC",
    "PortraitData",
    "classify_trajectory",
    "detect_period",
    "sweep",
    "CheckResult",
    "ALL_CHECKS",
    "run_checks",
]
