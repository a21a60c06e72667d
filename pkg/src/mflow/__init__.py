"""Best-approximation projection dynamics for coupled monotone inclusions.

A small numpy library around one construction: a two-cut projection of an
anchor point drives both an autonomous flow and, under unit-step Euler
discretization, a strongly convergent best-approximation iteration for
Kuhn-Tucker pairs of the inclusion ``0 in A p + L* B L p``.
"""

from .diagnostics import (
    AssumptionReport,
    check_cap_invariance,
    check_outward_drift,
    check_projection_conditions,
    check_strict_drift,
    check_unique_zero,
    convergence_report,
    cut_pair_builder,
    sample_cap,
)
from .dynamics import (
    NonFiniteError,
    Trajectory,
    VectorField,
    best_approx_iterate,
    build_field,
    euler_defect,
    euler_eval,
    euler_nodes,
    integrate_field,
    projection_field,
    solve,
)
from .geometry import (
    Cap,
    EmptyIntersectionError,
    GEOM_TOL,
    HalfSpace,
    INSIDE_D_ONLY,
    INSIDE_DHAT,
    OUTSIDE,
    cap_membership,
    fejer_slack,
    halfspace_of,
    haugazeau_projection,
    project_halfspace,
    project_onto_halfspaces,
)
from .operators import (
    BallNormalCone,
    BoxNormalCone,
    L1,
    LinearMap,
    LinearMonotone,
    MonotoneOperator,
    Quadratic,
    Zero,
    operator_from_config,
    operator_library,
)
from .problems import (
    NamedInstance,
    box_flow,
    builtin_tags,
    get_instance,
    lasso_instance,
    lens_drift,
    quadratic_instance,
)
from .space import PDPoint, as_vector, axpy, inner, norm
from .splitting import (
    KTStep,
    ProblemInstance,
    fixed_point_operator,
    kt_operator,
    kt_residual,
)

__version__ = "0.1.0"

__all__ = [
    "AssumptionReport",
    "BallNormalCone",
    "BoxNormalCone",
    "Cap",
    "EmptyIntersectionError",
    "GEOM_TOL",
    "HalfSpace",
    "INSIDE_DHAT",
    "INSIDE_D_ONLY",
    "KTStep",
    "L1",
    "LinearMap",
    "LinearMonotone",
    "MonotoneOperator",
    "NamedInstance",
    "NonFiniteError",
    "OUTSIDE",
    "PDPoint",
    "ProblemInstance",
    "Quadratic",
    "Trajectory",
    "VectorField",
    "Zero",
    "as_vector",
    "axpy",
    "best_approx_iterate",
    "box_flow",
    "build_field",
    "builtin_tags",
    "cap_membership",
    "check_cap_invariance",
    "check_outward_drift",
    "check_projection_conditions",
    "check_strict_drift",
    "check_unique_zero",
    "convergence_report",
    "cut_pair_builder",
    "euler_defect",
    "euler_eval",
    "euler_nodes",
    "fejer_slack",
    "fixed_point_operator",
    "get_instance",
    "halfspace_of",
    "haugazeau_projection",
    "inner",
    "integrate_field",
    "kt_operator",
    "kt_residual",
    "lasso_instance",
    "lens_drift",
    "norm",
    "operator_from_config",
    "operator_library",
    "project_halfspace",
    "project_onto_halfspaces",
    "projection_field",
    "quadratic_instance",
    "sample_cap",
    "solve",
]
