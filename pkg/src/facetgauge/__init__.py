"""Exact strength indicators for facets of combinatorial polytopes.

The package computes extreme point ratios, centroid distances and
inter-facet angles for facet classes of the symmetric traveling
salesman polytope, the spanning tree polytope and the spanning
hypertree polytope, in exact rational arithmetic with a log-domain
fallback for large instances, and cross-checks every closed form
against brute-force vertex enumeration and convex projection.
"""

__version__ = "0.1.0"

from .exactnum import (
    ExactScalar,
    LogScalar,
    RootExpr,
    exact_to_float,
    log_ratio,
)
from .combinatorics import (
    bell,
    binomial,
    edge_attach,
    moment_shifted,
    poisson_moment,
    stirling2,
)
from .geometry import (
    Hyperplane,
    HullDistanceResult,
    ResourceGuardError,
    hull_distance,
    interior_angle_cosine,
    weak_cd,
)
from .enumeration import (
    EdgeIndexer,
    ExtremePointSet,
    build_facet,
    count_extreme_points,
    enumerate_extreme_points,
    iter_extreme_points,
    survey,
)
from .analysis import (
    disagreement_matrix,
    reflect_compare,
    subtour_value,
    sweep,
    weakest_subtour,
)
from .validation import CheckResult, run_checks, select_checks
from . import closedforms

__all__ = [
    "ExactScalar",
    "LogScalar",
    "RootExpr",
    "exact_to_float",
    "log_ratio",
    "binomial",
    "stirling2",
    "bell",
    "poisson_moment",
    "moment_shifted",
    "edge_attach",
    "Hyperplane",
    "HullDistanceResult",
    "ResourceGuardError",
    "hull_distance",
    "interior_angle_cosine",
    "weak_cd",
    "EdgeIndexer",
    "ExtremePointSet",
    "build_facet",
    "count_extreme_points",
    "enumerate_extreme_points",
    "iter_extreme_points",
    "survey",
    "subtour_value",
    "sweep",
    "weakest_subtour",
    "disagreement_matrix",
    "reflect_compare",
    "CheckResult",
    "select_checks",
    "run_checks",
    "closedforms",
    "__version__",
]
