"""geometry package."""

from .oracle import (
    enumerate_cone_projection,
    enumerate_euclidean_projection,
    enumerate_weighted_projection,
)
from .polytope import ActiveSet, AgentPolytope, FeasibleSet, active_set, feasible_set
from .projection import (
    WeightedProjection,
    project_euclidean,
    project_profile,
    project_profile_tangent_cone,
    project_tangent_cone,
    project_weighted,
    project_weighted_kkt,
)

__all__ = [
    "ActiveSet",
    "AgentPolytope",
    "FeasibleSet",
    "WeightedProjection",
    "active_set",
    "enumerate_cone_projection",
    "enumerate_euclidean_projection",
    "enumerate_weighted_projection",
    "feasible_set",
    "project_euclidean",
    "project_profile",
    "project_profile_tangent_cone",
    "project_tangent_cone",
    "project_weighted",
    "project_weighted_kkt",
]
