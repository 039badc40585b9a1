"""analysis package."""

from .lemmas import (
    ExhaustVerdict,
    NecessaryConditionVerdict,
    NotExhaustVerdict,
    SupportRatios,
    any_guaranteed,
    check_necessary_conditions,
    exhaust_threshold,
    sufficient_exhaust,
    sufficient_exhaust_any,
    sufficient_not_exhaust,
    support_ratios,
)
from .structure import (
    AgentPartition,
    RelationProfile,
    classify,
    gerschgorin_discs,
    multiplier_ratios,
    partition_agents,
)

__all__ = [
    "AgentPartition",
    "ExhaustVerdict",
    "NecessaryConditionVerdict",
    "NotExhaustVerdict",
    "RelationProfile",
    "SupportRatios",
    "any_guaranteed",
    "check_necessary_conditions",
    "classify",
    "exhaust_threshold",
    "gerschgorin_discs",
    "multiplier_ratios",
    "partition_agents",
    "sufficient_exhaust",
    "sufficient_exhaust_any",
    "sufficient_not_exhaust",
    "support_ratios",
]
