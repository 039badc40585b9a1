"""domain package."""

from .instance import (
    OpinionProfile,
    ProblemInstance,
    SystemMatrices,
    build_instance,
    connected_components,
    split_components,
)
from .ports import (
    ConfigRepositoryPort,
    PlotRendererPort,
    ReportRepositoryPort,
    TrajectoryRepositoryPort,
)
from .tolerances import DEFAULT_TOLERANCES, Tolerances

__all__ = [
    "DEFAULT_TOLERANCES",
    "ConfigRepositoryPort",
    "OpinionProfile",
    "PlotRendererPort",
    "ProblemInstance",
    "ReportRepositoryPort",
    "SystemMatrices",
    "Tolerances",
    "TrajectoryRepositoryPort",
    "build_instance",
    "connected_components",
    "split_components",
]
