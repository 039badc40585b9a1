"""Application services shared by the CLI use cases."""

from .acceptance import AcceptanceRunner, SweepPlan
from .analysis_service import AnalysisOutcome, analyze_instance
from .generator import generate_config, generate_instance, regime_holds
from .reporting import analysis_report, simulation_summary
from .run_setup import (
    initial_profile,
    instance_from_config,
    random_feasible_profile,
    sim_config_from,
)

__all__ = [
    "AcceptanceRunner",
    "AnalysisOutcome",
    "SweepPlan",
    "analysis_report",
    "analyze_instance",
    "generate_config",
    "generate_instance",
    "initial_profile",
    "instance_from_config",
    "random_feasible_profile",
    "regime_holds",
    "sim_config_from",
    "simulation_summary",
]
