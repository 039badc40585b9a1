"""use_cases package."""

from .analysis_use_cases import execute_analyze, execute_check, fixture_q_star
from .generation_use_cases import execute_generate
from .simulation_use_cases import equilibrium_from_payload, execute_plot, execute_simulate

__all__ = [
    "equilibrium_from_payload",
    "execute_analyze",
    "execute_check",
    "execute_generate",
    "execute_plot",
    "execute_simulate",
    "fixture_q_star",
]
