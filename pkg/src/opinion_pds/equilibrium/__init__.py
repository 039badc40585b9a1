"""equilibrium package."""

from .best_response import (
    NeighborPreference,
    best_response,
    best_response_kkt,
    neighbor_preference,
)
from .solver import (
    EquilibriumReport,
    Method,
    Uniqueness,
    certify,
    choose_method,
    default_limit_config,
    solve_equilibrium,
    unconstrained_equilibrium,
    verify_nash,
    verify_vi,
)

__all__ = [
    "EquilibriumReport",
    "Method",
    "NeighborPreference",
    "Uniqueness",
    "best_response",
    "best_response_kkt",
    "certify",
    "choose_method",
    "default_limit_config",
    "neighbor_preference",
    "solve_equilibrium",
    "unconstrained_equilibrium",
    "verify_nash",
    "verify_vi",
]
