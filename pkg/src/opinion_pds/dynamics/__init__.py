"""dynamics package."""

from .diagnostics import (
    better_response_margins,
    distance_curve,
    lyapunov_slack_constant,
    lyapunov_violations,
    monotone_violations,
    self_convergence,
)
from .integrator import (
    Scheme,
    SimConfig,
    Termination,
    Trajectory,
    TrajectorySample,
    residual,
    simulate,
    step,
)

__all__ = [
    "Scheme",
    "SimConfig",
    "Termination",
    "Trajectory",
    "TrajectorySample",
    "better_response_margins",
    "distance_curve",
    "lyapunov_slack_constant",
    "lyapunov_violations",
    "monotone_violations",
    "residual",
    "self_convergence",
    "simulate",
    "step",
]
