"""model package."""

from .dynamics import (
    Definiteness,
    jacobian_definiteness,
    jacobian_norm,
    jacobian_spectrum,
    lipschitz_constant,
    lyapunov,
    max_stable_step,
    potential,
    signed_laplacian,
    system_matrices,
    unconstrained_field,
    utility,
    vector_field,
)

__all__ = [
    "Definiteness",
    "jacobian_definiteness",
    "jacobian_norm",
    "jacobian_spectrum",
    "lipschitz_constant",
    "lyapunov",
    "max_stable_step",
    "potential",
    "signed_laplacian",
    "system_matrices",
    "unconstrained_field",
    "utility",
    "vector_field",
]
