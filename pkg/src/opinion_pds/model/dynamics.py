"""Closed-form model quantities: vector field, Jacobian, utility and potential."""

from __future__ import annotations

from enum import Enum
from functools import lru_cache

import numpy as np
import numpy.typing as npt
from scipy import linalg

from ..domain.instance import (
    FloatArray,
    OpinionProfile,
    ProblemInstance,
    SystemMatrices,
    as_vector,
)
from ..exceptions import DimensionMismatchError

ProfileLike = npt.ArrayLike | OpinionProfile


def signed_laplacian(influence: npt.ArrayLike) -> FloatArray:
    """``L = diag(A 1) - A`` for a possibly signed influence matrix."""
    a = np.asarray(influence, dtype=np.float64)
    return np.diag(a.sum(axis=1)) - a


@lru_cache(maxsize=256)
def system_matrices(inst: ProblemInstance) -> SystemMatrices:
    """Laplacian, Jacobian ``J = D + L (x) I_m`` and drift ``Dp`` of an instance."""
    lap = signed_laplacian(inst.influence)
    d = inst.pref_weights.reshape(-1)
    jac = np.diag(d) + np.kron(lap, np.eye(inst.m))
    drift = d * inst.preferences.reshape(-1)
    for arr in (lap, jac, drift):
        arr.setflags(write=False)
    return SystemMatrices(laplacian=lap, jacobian=jac, drift=drift)


@lru_cache(maxsize=256)
def jacobian_spectrum(inst: ProblemInstance) -> FloatArray:
    """Ascending eigenvalues of the symmetric Jacobian."""
    eig = linalg.eigvalsh(system_matrices(inst).jacobian)
    eig.setflags(write=False)
    return eig


def jacobian_norm(inst: ProblemInstance) -> float:
    """Spectral norm ``||J||``."""
    eig = jacobian_spectrum(inst)
    return float(max(abs(eig[0]), abs(eig[-1])))


def lipschitz_constant(inst: ProblemInstance) -> float:
    """``alpha = max(||J||, ||Dp||)`` so that ``||f(z)|| <= alpha (1 + ||z||)``."""
    return max(jacobian_norm(inst), float(np.linalg.norm(system_matrices(inst).drift)))


def max_stable_step(inst: ProblemInstance) -> float:
    """Default upper bound ``1 / (2 ||J||)`` on the integration step."""
    return 0.5 / jacobian_norm(inst)


def vector_field(inst: ProblemInstance, z: ProfileLike) -> FloatArray:
    """``f(z) = D(z - p) + (L (x) I_m) z``.

    Agent ``i``'s slice is ``D_i (z_i - p_i) - sum_k a_ik (z_k - z_i)``, the
    negative gradient of its utility with respect to its own opinion.
    """
    zm = as_vector(inst, z).reshape(inst.n, inst.m)
    lap = system_matrices(inst).laplacian
    field = inst.pref_weights * (zm - inst.preferences) + lap @ zm
    return field.reshape(-1)


def unconstrained_field(inst: ProblemInstance, z: ProfileLike) -> FloatArray:
    """Right-hand side ``-f(z)`` of the dynamics without budget constraints."""
    return -vector_field(inst, z)


def utility(inst: ProblemInstance, i: int, z: ProfileLike) -> float:
    """``U_i(z) = -1/2 ||z_i - p_i||^2_{D_i} - sum_k a_ik/2 ||z_k - z_i||^2``."""
    if not 0 <= i < inst.n:
        raise DimensionMismatchError("agent index", (0, inst.n - 1), i)
    zm = as_vector(inst, z).reshape(inst.n, inst.m)
    own = zm[i] - inst.preferences[i]
    pref_term = 0.5 * float(np.dot(inst.pref_weights[i] * own, own))
    gaps = zm - zm[i]
    social = 0.5 * float(np.dot(inst.influence[i], np.einsum("kj,kj->k", gaps, gaps)))
    return -pref_term - social


def potential(inst: ProblemInstance, z: ProfileLike) -> float:
    """``W(z) = -1/2 z'Jz + z'Dp - 1/2 p'Dp``."""
    vec = as_vector(inst, z)
    mats = system_matrices(inst)
    p = inst.preferences.reshape(-1)
    return float(
        -0.5 * vec @ mats.jacobian @ vec + vec @ mats.drift - 0.5 * p @ mats.drift
    )


def lyapunov(inst: ProblemInstance, z: ProfileLike) -> float:
    """``V(z) = -W(z)``, non-increasing along solutions."""
    return -potential(inst, z)


class Definiteness(str, Enum):
    POSITIVE_DEFINITE = "positive-definite"
    POSITIVE_SEMIDEFINITE = "positive-semidefinite"
    INDEFINITE = "indefinite"


def jacobian_definiteness(inst: ProblemInstance, rel_tol: float = 1e-10) -> Definiteness:
    """Classify ``J`` by its smallest eigenvalue against ``rel_tol ||J||``.

    Eigenvalues within the tolerance of zero count as zero, so a nearly
    singular ``J`` is reported semidefinite.
    """
    eig = jacobian_spectrum(inst)
    threshold = rel_tol * jacobian_norm(inst)
    if eig[0] > threshold:
        return Definiteness.POSITIVE_DEFINITE
    if eig[0] >= -threshold:
        return Definiteness.POSITIVE_SEMIDEFINITE
    return Definiteness.INDEFINITE
