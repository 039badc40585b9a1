"""Best responses through the neighbor-influenced preference.

Given the others' opinions, agent ``i``'s utility rewrites as

    U_i(z_i, z_-i) = -1/2 ||z_i - p~_i||^2_{D~_i} - Delta_i

with ``D~_i = D_i + (sum_k a_ik) I`` and
``p~_i = D~_i^{-1} (D_i p_i + sum_k a_ik z_k)``. Its best response is
therefore the ``D~_i``-weighted projection of ``p~_i`` onto its polytope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from ..domain.instance import FloatArray, OpinionProfile, ProblemInstance
from ..exceptions import DimensionMismatchError, NonpositiveDTildeError
from ..geometry.polytope import feasible_set
from ..geometry.projection import WeightedProjection, project_weighted_kkt


@dataclass(frozen=True, eq=False)
class NeighborPreference:
    """``D~_i`` diagonal, ``p~_i`` and the offset ``Delta_i`` for one agent."""

    d_tilde: FloatArray
    p_tilde: FloatArray
    delta: float


def others_matrix(
    inst: ProblemInstance, i: int, z_minus_i: npt.ArrayLike | OpinionProfile
) -> FloatArray:
    """Opinions as ``(n, m)`` with row ``i`` zeroed.

    Accepts a full profile (row ``i`` is ignored) or the ``(n - 1) m``
    opinions of the other agents.
    """
    if not 0 <= i < inst.n:
        raise DimensionMismatchError("agent index", (0, inst.n - 1), i)
    raw = z_minus_i.z if isinstance(z_minus_i, OpinionProfile) else z_minus_i
    arr = np.asarray(raw, dtype=np.float64).reshape(-1)
    out = np.zeros((inst.n, inst.m))
    if arr.size == inst.dim:
        out[:] = arr.reshape(inst.n, inst.m)
    elif arr.size == (inst.n - 1) * inst.m:
        rest = arr.reshape(inst.n - 1, inst.m)
        out[:i] = rest[:i]
        out[i + 1 :] = rest[i:]
    else:
        raise DimensionMismatchError("z_minus_i", (inst.dim, (inst.n - 1) * inst.m), arr.size)
    out[i] = 0.0
    return out


def neighbor_preference(
    inst: ProblemInstance, i: int, z_minus_i: npt.ArrayLike | OpinionProfile
) -> NeighborPreference:
    """Effective weights, neighbor-influenced preference and offset of agent ``i``.

    Raises:
        NonpositiveDTildeError: If some effective weight is not positive.

    """
    others = others_matrix(inst, i, z_minus_i)
    a = inst.influence[i]
    w, p = inst.pref_weights[i], inst.preferences[i]
    d_tilde = w + a.sum()
    if not np.all(d_tilde > 0):
        raise NonpositiveDTildeError(i, d_tilde.tolist())
    p_tilde = (w * p + a @ others) / d_tilde
    sq_norms = np.einsum("kj,kj->k", others, others)
    delta = 0.5 * (float(w @ p**2) + float(a @ sq_norms) - float(d_tilde @ p_tilde**2))
    return NeighborPreference(d_tilde=d_tilde, p_tilde=p_tilde, delta=delta)


def best_response_kkt(
    inst: ProblemInstance, i: int, z_minus_i: npt.ArrayLike | OpinionProfile
) -> WeightedProjection:
    """Best response of agent ``i`` with the multipliers of its projection."""
    pref = neighbor_preference(inst, i, z_minus_i)
    return project_weighted_kkt(feasible_set(inst)[i], pref.d_tilde, pref.p_tilde)


def best_response(
    inst: ProblemInstance, i: int, z_minus_i: npt.ArrayLike | OpinionProfile
) -> FloatArray:
    """``argmax_{z_i in K_i} U_i(z_i, z_-i)``."""
    return best_response_kkt(inst, i, z_minus_i).point
