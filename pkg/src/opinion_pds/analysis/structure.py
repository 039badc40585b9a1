"""Relation classes of the influence network, definiteness of the Jacobian
and the budget-exhaustion partition of an equilibrium."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from ..domain.instance import FloatArray, OpinionProfile, ProblemInstance, as_vector
from ..domain.tolerances import DEFAULT_TOLERANCES, Tolerances
from ..equilibrium.best_response import neighbor_preference
from ..exceptions import NonpositiveDTildeError
from ..geometry.polytope import feasible_set
from ..model.dynamics import Definiteness, jacobian_definiteness, jacobian_spectrum


@dataclass(frozen=True, eq=False)
class RelationProfile:
    """Neighbor sets, assumption classes and definiteness tests of an instance.

    ``a1``: no agent has an enemy (negative weight).
    ``a2``: every agent's smallest preference weight exceeds twice the
    total magnitude of its enemies' weights.
    ``a3``: every agent's smallest preference weight plus its total influence
    is nonnegative.
    """

    enemies: tuple[frozenset[int], ...]
    friends: tuple[frozenset[int], ...]
    a1: bool
    a2: bool
    a3: bool
    jacobian_definiteness: Definiteness
    gerschgorin_pd: bool
    min_eigenvalue: float
    gerschgorin_lower: FloatArray

    @property
    def neighbors(self) -> tuple[frozenset[int], ...]:
        return tuple(e | f for e, f in zip(self.enemies, self.friends, strict=True))

    @property
    def class_flags(self) -> dict[str, bool]:
        return {"A1": self.a1, "A2": self.a2, "A3": self.a3}

    @property
    def psd(self) -> bool:
        return self.jacobian_definiteness is not Definiteness.INDEFINITE

    def implications_hold(self) -> bool:
        """A1 implies A2 implies A3, and Gerschgorin implies positive definite."""
        chain = (not self.a1 or self.a2) and (not self.a2 or self.a3)
        disc = not self.gerschgorin_pd or (
            self.jacobian_definiteness is Definiteness.POSITIVE_DEFINITE
        )
        return chain and disc


def gerschgorin_discs(inst: ProblemInstance) -> tuple[FloatArray, FloatArray]:
    """Centers ``w_ij + sum_k a_ik`` and radii ``sum_k |a_ik|`` as ``(n, m)`` arrays."""
    a = inst.influence
    centers = inst.pref_weights + a.sum(axis=1)[:, None]
    radii = np.broadcast_to(np.abs(a).sum(axis=1)[:, None], centers.shape).copy()
    return centers, radii


def classify(inst: ProblemInstance) -> RelationProfile:
    """Evaluate the relation classes and definiteness tests of ``inst``."""
    a = inst.influence
    off = ~np.eye(inst.n, dtype=bool)
    enemies = tuple(
        frozenset(int(k) for k in np.flatnonzero((a[i] < 0) & off[i])) for i in range(inst.n)
    )
    friends = tuple(
        frozenset(int(k) for k in np.flatnonzero((a[i] > 0) & off[i])) for i in range(inst.n)
    )

    min_w = inst.pref_weights.min(axis=1)
    enemy_mass = np.where(a < 0, -a, 0.0).sum(axis=1)
    a1 = not any(enemies)
    a2 = bool(np.all(min_w > 2.0 * enemy_mass))
    a3 = bool(np.all(min_w + a.sum(axis=1) >= 0.0))

    centers, radii = gerschgorin_discs(inst)
    lower = centers - radii
    return RelationProfile(
        enemies=enemies,
        friends=friends,
        a1=a1,
        a2=a2,
        a3=a3,
        jacobian_definiteness=jacobian_definiteness(inst),
        gerschgorin_pd=bool(np.all(lower > 0)),
        min_eigenvalue=float(jacobian_spectrum(inst)[0]),
        gerschgorin_lower=lower,
    )


@dataclass(frozen=True, eq=False)
class AgentPartition:
    """Budget-exhausting and non-exhausting agents at an equilibrium.

    ``lambda_star`` maps each exhausting agent to its support-averaged
    multiplier estimate; agents whose effective weights are not positive
    have no estimate.
    """

    exhausting: tuple[int, ...]
    non_exhausting: tuple[int, ...]
    lambda_star: dict[int, float]
    support: tuple[frozenset[int], ...]

    def is_exhausting(self, i: int) -> bool:
        return i in self.exhausting


def multiplier_ratios(
    w_tilde: npt.ArrayLike,
    z_i: npt.ArrayLike,
    p_tilde: npt.ArrayLike,
    c_i: npt.ArrayLike,
    idx: list[int],
) -> FloatArray:
    """``w~_s (z_s - p~_s) / c_s`` for ``s`` in ``idx``."""
    sel = np.asarray(idx, dtype=np.intp)
    w, z, p, c = (np.asarray(v, dtype=np.float64)[sel] for v in (w_tilde, z_i, p_tilde, c_i))
    return w * (z - p) / c


def partition_agents(
    inst: ProblemInstance,
    z_star: npt.ArrayLike | OpinionProfile,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> AgentPartition:
    """Split agents by budget activity at ``z_star``.

    Raises:
        InfeasiblePointError: If ``z_star`` is not feasible.

    """
    vec = as_vector(inst, z_star)
    fs = feasible_set(inst)
    fs.require_feasible(vec, tol)
    zm = vec.reshape(inst.n, inst.m)
    active = fs.active_sets(vec, tol)

    support = tuple(
        frozenset(int(s) for s in np.flatnonzero(zm[i] > tol.activity)) for i in range(inst.n)
    )
    exhausting = tuple(i for i, act in enumerate(active) if act.budget_active)
    lambda_star: dict[int, float] = {}
    for i in exhausting:
        try:
            pref = neighbor_preference(inst, i, vec)
        except NonpositiveDTildeError:
            continue
        idx = sorted(support[i])
        if idx:
            lambda_star[i] = float(
                multiplier_ratios(pref.d_tilde, zm[i], pref.p_tilde, inst.costs[i], idx).mean()
            )
    return AgentPartition(
        exhausting=exhausting,
        non_exhausting=tuple(i for i in range(inst.n) if i not in exhausting),
        lambda_star=lambda_star,
        support=support,
    )
