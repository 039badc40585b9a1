"""Necessary and sufficient budget-exhaustion conditions without antagonism.

All checks here require nonnegative influence weights and raise
``AssumptionViolatedError`` otherwise. Agent and topic indices are 0-based.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from ..domain.instance import FloatArray, OpinionProfile, ProblemInstance, as_vector
from ..domain.tolerances import DEFAULT_TOLERANCES
from ..equilibrium.best_response import neighbor_preference
from ..exceptions import AssumptionViolatedError, DimensionMismatchError, ZeroInfluenceSumError
from .structure import AgentPartition, multiplier_ratios

NO_ANTAGONISM = "A1 (no antagonistic relations)"

# Agreement of the support ratios: relative part, absolute floor.
RATIO_RTOL = 1e-6
RATIO_ATOL = 1e-8
PREFERENCE_MATCH_TOL = 1e-6
LAMBDA_SLACK = 1e-8


def _require_no_antagonism(inst: ProblemInstance, operation: str) -> None:
    if inst.has_antagonists:
        raise AssumptionViolatedError(NO_ANTAGONISM, operation)


def _check_agent(inst: ProblemInstance, i: int) -> None:
    if not 0 <= i < inst.n:
        raise DimensionMismatchError("agent index", (0, inst.n - 1), i)


@dataclass(frozen=True, eq=False)
class SupportRatios:
    """Ratios ``w~_s (z_s - p~_s) / c_s`` over the support of an opinion."""

    support: tuple[int, ...]
    ratios: FloatArray
    lambda_star: float

    @property
    def spread(self) -> float:
        if self.ratios.size == 0:
            return 0.0
        return float(self.ratios.max() - self.ratios.min())

    @property
    def relative_spread(self) -> float:
        scale = float(np.abs(self.ratios).max()) if self.ratios.size else 0.0
        return self.spread / scale if scale > 0 else 0.0

    def agree(self, rtol: float = RATIO_RTOL, atol: float = RATIO_ATOL) -> bool:
        scale = float(np.abs(self.ratios).max()) if self.ratios.size else 0.0
        return self.spread <= rtol * scale + atol


def support_ratios(
    w_tilde: npt.ArrayLike,
    z_i: npt.ArrayLike,
    p_tilde: npt.ArrayLike,
    c_i: npt.ArrayLike,
    tau: float = DEFAULT_TOLERANCES.activity,
) -> SupportRatios:
    """Evaluate the ratio condition on raw per-topic vectors.

    Coordinates of ``z_i`` at or below ``tau`` are outside the support.
    """
    z = np.asarray(z_i, dtype=np.float64).reshape(-1)
    idx = [int(s) for s in np.flatnonzero(z > tau)]
    ratios = multiplier_ratios(w_tilde, z, p_tilde, c_i, idx)
    return SupportRatios(
        support=tuple(idx),
        ratios=ratios,
        lambda_star=float(ratios.mean()) if ratios.size else float("nan"),
    )


@dataclass(frozen=True, eq=False)
class NecessaryConditionVerdict:
    """Outcome of the necessary conditions for one agent.

    Non-exhausting agents must sit at their neighbor-influenced preference
    (``deviation``); exhausting agents must have equal support ratios with a
    nonpositive common value (``ratios``).
    """

    agent: int
    exhausting: bool
    holds: bool
    deviation: float | None = None
    ratios: SupportRatios | None = None


def check_necessary_conditions(
    inst: ProblemInstance,
    z_star: npt.ArrayLike | OpinionProfile,
    partition: AgentPartition,
) -> list[NecessaryConditionVerdict]:
    """Check every agent of ``partition`` at the equilibrium ``z_star``.

    Raises:
        AssumptionViolatedError: If some influence weight is negative.

    """
    _require_no_antagonism(inst, "check_necessary_conditions")
    vec = as_vector(inst, z_star)
    zm = vec.reshape(inst.n, inst.m)
    verdicts = []
    for i in range(inst.n):
        pref = neighbor_preference(inst, i, vec)
        if partition.is_exhausting(i):
            idx = sorted(partition.support[i])
            ratios = multiplier_ratios(pref.d_tilde, zm[i], pref.p_tilde, inst.costs[i], idx)
            sr = SupportRatios(
                support=tuple(idx),
                ratios=ratios,
                lambda_star=float(ratios.mean()) if ratios.size else float("nan"),
            )
            holds = bool(ratios.size) and sr.agree() and sr.lambda_star <= LAMBDA_SLACK
            verdicts.append(
                NecessaryConditionVerdict(agent=i, exhausting=True, holds=holds, ratios=sr)
            )
        else:
            deviation = float(np.linalg.norm(zm[i] - pref.p_tilde))
            verdicts.append(
                NecessaryConditionVerdict(
                    agent=i,
                    exhausting=False,
                    holds=deviation <= PREFERENCE_MATCH_TOL,
                    deviation=deviation,
                )
            )
    return verdicts


@dataclass(frozen=True, eq=False)
class NotExhaustVerdict:
    """Upper estimate ``upsilon`` of an agent's opinion and whether it fits the budget."""

    agent: int
    upsilon: FloatArray
    spend: float
    budget: float

    @property
    def guaranteed(self) -> bool:
        return self.spend < self.budget


def sufficient_not_exhaust(inst: ProblemInstance, i: int) -> NotExhaustVerdict:
    """Sufficient condition for agent ``i`` to leave budget unspent at every equilibrium.

    ``upsilon_s = (w_s p_s + sum_k a_ik gamma_k B_k) / w~_s`` with
    ``gamma_k = 1 / min_l c_k^l`` bounds every equilibrium opinion of the
    agent; if it is affordable, the agent cannot exhaust its budget.

    Raises:
        AssumptionViolatedError: If some influence weight is negative.

    """
    _require_no_antagonism(inst, "sufficient_not_exhaust")
    _check_agent(inst, i)
    a = inst.influence[i]
    gamma = 1.0 / inst.costs.min(axis=1)
    d_tilde = inst.pref_weights[i] + a.sum()
    pull = float(a @ (gamma * inst.budgets))
    upsilon = (inst.pref_weights[i] * inst.preferences[i] + pull) / d_tilde
    return NotExhaustVerdict(
        agent=i,
        upsilon=upsilon,
        spend=float(inst.costs[i] @ upsilon),
        budget=float(inst.budgets[i]),
    )


@dataclass(frozen=True)
class ExhaustVerdict:
    """Threshold test on one topic; ``guaranteed`` means the agent exhausts its budget."""

    agent: int
    topic: int
    threshold: float
    q_value: float

    @property
    def guaranteed(self) -> bool:
        return self.q_value > self.threshold


def _q_matrix(inst: ProblemInstance, q_star: npt.ArrayLike | OpinionProfile) -> FloatArray:
    return as_vector(inst, q_star).reshape(inst.n, inst.m)


def exhaust_threshold(
    influence_row: npt.ArrayLike,
    q_topic: npt.ArrayLike,
    budget: float,
    cost: float,
) -> float:
    """``sum_k a_k q_k / sum_k a_k + B / c`` for one agent and topic.

    ``influence_row`` must have a zero entry for the agent itself.
    """
    a = np.asarray(influence_row, dtype=np.float64)
    return float(a @ np.asarray(q_topic, dtype=np.float64)) / float(a.sum()) + budget / cost


def sufficient_exhaust(
    inst: ProblemInstance,
    i: int,
    j: int,
    q_star: npt.ArrayLike | OpinionProfile,
) -> ExhaustVerdict:
    """Sufficient condition, on topic ``j``, for agent ``i`` to exhaust its budget.

    Raises:
        AssumptionViolatedError: If some influence weight is negative.
        ZeroInfluenceSumError: If agent ``i`` has no neighbors.

    """
    _require_no_antagonism(inst, "sufficient_exhaust")
    _check_agent(inst, i)
    if not 0 <= j < inst.m:
        raise DimensionMismatchError("topic index", (0, inst.m - 1), j)
    a = inst.influence[i]
    if a.sum() == 0:
        raise ZeroInfluenceSumError(i)
    q = _q_matrix(inst, q_star)
    return ExhaustVerdict(
        agent=i,
        topic=j,
        threshold=exhaust_threshold(a, q[:, j], float(inst.budgets[i]), float(inst.costs[i, j])),
        q_value=float(q[i, j]),
    )


def sufficient_exhaust_any(
    inst: ProblemInstance,
    i: int,
    q_star: npt.ArrayLike | OpinionProfile,
) -> list[ExhaustVerdict]:
    """Per-topic verdicts for agent ``i``; the agent exhausts if any fires."""
    return [sufficient_exhaust(inst, i, j, q_star) for j in range(inst.m)]


def any_guaranteed(verdicts: Sequence[ExhaustVerdict]) -> bool:
    return any(v.guaranteed for v in verdicts)
