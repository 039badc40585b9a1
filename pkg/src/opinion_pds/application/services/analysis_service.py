"""Structural analysis of one instance: relations, equilibrium, partition and lemma verdicts."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from ...analysis.lemmas import (
    ExhaustVerdict,
    NecessaryConditionVerdict,
    NotExhaustVerdict,
    check_necessary_conditions,
    sufficient_exhaust_any,
    sufficient_not_exhaust,
)
from ...analysis.structure import AgentPartition, RelationProfile, classify, partition_agents
from ...domain.instance import FloatArray, ProblemInstance
from ...domain.tolerances import DEFAULT_TOLERANCES, Tolerances
from ...equilibrium.solver import EquilibriumReport, Method, solve_equilibrium, unconstrained_equilibrium
from ...exceptions import SingularJacobianError, ZeroInfluenceSumError
from ...logging import get_logger

logger = get_logger(__name__)

# q* >= 0 holds exactly without antagonism; this absorbs roundoff.
Q_STAR_FLOOR = -1e-12


@dataclass
class AnalysisOutcome:
    """Domain results of one analysis run."""

    relations: RelationProfile
    q_star: FloatArray | None
    q_star_source: str
    equilibrium: EquilibriumReport
    partition: AgentPartition
    necessary: list[NecessaryConditionVerdict] | None = None
    not_exhaust: list[NotExhaustVerdict] | None = None
    exhaust: list[ExhaustVerdict] | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def q_star_nonnegative(self) -> bool | None:
        if self.q_star is None:
            return None
        return bool(self.q_star.min() >= Q_STAR_FLOOR)

    def inconsistencies(self) -> list[str]:
        """Fired sufficient conditions that contradict the partition (0-based agents)."""
        problems = []
        for v in self.not_exhaust or []:
            if v.guaranteed and self.partition.is_exhausting(v.agent):
                problems.append(f"agent {v.agent + 1} guaranteed non-exhausting but exhausts")
        for e in self.exhaust or []:
            if e.guaranteed and not self.partition.is_exhausting(e.agent):
                problems.append(
                    f"agent {e.agent + 1} guaranteed exhausting on topic {e.topic + 1} but does not exhaust"
                )
        return problems


def _unconstrained(
    inst: ProblemInstance, override: npt.ArrayLike | None, notes: list[str]
) -> tuple[FloatArray | None, str]:
    if override is not None:
        return np.asarray(override, dtype=np.float64).reshape(-1), "fixture"
    try:
        return unconstrained_equilibrium(inst), "computed"
    except SingularJacobianError as exc:
        notes.append(exc.message)
        return None, "unavailable"


def analyze_instance(
    inst: ProblemInstance,
    *,
    method: Method | str | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
    q_star_override: npt.ArrayLike | None = None,
) -> AnalysisOutcome:
    """Classify ``inst``, solve for an equilibrium and evaluate the exhaustion conditions.

    The lemma checks run only without antagonism; otherwise their fields stay
    ``None`` and a note says why.
    """
    notes: list[str] = []
    relations = classify(inst)
    q_star, source = _unconstrained(inst, q_star_override, notes)
    eq = solve_equilibrium(inst, method, tol=tol)
    partition = partition_agents(inst, eq.point, tol=tol)
    outcome = AnalysisOutcome(
        relations=relations,
        q_star=q_star,
        q_star_source=source,
        equilibrium=eq,
        partition=partition,
        notes=notes,
    )
    if not relations.a1:
        notes.append("exhaustion conditions require nonnegative influence weights; skipped")
        return outcome

    outcome.necessary = check_necessary_conditions(inst, eq.point, partition)
    outcome.not_exhaust = [sufficient_not_exhaust(inst, i) for i in range(inst.n)]
    if q_star is None:
        notes.append("exhaustion thresholds need q*; skipped")
        return outcome
    exhaust: list[ExhaustVerdict] = []
    for i in range(inst.n):
        try:
            exhaust.extend(sufficient_exhaust_any(inst, i, q_star))
        except ZeroInfluenceSumError as exc:
            notes.append(exc.message)
    outcome.exhaust = exhaust
    if source == "fixture":
        notes.append("q* taken from the fixture; threshold verdicts describe the published data")
        return outcome
    for problem in outcome.inconsistencies():
        logger.warning("sufficient condition contradicts partition: %s", problem)
    return outcome
