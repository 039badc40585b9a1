"""Conversion of library results into report models (1-based numbering)."""

from __future__ import annotations

import math
from collections.abc import Iterable

import numpy as np
import numpy.typing as npt

from ...analysis.lemmas import ExhaustVerdict, NecessaryConditionVerdict, NotExhaustVerdict
from ...analysis.structure import AgentPartition, RelationProfile
from ...api.schemas import (
    AnalysisReport,
    EquilibriumSummary,
    ExhaustSummary,
    LemmaSection,
    NecessaryConditionSummary,
    NotExhaustSummary,
    PartitionSummary,
    RelationSummary,
    SimulationSummary,
    UnconstrainedSummary,
)
from ...domain.instance import ProblemInstance
from ...dynamics.integrator import Trajectory
from ...equilibrium.solver import EquilibriumReport
from .analysis_service import AnalysisOutcome


def matrix(values: npt.ArrayLike, n: int, m: int) -> list[list[float]]:
    return np.asarray(values, dtype=np.float64).reshape(n, m).tolist()


def one_based(indices: Iterable[int]) -> list[int]:
    return sorted(int(i) + 1 for i in indices)


def _finite_or_none(value: float) -> float | None:
    return None if math.isnan(value) else float(value)


def simulation_summary(
    name: str, inst: ProblemInstance, traj: Trajectory, trajectory_file: str | None = None
) -> SimulationSummary:
    return SimulationSummary(
        name=name,
        scheme=traj.scheme.value,
        step=traj.step,
        steps_taken=traj.steps_taken,
        terminated_by=traj.terminated_by.value,
        final_time=float(traj.times[-1]),
        final_residual=traj.final_residual,
        final_potential=float(traj.potentials[-1]),
        terminal_profile=matrix(traj.states[-1], inst.n, inst.m),
        samples=len(traj),
        trajectory_file=trajectory_file,
    )


def relation_summary(profile: RelationProfile) -> RelationSummary:
    return RelationSummary(
        class_flags=profile.class_flags,
        enemies=[one_based(s) for s in profile.enemies],
        friends=[one_based(s) for s in profile.friends],
        neighbors=[one_based(s) for s in profile.neighbors],
        jacobian_definiteness=profile.jacobian_definiteness.value,
        gerschgorin_pd=profile.gerschgorin_pd,
        min_eigenvalue=profile.min_eigenvalue,
        implications_hold=profile.implications_hold(),
    )


def equilibrium_summary(inst: ProblemInstance, report: EquilibriumReport) -> EquilibriumSummary:
    return EquilibriumSummary(
        method=report.method.value,
        point=matrix(report.point.z, inst.n, inst.m),
        potential=report.potential_value,
        residual=report.residual,
        iterations=report.iterations,
        uniqueness=report.uniqueness.value,
        vi_margins=report.vi_certificate.tolist(),
        vi_certified=report.vi_certified,
        nash_residuals=None if report.nash_residuals is None else report.nash_residuals.tolist(),
        nash_certified=report.nash_certified,
    )


def partition_summary(partition: AgentPartition) -> PartitionSummary:
    return PartitionSummary(
        exhausting=one_based(partition.exhausting),
        non_exhausting=one_based(partition.non_exhausting),
        lambda_star={str(i + 1): v for i, v in sorted(partition.lambda_star.items())},
        support=[one_based(s) for s in partition.support],
    )


def necessary_summary(v: NecessaryConditionVerdict) -> NecessaryConditionSummary:
    if v.ratios is None:
        return NecessaryConditionSummary(
            agent=v.agent + 1, exhausting=v.exhausting, holds=v.holds, deviation=v.deviation
        )
    return NecessaryConditionSummary(
        agent=v.agent + 1,
        exhausting=v.exhausting,
        holds=v.holds,
        support=one_based(v.ratios.support),
        ratios=v.ratios.ratios.tolist(),
        lambda_star=_finite_or_none(v.ratios.lambda_star),
    )


def not_exhaust_summary(v: NotExhaustVerdict) -> NotExhaustSummary:
    return NotExhaustSummary(
        agent=v.agent + 1,
        upsilon=v.upsilon.tolist(),
        spend=v.spend,
        budget=v.budget,
        guaranteed=v.guaranteed,
    )


def exhaust_summary(v: ExhaustVerdict) -> ExhaustSummary:
    return ExhaustSummary(
        agent=v.agent + 1,
        topic=v.topic + 1,
        threshold=v.threshold,
        q_value=v.q_value,
        guaranteed=v.guaranteed,
    )


def analysis_report(name: str, inst: ProblemInstance, outcome: AnalysisOutcome) -> AnalysisReport:
    lemmas = LemmaSection(
        necessary=None if outcome.necessary is None else [necessary_summary(v) for v in outcome.necessary],
        not_exhaust=(
            None if outcome.not_exhaust is None else [not_exhaust_summary(v) for v in outcome.not_exhaust]
        ),
        exhaust=None if outcome.exhaust is None else [exhaust_summary(v) for v in outcome.exhaust],
        consistent=(
            None
            if outcome.not_exhaust is None or outcome.q_star_source != "computed"
            else not outcome.inconsistencies()
        ),
        notes=list(outcome.notes),
    )
    return AnalysisReport(
        name=name,
        n=inst.n,
        m=inst.m,
        relations=relation_summary(outcome.relations),
        unconstrained=UnconstrainedSummary(
            source=outcome.q_star_source,
            q_star=None if outcome.q_star is None else matrix(outcome.q_star, inst.n, inst.m),
            nonnegative=outcome.q_star_nonnegative,
        ),
        equilibrium=equilibrium_summary(inst, outcome.equilibrium),
        partition=partition_summary(outcome.partition),
        lemmas=lemmas,
    )
