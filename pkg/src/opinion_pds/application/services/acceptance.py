"""Acceptance checks run by ``opinion-pds check``.

Instance checks cover the configured instance and the reference data in its
``fixture`` section. Sweeps draw seeded instances from the generator, fan
out over a thread pool and merge results in instance order, so a report
depends only on the configuration and the sweep plan.
"""

from __future__ import annotations

import math
import time
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from itertools import combinations
from typing import TypeVar

import numpy as np

from ...analysis.lemmas import support_ratios, sufficient_exhaust
from ...analysis.structure import classify, partition_agents
from ...api.schemas import (
    AgentSnapshot,
    CheckReport,
    CheckResult,
    ExhaustExpectation,
    GeneratorSpec,
    GoldenExpectation,
    NotExhaustExpectation,
    RunConfig,
)
from ...domain.instance import FloatArray, ProblemInstance
from ...domain.tolerances import DEFAULT_TOLERANCES, Tolerances
from ...dynamics.diagnostics import distance_curve, lyapunov_violations, monotone_violations
from ...dynamics.integrator import SimConfig, Termination, Trajectory, simulate
from ...equilibrium.solver import Method, solve_equilibrium
from ...exceptions import NoConvergenceError, OpinionPDSError
from ...geometry.oracle import enumerate_cone_projection, enumerate_weighted_projection
from ...geometry.polytope import AgentPolytope, feasible_set
from ...geometry.projection import project_euclidean, project_tangent_cone, project_weighted
from ...logging import get_logger
from ...model.dynamics import max_stable_step, potential, utility
from .analysis_service import analyze_instance
from .generator import generate_instance
from .run_setup import initial_profile, random_feasible_profile, sim_config_from

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")
NamedCheck = tuple[str, Callable[[], CheckResult]]

REGIMES = ("a1", "a2", "a3", "signed")
CONVERGED_RESIDUAL = 1e-6
REST_RESIDUAL = 1e-10
UNIQUENESS_GAP = 1e-6
AGREEMENT_GAP = 1e-5
MONOTONE_SLACK = 1e-8
POTENTIAL_RTOL = 1e-9
ARGMAX_SLACK = 1e-9
PROJECTION_GAP = 1e-8
CONE_LIMIT_STEP = 1e-6
CONE_LIMIT_GAP = 1e-4
Q_STAR_FLOOR = -1e-12


@dataclass(frozen=True)
class SweepPlan:
    """Sample counts of the randomized sweeps."""

    feasibility: int = 100
    uniqueness: int = 50
    psd: int = 50
    certification: int = 50
    argmax: int = 20
    argmax_samples: int = 1_000
    potential_samples: int = 1000
    projection_samples: int = 1000
    lemma: int = 200
    feasibility_steps: int = 2_000
    max_steps: int = 50_000
    seed: int = 20_240_601

    @classmethod
    def quick(cls) -> SweepPlan:
        return cls(
            feasibility=8,
            uniqueness=4,
            psd=4,
            certification=6,
            argmax=4,
            argmax_samples=100,
            potential_samples=100,
            projection_samples=100,
            lemma=8,
            feasibility_steps=500,
        )


def _rng(*entropy: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(list(entropy)))


class AcceptanceRunner:
    """Run instance checks and randomized sweeps and collect a :class:`CheckReport`."""

    def __init__(
        self,
        *,
        tol: Tolerances = DEFAULT_TOLERANCES,
        plan: SweepPlan | None = None,
        workers: int = 1,
        max_attempts: int = 10_000,
    ) -> None:
        self.plan = plan or SweepPlan()
        self.run_tol = tol
        self.tol = replace(tol, max_iterations=min(tol.max_iterations, self.plan.max_steps))
        self.workers = max(1, workers)
        self.max_attempts = max_attempts

    # --- plumbing ------------------------------------------------------------

    def _map(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        if self.workers == 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(fn, items))

    def _instance(self, sweep: int, idx: int, regime: str, n_max: int, m_max: int) -> ProblemInstance:
        rng = _rng(self.plan.seed, sweep, idx)
        spec = GeneratorSpec(
            n=int(rng.integers(2, n_max + 1)),
            m=int(rng.integers(1, m_max + 1)),
            seed=int(rng.integers(0, 2**31 - 1)),
            regime=regime,
        )
        return generate_instance(spec, max_attempts=self.max_attempts)

    def _rest_config(self, inst: ProblemInstance, steps: int, stop: float = REST_RESIDUAL) -> SimConfig:
        delta = max_stable_step(inst)
        return SimConfig(step=delta, t_end=delta * steps, stop_residual=stop)

    def _run_to_rest(self, inst: ProblemInstance, z0: FloatArray) -> Trajectory:
        return simulate(inst, z0, self._rest_config(inst, self.plan.max_steps), tol=self.tol)

    @staticmethod
    def _explained(traj: Trajectory) -> bool:
        """Settled, or stopped at the horizon or on a stall."""
        return traj.final_residual <= CONVERGED_RESIDUAL or traj.terminated_by in (
            Termination.HORIZON,
            Termination.STALL,
        )

    def _worst_violation(self, inst: ProblemInstance, traj: Trajectory) -> float:
        fs = feasible_set(inst)
        return max(float(fs.violations(z).max()) for z in traj.states)

    @staticmethod
    def _guarded(name: str, body: Callable[[], CheckResult]) -> CheckResult:
        started = time.perf_counter()
        try:
            result = body()
        except OpinionPDSError as exc:
            result = CheckResult(name=name, passed=False, detail=exc.message)
        result.metrics = {k: v for k, v in result.metrics.items() if math.isfinite(v)}
        result.metrics.setdefault("elapsed_s", round(time.perf_counter() - started, 3))
        log = logger.info if result.passed else logger.error
        log("check %s %s", name, "passed" if result.passed else "FAILED", extra={"detail": result.detail})
        return result

    # --- instance checks -------------------------------------------------------

    def check_simulation(self, cfg: RunConfig, inst: ProblemInstance) -> CheckResult:
        traj = simulate(inst, initial_profile(cfg, inst), sim_config_from(cfg, inst), tol=self.run_tol)
        worst = self._worst_violation(inst, traj)
        lyap = lyapunov_violations(inst, traj)
        settled = traj.final_residual <= CONVERGED_RESIDUAL
        return CheckResult(
            name="instance.simulation",
            passed=worst <= self.tol.feasibility and not lyap and self._explained(traj),
            detail=(
                f"terminated by {traj.terminated_by.value} after {traj.steps_taken} steps"
                + ("" if settled else f"; residual {traj.final_residual:.3e} above {CONVERGED_RESIDUAL:.0e}")
            ),
            metrics={
                "worst_violation": worst,
                "lyapunov_violations": len(lyap),
                "final_residual": traj.final_residual,
            },
        )

    def check_equilibrium(self, inst: ProblemInstance) -> CheckResult:
        report = solve_equilibrium(inst, tol=self.tol)
        relations = classify(inst)
        nash_ok = report.nash_certified
        passed = report.vi_certified and (not relations.a3 or nash_ok is None or bool(nash_ok))
        metrics = {"vi_margin": float(report.vi_certificate.min())}
        if report.nash_residuals is not None:
            metrics["nash_residual"] = float(report.nash_residuals.max())
        return CheckResult(
            name="instance.equilibrium",
            passed=passed,
            detail=f"{report.method.value}, uniqueness {report.uniqueness.value}",
            metrics=metrics,
        )

    def check_golden(self, inst: ProblemInstance, golden: GoldenExpectation) -> CheckResult:
        expected = np.asarray(golden.z_star, dtype=np.float64).reshape(-1)
        traj = self._run_to_rest(inst, np.zeros(inst.dim))
        report = solve_equilibrium(inst, tol=self.tol)
        z_star = report.point.z
        problems = []
        gap_traj = float(np.linalg.norm(traj.states[-1] - expected))
        gap_eq = float(np.linalg.norm(z_star - expected))
        if max(gap_traj, gap_eq) > golden.tolerance:
            problems.append(f"equilibrium off by {max(gap_traj, gap_eq):.3e}")
        if golden.potential is not None and abs(potential(inst, z_star) - golden.potential) > 1e-9:
            problems.append(f"potential {potential(inst, z_star)!r} != {golden.potential!r}")
        partition = partition_agents(inst, z_star, tol=self.tol)
        if golden.exhausting is not None and sorted(i + 1 for i in partition.exhausting) != sorted(golden.exhausting):
            problems.append(f"exhausting agents {[i + 1 for i in partition.exhausting]}")
        if golden.non_exhausting is not None and sorted(
            i + 1 for i in partition.non_exhausting
        ) != sorted(golden.non_exhausting):
            problems.append(f"non-exhausting agents {[i + 1 for i in partition.non_exhausting]}")
        for agent, value in golden.lambda_star.items():
            got = partition.lambda_star.get(int(agent) - 1)
            if got is None or abs(got - value) > golden.tolerance:
                problems.append(f"lambda* of agent {agent} is {got!r}, expected {value!r}")
        return CheckResult(
            name="instance.golden",
            passed=not problems,
            detail="; ".join(problems),
            metrics={"trajectory_gap": gap_traj, "equilibrium_gap": gap_eq},
        )

    def check_exhaust_threshold(
        self, inst: ProblemInstance, q_star: list[list[float]], expect: ExhaustExpectation
    ) -> CheckResult:
        verdict = sufficient_exhaust(inst, expect.agent - 1, expect.topic - 1, q_star)
        off = abs(verdict.threshold - expect.threshold)
        return CheckResult(
            name="fixture.exhaust_threshold",
            passed=off <= expect.tolerance and verdict.guaranteed,
            detail=f"threshold {verdict.threshold:.4f}, q {verdict.q_value:.4f}",
            metrics={"threshold": verdict.threshold, "deviation": off},
        )

    def check_support_ratios(self, inst: ProblemInstance, snap: AgentSnapshot) -> CheckResult:
        z = np.asarray(snap.z_star, dtype=np.float64)
        p_tilde = np.asarray(snap.p_tilde, dtype=np.float64)
        sr = support_ratios(snap.w_tilde, z, p_tilde, inst.costs[snap.agent - 1], self.tol.activity)
        problems = []
        if sr.relative_spread > snap.ratio_rtol:
            problems.append(f"ratios spread {sr.relative_spread:.2%}")
        if not sr.lambda_star < 0:
            problems.append(f"lambda* {sr.lambda_star!r} is not negative")
        metrics = {"relative_spread": sr.relative_spread, "lambda_star": sr.lambda_star}
        if snap.distance is not None:
            off = float(np.abs(np.abs(z - p_tilde) - np.asarray(snap.distance)).max())
            metrics["distance_deviation"] = off
            if off > snap.distance_slack:
                problems.append(f"|z - p~| differs from the published distance by {off:.3f}")
        return CheckResult(
            name="fixture.support_ratios",
            passed=not problems,
            detail="; ".join(problems) or f"support {[s + 1 for s in sr.support]}",
            metrics=metrics,
        )

    @staticmethod
    def check_not_exhaust(expect: NotExhaustExpectation) -> CheckResult:
        return CheckResult(
            name="fixture.not_exhaust",
            passed=expect.spend < expect.budget,
            detail=f"c'upsilon {expect.spend} against budget {expect.budget}",
            metrics={"spend": expect.spend, "budget": expect.budget},
        )

    # --- sweeps ------------------------------------------------------------------

    def sweep_feasibility(self) -> CheckResult:
        """Feasibility of every sample, monotone potential and an explained stop."""

        def one(idx: int) -> tuple[float, int, bool]:
            inst = self._instance(1, idx, REGIMES[idx % len(REGIMES)], 8, 4)
            z0 = random_feasible_profile(inst, self.plan.seed + idx)
            cfg = self._rest_config(inst, self.plan.feasibility_steps, stop=CONVERGED_RESIDUAL)
            traj = simulate(inst, z0, cfg, tol=self.tol)
            lyap = lyapunov_violations(inst, traj, step=cfg.step)
            return self._worst_violation(inst, traj), len(lyap), self._explained(traj)

        results = self._map(one, range(self.plan.feasibility))
        worst = max((w for w, _, _ in results), default=0.0)
        lyap = sum(v for _, v, _ in results)
        unexplained = sum(1 for _, _, ok in results if not ok)
        return CheckResult(
            name="sweep.feasibility_lyapunov",
            passed=worst <= self.tol.feasibility and lyap == 0 and unexplained == 0,
            detail=f"{len(results)} trajectories",
            metrics={
                "worst_violation": worst,
                "lyapunov_violations": lyap,
                "unexplained_terminations": unexplained,
            },
        )

    def sweep_uniqueness(self) -> CheckResult:
        """Two random starts reach the same rest point on very weakly antagonistic instances."""

        def one(idx: int) -> tuple[float, bool]:
            inst = self._instance(2, idx, "a2", 5, 3)
            ends = [
                self._run_to_rest(inst, random_feasible_profile(inst, self.plan.seed + 2 * idx + k)).states[-1]
                for k in (0, 1)
            ]
            relations = classify(inst)
            pd = relations.gerschgorin_pd and relations.jacobian_definiteness.value == "positive-definite"
            return float(np.linalg.norm(ends[0] - ends[1])), pd

        results = self._map(one, range(self.plan.uniqueness))
        gap = max((g for g, _ in results), default=0.0)
        not_pd = sum(1 for _, pd in results if not pd)
        return CheckResult(
            name="sweep.a2_uniqueness",
            passed=gap <= UNIQUENESS_GAP and not_pd == 0,
            detail=f"{len(results)} instances",
            metrics={"max_gap": gap, "not_positive_definite": not_pd},
        )

    def sweep_psd_agreement(self) -> CheckResult:
        """Potential maximizer, best responses and trajectory limit coincide when J is PSD."""

        def one(idx: int) -> tuple[float, int]:
            regime = "a1" if idx % 2 == 0 else "a2"
            inst = self._instance(3, idx, regime, 5, 3)
            points = [solve_equilibrium(inst, Method.POTENTIAL_QP, tol=self.tol).point.z]
            points.append(solve_equilibrium(inst, Method.TRAJECTORY_LIMIT, tol=self.tol).point.z)
            if not inst.has_antagonists:
                points.append(solve_equilibrium(inst, Method.BEST_RESPONSE, tol=self.tol).point.z)
            gap = max(float(np.linalg.norm(a - b)) for a, b in combinations(points, 2))
            traj = self._run_to_rest(inst, random_feasible_profile(inst, self.plan.seed + idx))
            bumps = monotone_violations(distance_curve(traj, points[0]), MONOTONE_SLACK)
            return gap, len(bumps)

        results = self._map(one, range(self.plan.psd))
        gap = max((g for g, _ in results), default=0.0)
        bumps = sum(b for _, b in results)
        return CheckResult(
            name="sweep.psd_agreement",
            passed=gap <= AGREEMENT_GAP and bumps == 0,
            detail=f"{len(results)} instances",
            metrics={"max_gap": gap, "distance_increases": bumps},
        )

    def sweep_potential_identity(self) -> CheckResult:
        """Unilateral utility changes equal potential changes."""
        pool = [self._instance(4, k, REGIMES[k % len(REGIMES)], 6, 4) for k in range(8)]
        rng = _rng(self.plan.seed, 4)
        worst = 0.0
        for _ in range(self.plan.potential_samples):
            inst = pool[int(rng.integers(0, len(pool)))]
            i = int(rng.integers(0, inst.n))
            z = rng.uniform(0.0, 10.0, size=(inst.n, inst.m))
            x, y = z.copy(), z.copy()
            x[i] = rng.uniform(0.0, 10.0, size=inst.m)
            y[i] = rng.uniform(0.0, 10.0, size=inst.m)
            du = utility(inst, i, x) - utility(inst, i, y)
            dw = potential(inst, x) - potential(inst, y)
            scale = max(1.0, abs(potential(inst, x)), abs(potential(inst, y)), abs(du))
            worst = max(worst, abs(du - dw) / scale)
        return CheckResult(
            name="sweep.potential_identity",
            passed=worst <= POTENTIAL_RTOL,
            detail=f"{self.plan.potential_samples} samples",
            metrics={"max_relative_error": worst},
        )

    def sweep_potential_argmax(self) -> CheckResult:
        """No sampled feasible profile beats the solver's potential when J is PSD."""

        def one(idx: int) -> float:
            inst = self._instance(8, idx, "a1" if idx % 2 == 0 else "a2", 6, 4)
            best = potential(inst, solve_equilibrium(inst, Method.POTENTIAL_QP, tol=self.tol).point.z)
            rng = _rng(self.plan.seed, 8, idx)
            seeds = rng.integers(0, 2**31 - 1, size=self.plan.argmax_samples)
            return max(
                (potential(inst, random_feasible_profile(inst, int(s))) - best for s in seeds),
                default=-math.inf,
            )

        results = self._map(one, range(self.plan.argmax))
        excess = max(results, default=-math.inf)
        return CheckResult(
            name="sweep.potential_argmax",
            passed=excess <= ARGMAX_SLACK,
            detail=f"{len(results)} instances, {self.plan.argmax_samples} profiles each",
            metrics={"max_excess": excess},
        )

    def sweep_certification(self) -> CheckResult:
        """Every instance solves, its output passes the VI certificate, and the
        Nash certificate agrees with it wherever best responses are defined.
        """

        def one(idx: int) -> tuple[float, float, bool, bool] | None:
            inst = self._instance(5, idx, REGIMES[idx % len(REGIMES)], 5, 3)
            try:
                report = solve_equilibrium(inst, tol=self.tol)
            except NoConvergenceError as exc:
                logger.warning("certification instance %d did not converge", idx, extra=exc.context)
                return None
            if report.nash_residuals is None or not classify(inst).a3:
                return float(report.vi_certificate.min()), 0.0, True, False
            agree = report.nash_certified == report.vi_certified
            return float(report.vi_certificate.min()), float(report.nash_residuals.max()), agree, True

        results = self._map(one, range(self.plan.certification))
        solved = [r for r in results if r is not None]
        unsolved = len(results) - len(solved)
        margin = min((r[0] for r in solved), default=0.0)
        nash = max((r[1] for r in solved), default=0.0)
        disagree = sum(1 for r in solved if not r[2])
        return CheckResult(
            name="sweep.certification",
            passed=unsolved == 0
            and margin >= -self.tol.vi
            and nash <= self.tol.nash
            and disagree == 0,
            detail=f"{len(solved)} of {len(results)} solved",
            metrics={
                "unsolved": unsolved,
                "worst_vi_margin": margin,
                "worst_nash_residual": nash,
                "nash_checked": sum(1 for r in solved if r[3]),
                "disagreements": disagree,
            },
        )

    def sweep_projection_oracle(self) -> CheckResult:
        """Projections against exhaustive active-set enumeration."""
        rng = _rng(self.plan.seed, 6)
        worst_proj = worst_cone = worst_limit = 0.0
        for _ in range(self.plan.projection_samples):
            m = int(rng.integers(1, 5))
            poly = AgentPolytope(rng.uniform(0.5, 2.0, m), float(rng.uniform(0.5, 5.0)))
            x = rng.normal(0.0, 3.0, m)
            weights = rng.uniform(0.2, 5.0, m)
            worst_proj = max(
                worst_proj,
                float(np.abs(project_weighted(poly, weights, x) - enumerate_weighted_projection(poly, weights, x)).max()),
                float(np.abs(project_euclidean(poly, x) - enumerate_weighted_projection(poly, np.ones(m), x)).max()),
            )
            z = _boundary_point(rng, poly)
            v = rng.normal(0.0, 1.0, m)
            cone = project_tangent_cone(poly, z, v, self.tol)
            worst_cone = max(worst_cone, float(np.abs(cone - enumerate_cone_projection(poly, z, v, self.tol)).max()))
            limit = (project_euclidean(poly, z + CONE_LIMIT_STEP * v) - z) / CONE_LIMIT_STEP
            worst_limit = max(worst_limit, float(np.abs(cone - limit).max()))
        return CheckResult(
            name="sweep.projection_oracle",
            passed=max(worst_proj, worst_cone) <= PROJECTION_GAP and worst_limit <= CONE_LIMIT_GAP,
            detail=f"{self.plan.projection_samples} samples",
            metrics={
                "projection_gap": worst_proj,
                "cone_gap": worst_cone,
                "cone_limit_gap": worst_limit,
            },
        )

    def sweep_lemma_consistency(self) -> CheckResult:
        """Fired sufficient conditions agree with the certified partition."""

        def one(idx: int) -> tuple[bool, int, int]:
            inst = self._instance(7, idx, "a1", 6, 3)
            outcome = analyze_instance(inst, tol=self.tol)
            q_ok = outcome.q_star is None or float(outcome.q_star.min()) >= Q_STAR_FLOOR
            failed = sum(1 for v in outcome.necessary or [] if not v.holds)
            return q_ok, len(outcome.inconsistencies()), failed

        results = self._map(one, range(self.plan.lemma))
        q_bad = sum(1 for q, _, _ in results if not q)
        contradictions = sum(c for _, c, _ in results)
        necessary_failed = sum(f for _, _, f in results)
        return CheckResult(
            name="sweep.lemma_consistency",
            passed=q_bad == 0 and contradictions == 0 and necessary_failed == 0,
            detail=f"{len(results)} instances",
            metrics={
                "negative_q_star": q_bad,
                "contradictions": contradictions,
                "necessary_failures": necessary_failed,
            },
        )

    # --- entry point -----------------------------------------------------------------

    def instance_checks(self, cfg: RunConfig, inst: ProblemInstance) -> list[NamedCheck]:
        checks: list[NamedCheck] = [
            ("instance.simulation", lambda: self.check_simulation(cfg, inst)),
            ("instance.equilibrium", lambda: self.check_equilibrium(inst)),
        ]
        fixture = cfg.fixture
        if fixture is None:
            return checks
        golden, q_star, exhaust = fixture.golden, fixture.q_star, fixture.exhaust
        snapshot, not_exhaust = fixture.agent_snapshot, fixture.not_exhaust
        if golden is not None:
            checks.append(("instance.golden", lambda: self.check_golden(inst, golden)))
        if q_star is not None and exhaust is not None:
            checks.append(
                ("fixture.exhaust_threshold", lambda: self.check_exhaust_threshold(inst, q_star, exhaust))
            )
        if snapshot is not None:
            checks.append(("fixture.support_ratios", lambda: self.check_support_ratios(inst, snapshot)))
        if not_exhaust is not None:
            checks.append(("fixture.not_exhaust", lambda: self.check_not_exhaust(not_exhaust)))
        return checks

    def sweeps(self) -> list[NamedCheck]:
        return [
            ("sweep.feasibility_lyapunov", self.sweep_feasibility),
            ("sweep.a2_uniqueness", self.sweep_uniqueness),
            ("sweep.psd_agreement", self.sweep_psd_agreement),
            ("sweep.potential_identity", self.sweep_potential_identity),
            ("sweep.potential_argmax", self.sweep_potential_argmax),
            ("sweep.certification", self.sweep_certification),
            ("sweep.projection_oracle", self.sweep_projection_oracle),
            ("sweep.lemma_consistency", self.sweep_lemma_consistency),
        ]

    def run(
        self,
        name: str,
        cfg: RunConfig,
        inst: ProblemInstance,
        *,
        quick: bool = False,
        include_sweeps: bool = True,
    ) -> CheckReport:
        checks = self.instance_checks(cfg, inst)
        if include_sweeps:
            checks.extend(self.sweeps())
        results = [self._guarded(label, body) for label, body in checks]
        return CheckReport(
            name=name,
            quick=quick,
            passed=all(r.passed for r in results),
            checks=results,
        )


def _boundary_point(rng: np.random.Generator, poly: AgentPolytope) -> FloatArray:
    """Feasible point with exact zeros, an exactly tight budget, or both."""
    m = poly.m
    bary = rng.dirichlet(np.ones(m + 1))
    z = bary[1:] * (poly.budget / poly.cost)
    z[(rng.random(m) < 0.4) | (z < 1e-3)] = 0.0
    spend = float(poly.cost @ z)
    if rng.random() < 0.5 and spend > 0:
        z *= poly.budget / spend
    else:
        z *= 0.95
    return z
