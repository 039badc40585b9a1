"""Unit tests for the acceptance runner."""

from dataclasses import replace
from types import SimpleNamespace

import numpy as np
import pytest

from opinion_pds.api.schemas import CheckResult
from opinion_pds.application.services import (
    AcceptanceRunner,
    SweepPlan,
    acceptance,
    instance_from_config,
)
from opinion_pds.domain.tolerances import DEFAULT_TOLERANCES
from opinion_pds.exceptions import NoConvergenceError
from opinion_pds.infrastructure.repositories import ConfigRepository

SMALL_PLAN = SweepPlan(
    feasibility=2,
    uniqueness=1,
    psd=1,
    certification=4,
    argmax=2,
    argmax_samples=50,
    potential_samples=10,
    projection_samples=10,
    lemma=2,
    feasibility_steps=200,
)


def load(path):
    cfg = ConfigRepository().load(path)
    return cfg, instance_from_config(cfg)


@pytest.mark.unit
class TestInstanceChecks:
    """Test the checks that run against a single config."""

    def test_tiny_passes(self, tiny_config):
        cfg, inst = load(tiny_config)
        report = AcceptanceRunner(plan=SMALL_PLAN).run("tiny", cfg, inst, include_sweeps=False)
        names = [c.name for c in report.checks]
        assert names == ["instance.simulation", "instance.equilibrium", "instance.golden"]
        assert report.passed, [c.detail for c in report.checks if not c.passed]

    def test_four_agent_fixture_passes(self, four_agent_config):
        cfg, inst = load(four_agent_config)
        report = AcceptanceRunner(plan=SMALL_PLAN).run("four", cfg, inst, include_sweeps=False)
        by_name = {c.name: c for c in report.checks}
        assert {"fixture.exhaust_threshold", "fixture.support_ratios", "fixture.not_exhaust"} <= set(by_name)
        assert by_name["fixture.exhaust_threshold"].metrics["threshold"] == pytest.approx(391.45, abs=0.2)
        assert by_name["fixture.support_ratios"].passed
        assert by_name["fixture.not_exhaust"].passed

    def test_wrong_golden_fails(self, write_config, tiny_payload):
        tiny_payload["fixture"]["golden"]["z_star"] = [[1], [1]]
        cfg, inst = load(write_config(tiny_payload))
        result = AcceptanceRunner(plan=SMALL_PLAN).check_golden(inst, cfg.fixture.golden)
        assert not result.passed
        assert "equilibrium off" in result.detail

    def test_errors_become_failed_checks(self):
        def body():
            raise NoConvergenceError("potential-qp", 5, 1.0)

        result = AcceptanceRunner._guarded("broken", body)
        assert not result.passed
        assert result.name == "broken"
        assert "elapsed_s" in result.metrics

    def test_non_finite_metrics_are_dropped(self):
        result = AcceptanceRunner._guarded(
            "nan", lambda: CheckResult(name="nan", passed=True, metrics={"x": float("nan"), "y": 1.0})
        )
        assert "x" not in result.metrics
        assert result.metrics["y"] == 1.0


@pytest.mark.unit
class TestSweepPlan:
    """Test sweep sizing."""

    def test_quick_is_smaller(self):
        full, quick = SweepPlan(), SweepPlan.quick()
        assert quick.feasibility < full.feasibility
        assert quick.seed == full.seed

    def test_iteration_cap_follows_plan(self):
        runner = AcceptanceRunner(plan=SweepPlan(max_steps=1_000))
        assert runner.tol.max_iterations == 1_000


@pytest.mark.unit
@pytest.mark.slow
class TestSweeps:
    """Run every randomized sweep at a small size."""

    @pytest.mark.parametrize("workers", [1, 2])
    def test_small_sweeps_pass(self, tiny_config, workers):
        cfg, inst = load(tiny_config)
        report = AcceptanceRunner(plan=SMALL_PLAN, workers=workers).run(
            "tiny", cfg, inst, quick=True
        )
        sweeps = [c for c in report.checks if c.name.startswith("sweep.")]
        assert len(sweeps) == 8
        assert all(c.passed for c in sweeps), [(c.name, c.detail) for c in sweeps if not c.passed]


def no_convergence(*args, **kwargs):
    raise NoConvergenceError("trajectory-limit", 3, 1.0)


@pytest.mark.unit
class TestSweepVerdicts:
    """Test that sweeps fail on the outcomes they exist to catch."""

    def test_unsolved_instances_fail_certification(self, monkeypatch):
        monkeypatch.setattr(acceptance, "solve_equilibrium", no_convergence)
        result = AcceptanceRunner(plan=SMALL_PLAN).sweep_certification()
        assert not result.passed
        assert result.metrics["unsolved"] == SMALL_PLAN.certification
        assert result.detail == f"0 of {SMALL_PLAN.certification} solved"

    def test_certification_draws_every_regime(self, monkeypatch):
        seen = []
        real = acceptance.generate_instance

        def spy(spec, **kwargs):
            seen.append(spec.regime)
            return real(spec, **kwargs)

        monkeypatch.setattr(acceptance, "generate_instance", spy)
        monkeypatch.setattr(acceptance, "solve_equilibrium", no_convergence)
        AcceptanceRunner(plan=SMALL_PLAN).sweep_certification()
        assert seen == ["a1", "a2", "a3", "signed"]

    def test_stop_without_cause_fails_feasibility(self):
        capped = replace(DEFAULT_TOLERANCES, max_iterations=3)
        result = AcceptanceRunner(tol=capped, plan=SMALL_PLAN).sweep_feasibility()
        assert not result.passed
        assert result.metrics["unexplained_terminations"] == SMALL_PLAN.feasibility
        assert result.metrics["lyapunov_violations"] == 0

    def test_potential_argmax_holds(self):
        result = AcceptanceRunner(plan=SMALL_PLAN).sweep_potential_argmax()
        assert result.passed, result.detail
        assert result.metrics["max_excess"] < 0

    def test_potential_argmax_catches_a_wrong_maximizer(self, monkeypatch):
        def origin(inst, *args, **kwargs):
            return SimpleNamespace(point=SimpleNamespace(z=np.zeros(inst.dim)))

        monkeypatch.setattr(acceptance, "solve_equilibrium", origin)
        result = AcceptanceRunner(plan=SMALL_PLAN).sweep_potential_argmax()
        assert not result.passed
        assert result.metrics["max_excess"] > 0
