"""Unit tests for seeded instance generation and run setup."""

import numpy as np
import pytest

from opinion_pds.analysis.structure import classify
from opinion_pds.api.schemas import GeneratorSpec, RandomInitial, RunConfig
from opinion_pds.application.services import (
    generate_config,
    generate_instance,
    initial_profile,
    instance_from_config,
    random_feasible_profile,
    regime_holds,
    sim_config_from,
)
from opinion_pds.application.services import generator as generator_module
from opinion_pds.exceptions import ConfigurationError, GenerationFailedError
from opinion_pds.geometry.polytope import feasible_set
from opinion_pds.infrastructure.repositories import ConfigRepository
from opinion_pds.model.dynamics import max_stable_step


@pytest.mark.unit
class TestGenerator:
    """Test regimes, determinism and failure modes of the generator."""

    @pytest.mark.parametrize("regime", ["a1", "a2", "a3", "signed"])
    def test_regime_holds(self, regime):
        inst = generate_instance(GeneratorSpec(n=6, m=3, seed=5, regime=regime))
        profile = classify(inst)
        assert regime_holds(profile, regime)
        assert profile.implications_hold()
        if regime == "signed":
            assert inst.has_antagonists

    def test_same_seed_same_config(self):
        spec = GeneratorSpec(n=5, m=2, seed=123, regime="a2")
        assert generate_config(spec).model_dump() == generate_config(spec).model_dump()

    def test_different_seeds_differ(self):
        first = generate_config(GeneratorSpec(n=5, m=2, seed=1))
        second = generate_config(GeneratorSpec(n=5, m=2, seed=2))
        assert first.adjacency != second.adjacency

    def test_values_are_rounded(self):
        inst = generate_instance(GeneratorSpec(n=4, m=2, seed=9))
        for arr in (inst.influence, inst.preferences, inst.pref_weights, inst.costs, inst.budgets):
            np.testing.assert_array_equal(np.round(arr, 6), arr)

    def test_budget_scale(self):
        base = generate_instance(GeneratorSpec(n=4, m=2, seed=9))
        doubled = generate_instance(GeneratorSpec(n=4, m=2, seed=9, budget_scale=2.0))
        np.testing.assert_array_equal(base.costs, doubled.costs)
        np.testing.assert_allclose(doubled.budgets, 2.0 * base.budgets, atol=2e-6)

    def test_default_name(self):
        cfg = generate_config(GeneratorSpec(n=3, m=1, seed=4, regime="A3"))
        assert cfg.name == "a3-n3-m1-seed4"
        assert isinstance(cfg, RunConfig)

    def test_single_agent_cannot_be_signed(self):
        with pytest.raises(GenerationFailedError) as exc_info:
            generate_instance(GeneratorSpec(n=1, m=2, seed=0, regime="signed"))
        assert exc_info.value.exit_code == 4

    def test_gives_up_after_max_attempts(self, monkeypatch):
        monkeypatch.setattr(generator_module, "regime_holds", lambda profile, regime: False)
        with pytest.raises(GenerationFailedError) as exc_info:
            generate_instance(GeneratorSpec(n=3, m=1, seed=0), max_attempts=3)
        assert exc_info.value.context["attempts"] == 3


@pytest.mark.unit
class TestRunSetup:
    """Test translation of configs into instances, starts and integration settings."""

    def test_random_profile_is_feasible_and_seeded(self, three_agent_instance):
        z = random_feasible_profile(three_agent_instance, 11)
        assert feasible_set(three_agent_instance).contains(z)
        np.testing.assert_array_equal(z, random_feasible_profile(three_agent_instance, 11))

    def test_initial_profiles(self, tiny_config):
        cfg = ConfigRepository().load(tiny_config)
        inst = instance_from_config(cfg)
        np.testing.assert_array_equal(initial_profile(cfg, inst), [0.0, 0.0])

        explicit = cfg.model_copy(deep=True)
        explicit.simulation.initial = [[1.0], [2.0]]
        np.testing.assert_array_equal(initial_profile(explicit, inst), [1.0, 2.0])

        seeded = cfg.model_copy(deep=True)
        seeded.simulation.initial = RandomInitial(seed=3)
        np.testing.assert_array_equal(
            initial_profile(seeded, inst), random_feasible_profile(inst, 3)
        )

        wrong = cfg.model_copy(deep=True)
        wrong.simulation.initial = [[1.0, 2.0]]
        with pytest.raises(ConfigurationError):
            initial_profile(wrong, inst)

    def test_default_step_is_stability_bound(self, tiny_config):
        cfg = ConfigRepository().load(tiny_config)
        inst = instance_from_config(cfg)
        sim = sim_config_from(cfg, inst)
        assert sim.step == pytest.approx(max_stable_step(inst))
        assert sim.t_end == 100.0
