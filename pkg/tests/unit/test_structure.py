"""Unit tests for relation classes, Gerschgorin bounds and the agent partition."""

import numpy as np
import pytest

from opinion_pds.analysis.structure import classify, gerschgorin_discs, partition_agents
from opinion_pds.domain.instance import build_instance
from opinion_pds.exceptions import InfeasiblePointError
from opinion_pds.model.dynamics import Definiteness


@pytest.mark.unit
class TestClassify:
    """Test relation classes and definiteness tests."""

    def test_friendly_pair(self, tiny_instance):
        rel = classify(tiny_instance)
        assert rel.class_flags == {"A1": True, "A2": True, "A3": True}
        assert rel.friends == (frozenset({1}), frozenset({0}))
        assert rel.enemies == (frozenset(), frozenset())
        assert rel.jacobian_definiteness is Definiteness.POSITIVE_DEFINITE
        assert rel.gerschgorin_pd
        assert rel.min_eigenvalue == pytest.approx(1.0)
        np.testing.assert_allclose(rel.gerschgorin_lower, [[1.0], [1.0]])
        assert rel.implications_hold()

    def test_antagonistic_pair(self, antagonistic_pair):
        """w = 1 is not above twice the enemy mass, but w + sum a = 0 is nonnegative."""
        rel = classify(antagonistic_pair)
        assert rel.class_flags == {"A1": False, "A2": False, "A3": True}
        assert rel.enemies == (frozenset({1}), frozenset({0}))
        assert rel.neighbors == (frozenset({1}), frozenset({0}))
        assert rel.jacobian_definiteness is Definiteness.INDEFINITE
        assert not rel.psd
        assert rel.min_eigenvalue == pytest.approx(-1.0)
        assert rel.implications_hold()

    def test_singular_instance(self, singular_instance):
        rel = classify(singular_instance)
        assert not rel.a2
        assert rel.a3
        assert rel.psd
        # the discs touch zero, so the Gerschgorin test is inconclusive
        assert not rel.gerschgorin_pd

    def test_weak_antagonism_meets_a2(self, make_raw):
        inst = build_instance(make_raw([[0, -0.2], [-0.2, 0]], [[1], [1]]))
        rel = classify(inst)
        assert rel.a2
        assert not rel.a1
        assert rel.gerschgorin_pd
        assert rel.jacobian_definiteness is Definiteness.POSITIVE_DEFINITE

    def test_implications_on_random_signed_instances(self, make_raw):
        rng = np.random.default_rng(41)
        for _ in range(50):
            n, m = int(rng.integers(2, 6)), int(rng.integers(1, 4))
            upper = np.triu(rng.uniform(-1.5, 2.0, (n, n)), k=1)
            prefs = rng.uniform(0.1, 5.0, (n, m))
            weights = rng.uniform(0.2, 4.0, (n, m))
            inst = build_instance(make_raw((upper + upper.T).tolist(), prefs, weights.tolist()))
            assert classify(inst).implications_hold()

    def test_gerschgorin_discs(self, three_agent_instance):
        centers, radii = gerschgorin_discs(three_agent_instance)
        np.testing.assert_allclose(centers, [[2.5, 3.5], [2.5, 3.0], [2.5, 1.5]])
        np.testing.assert_allclose(radii, [[1.5, 1.5], [2.0, 2.0], [0.5, 0.5]])


@pytest.mark.unit
class TestPartition:
    """Test the exhausting / non-exhausting split at an equilibrium."""

    def test_tiny_partition(self, tiny_instance):
        part = partition_agents(tiny_instance, [2.0, 1.0])
        assert part.exhausting == (0,)
        assert part.non_exhausting == (1,)
        assert part.lambda_star == {0: pytest.approx(-1.0)}
        assert part.support == (frozenset({0}), frozenset({0}))
        assert part.is_exhausting(0)

    def test_no_multiplier_without_positive_effective_weights(self, antagonistic_pair):
        part = partition_agents(antagonistic_pair, [0.0, 10.0])
        assert part.exhausting == (1,)
        assert part.lambda_star == {}
        assert part.support == (frozenset(), frozenset({0}))

    def test_infeasible_point_rejected(self, tiny_instance):
        with pytest.raises(InfeasiblePointError):
            partition_agents(tiny_instance, [2.5, 1.0])
