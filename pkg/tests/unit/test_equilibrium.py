"""Unit tests for best responses, equilibrium solvers and certificates."""

from itertools import permutations

import numpy as np
import pytest

from opinion_pds.application.services.run_setup import random_feasible_profile
from opinion_pds.domain.tolerances import DEFAULT_TOLERANCES, Tolerances
from opinion_pds.equilibrium.best_response import (
    best_response,
    best_response_kkt,
    neighbor_preference,
    others_matrix,
)
from opinion_pds.equilibrium.solver import (
    Method,
    Uniqueness,
    certify,
    choose_method,
    solve_equilibrium,
    unconstrained_equilibrium,
    verify_nash,
    verify_vi,
)
from opinion_pds.exceptions import (
    AssumptionViolatedError,
    DimensionMismatchError,
    NoConvergenceError,
    NonpositiveDTildeError,
    NotPSDError,
    SingularJacobianError,
)
from opinion_pds.geometry.polytope import feasible_set
from opinion_pds.geometry.projection import project_profile
from opinion_pds.model.dynamics import potential, utility


@pytest.mark.unit
class TestNeighborPreference:
    """Test the neighbor-influenced preference of one agent."""

    def test_tiny_agent_one(self, tiny_instance):
        pref = neighbor_preference(tiny_instance, 0, [2.0, 1.0])
        np.testing.assert_allclose(pref.d_tilde, [2.0])
        np.testing.assert_allclose(pref.p_tilde, [2.5])
        assert pref.delta == pytest.approx(2.25)

    def test_rewrites_utility(self, three_agent_instance):
        """``U_i = -1/2 ||z_i - p~_i||^2_D~ - Delta_i`` for every agent."""
        rng = np.random.default_rng(23)
        z = rng.uniform(0, 3, (3, 2))
        for i in range(3):
            pref = neighbor_preference(three_agent_instance, i, z)
            rewritten = -0.5 * float(pref.d_tilde @ (z[i] - pref.p_tilde) ** 2) - pref.delta
            assert utility(three_agent_instance, i, z) == pytest.approx(rewritten, abs=1e-10)

    def test_others_only_profile(self, three_agent_instance):
        full = np.arange(6, dtype=float)
        rest = np.delete(full.reshape(3, 2), 1, axis=0).reshape(-1)
        np.testing.assert_array_equal(
            others_matrix(three_agent_instance, 1, rest),
            others_matrix(three_agent_instance, 1, full),
        )
        assert not others_matrix(three_agent_instance, 1, full)[1].any()

    def test_wrong_sizes_rejected(self, three_agent_instance):
        with pytest.raises(DimensionMismatchError):
            others_matrix(three_agent_instance, 0, np.zeros(3))
        with pytest.raises(DimensionMismatchError):
            others_matrix(three_agent_instance, 3, np.zeros(6))

    def test_nonpositive_effective_weight(self, antagonistic_pair):
        with pytest.raises(NonpositiveDTildeError) as exc_info:
            neighbor_preference(antagonistic_pair, 0, [0.0, 0.0])
        assert exc_info.value.context["d_tilde"] == [0.0]


@pytest.mark.unit
class TestBestResponse:
    """Test best responses as weighted projections."""

    def test_tiny_best_response_is_capped(self, tiny_instance):
        result = best_response_kkt(tiny_instance, 0, [2.0, 1.0])
        np.testing.assert_allclose(result.point, [2.0])
        assert result.multiplier == pytest.approx(-1.0)

    def test_best_response_maximizes_utility(self, three_agent_instance):
        rng = np.random.default_rng(29)
        fs = feasible_set(three_agent_instance)
        z = project_profile(fs, rng.uniform(0, 3, 6)).reshape(3, 2)
        for i in range(3):
            br = z.copy()
            br[i] = best_response(three_agent_instance, i, z)
            best = utility(three_agent_instance, i, br)
            for _ in range(20):
                trial = z.copy()
                trial[i] = project_profile(fs, rng.uniform(0, 4, 6)).reshape(3, 2)[i]
                assert utility(three_agent_instance, i, trial) <= best + 1e-10


@pytest.mark.unit
class TestSolveEquilibrium:
    """Test the three solution methods and their certificates."""

    def test_unconstrained_equilibrium(self, tiny_instance):
        np.testing.assert_allclose(unconstrained_equilibrium(tiny_instance), [8 / 3, 4 / 3])

    def test_unconstrained_equilibrium_singular(self, singular_instance):
        with pytest.raises(SingularJacobianError):
            unconstrained_equilibrium(singular_instance)

    @pytest.mark.parametrize("method", list(Method))
    def test_tiny_every_method(self, tiny_instance, method):
        report = solve_equilibrium(tiny_instance, method)
        np.testing.assert_allclose(report.point.z, [2.0, 1.0], atol=1e-6)
        assert report.method is method
        assert report.vi_certified
        assert report.nash_certified is True
        assert report.uniqueness is Uniqueness.UNIQUE
        assert report.potential_value == pytest.approx(-3.0, abs=1e-6)

    def test_methods_agree_on_friendly_instance(self, three_agent_instance):
        points = [solve_equilibrium(three_agent_instance, m).point.z for m in Method]
        for other in points[1:]:
            np.testing.assert_allclose(other, points[0], atol=1e-6)

    @pytest.mark.parametrize("fixture", ["tiny_instance", "three_agent_instance"])
    def test_potential_maximizer_beats_feasible_profiles(self, request, fixture):
        inst = request.getfixturevalue(fixture)
        best = potential(inst, solve_equilibrium(inst, Method.POTENTIAL_QP).point.z)
        fs = feasible_set(inst)
        rng = np.random.default_rng(31)
        samples = [random_feasible_profile(inst, seed) for seed in range(500)]
        samples += [project_profile(fs, rng.uniform(-2.0, 12.0, inst.dim)) for _ in range(500)]
        assert max(potential(inst, z) for z in samples) <= best + 1e-9

    def test_default_method(self, tiny_instance, antagonistic_pair):
        assert choose_method(tiny_instance) is Method.POTENTIAL_QP
        assert choose_method(antagonistic_pair) is Method.TRAJECTORY_LIMIT

    def test_antagonistic_pair(self, antagonistic_pair):
        """J = [[0, 1], [1, 0]] is indefinite; the dynamics settle at a corner."""
        with pytest.raises(NotPSDError):
            solve_equilibrium(antagonistic_pair, Method.POTENTIAL_QP)
        with pytest.raises(AssumptionViolatedError):
            solve_equilibrium(antagonistic_pair, Method.BEST_RESPONSE)

        report = solve_equilibrium(antagonistic_pair)
        assert report.method is Method.TRAJECTORY_LIMIT
        np.testing.assert_allclose(report.point.z, [0.0, 10.0], atol=1e-9)
        assert report.vi_certified
        assert report.nash_residuals is None
        assert report.nash_certified is None
        assert report.uniqueness is Uniqueness.UNKNOWN

    def test_singular_instance_is_not_unique(self, singular_instance):
        report = solve_equilibrium(singular_instance)
        z = report.point.z
        assert z.sum() == pytest.approx(2.0, abs=1e-6)
        assert report.vi_certified
        assert report.uniqueness is Uniqueness.UNKNOWN

    def test_iteration_cap(self, three_agent_instance):
        with pytest.raises(NoConvergenceError) as exc_info:
            solve_equilibrium(
                three_agent_instance, Method.POTENTIAL_QP, tol=Tolerances(max_iterations=2)
            )
        assert exc_info.value.context["iterations"] == 2


@pytest.mark.unit
class TestCertificates:
    """Test VI and Nash verification at given points."""

    def test_vi_margins_at_origin(self, tiny_instance):
        # f(0) = (-4, 0): agent 1 gains by moving to its vertex at 2
        np.testing.assert_allclose(verify_vi(tiny_instance, [0.0, 0.0]), [-8.0, 0.0])

    def test_nash_residuals_at_origin(self, tiny_instance):
        np.testing.assert_allclose(verify_nash(tiny_instance, [0.0, 0.0]), [2.0, 0.0])

    def test_certify_candidate(self, tiny_instance):
        report = certify(tiny_instance, [2.0, 1.0], Method.TRAJECTORY_LIMIT, iterations=7)
        assert report.iterations == 7
        assert report.residual == pytest.approx(0.0, abs=1e-12)
        assert report.potential_value == pytest.approx(potential(tiny_instance, [2.0, 1.0]))

    def test_certify_rejects_non_equilibrium(self, tiny_instance):
        report = certify(tiny_instance, [1.0, 1.0], Method.POTENTIAL_QP)
        assert not report.vi_certified
        assert report.nash_certified is False


@pytest.mark.unit
class TestBestResponseOrder:
    """Test that best responses at an equilibrium do not depend on update order."""

    @pytest.mark.parametrize("fixture", ["tiny_instance", "three_agent_instance"])
    def test_every_update_order_stays_put(self, request, fixture):
        inst = request.getfixturevalue(fixture)
        z_star = solve_equilibrium(inst, Method.BEST_RESPONSE).point.agents
        for order in permutations(range(inst.n)):
            zm = z_star.copy()
            for i in order:
                zm[i] = best_response(inst, i, zm.reshape(-1))
            assert np.abs(zm - z_star).max() <= DEFAULT_TOLERANCES.nash, order

    def test_simultaneous_update_matches_sequential(self, three_agent_instance):
        z = solve_equilibrium(three_agent_instance).point.z
        jacobi = np.concatenate(
            [best_response(three_agent_instance, i, z) for i in range(three_agent_instance.n)]
        )
        np.testing.assert_allclose(jacobi, z, atol=DEFAULT_TOLERANCES.nash)
