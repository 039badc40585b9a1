"""Unit tests for the closed-form model quantities."""

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from opinion_pds.domain.instance import build_instance
from opinion_pds.exceptions import DimensionMismatchError
from opinion_pds.model.dynamics import (
    Definiteness,
    jacobian_definiteness,
    jacobian_norm,
    lipschitz_constant,
    lyapunov,
    max_stable_step,
    potential,
    signed_laplacian,
    system_matrices,
    unconstrained_field,
    utility,
    vector_field,
)


@pytest.mark.unit
class TestSystemMatrices:
    """Test Laplacian, Jacobian and drift of small instances."""

    def test_tiny_jacobian_and_drift(self, tiny_instance):
        mats = system_matrices(tiny_instance)
        np.testing.assert_allclose(mats.jacobian, [[2.0, -1.0], [-1.0, 2.0]])
        np.testing.assert_allclose(mats.drift, [4.0, 0.0])

    def test_signed_laplacian_rows_sum_to_zero(self):
        lap = signed_laplacian([[0, 2, -1], [2, 0, 3], [-1, 3, 0]])
        np.testing.assert_allclose(lap.sum(axis=1), 0.0)
        assert lap[0, 0] == 1.0

    def test_jacobian_has_kronecker_structure(self, three_agent_instance):
        jac = system_matrices(three_agent_instance).jacobian
        assert jac.shape == (6, 6)
        # agents 1 and 2 interact topic by topic only
        assert jac[0, 2] == -1.5
        assert jac[0, 3] == 0.0

    def test_stability_bound(self, tiny_instance):
        assert jacobian_norm(tiny_instance) == pytest.approx(3.0)
        assert max_stable_step(tiny_instance) == pytest.approx(1.0 / 6.0)


@pytest.mark.unit
class TestFieldAndPotential:
    """Test vector field, utilities and the potential."""

    def test_field_vanishes_at_unconstrained_equilibrium(self, tiny_instance):
        q = np.array([8.0 / 3.0, 4.0 / 3.0])
        np.testing.assert_allclose(vector_field(tiny_instance, q), 0.0, atol=1e-12)
        np.testing.assert_allclose(unconstrained_field(tiny_instance, q), 0.0, atol=1e-12)

    def test_field_is_affine_in_jacobian(self, three_agent_instance):
        rng = np.random.default_rng(3)
        z = rng.uniform(0, 3, 6)
        mats = system_matrices(three_agent_instance)
        np.testing.assert_allclose(
            vector_field(three_agent_instance, z), mats.jacobian @ z - mats.drift, atol=1e-12
        )

    def test_tiny_potential_at_equilibrium(self, tiny_instance):
        assert potential(tiny_instance, [2.0, 1.0]) == pytest.approx(-3.0, abs=1e-12)
        assert lyapunov(tiny_instance, [2.0, 1.0]) == pytest.approx(3.0, abs=1e-12)

    def test_potential_gradient_is_minus_field(self, three_agent_instance):
        rng = np.random.default_rng(5)
        z = rng.uniform(0, 3, 6)
        h = 1e-6
        grad = np.array(
            [
                (potential(three_agent_instance, z + h * e) - potential(three_agent_instance, z - h * e))
                / (2 * h)
                for e in np.eye(6)
            ]
        )
        np.testing.assert_allclose(grad, -vector_field(three_agent_instance, z), atol=1e-5)

    def test_unilateral_change_matches_potential(self, three_agent_instance):
        """Utility differences of one agent equal potential differences."""
        rng = np.random.default_rng(11)
        base = rng.uniform(0, 4, (3, 2))
        moved = base.copy()
        moved[1] = rng.uniform(0, 4, 2)
        du = utility(three_agent_instance, 1, moved) - utility(three_agent_instance, 1, base)
        dw = potential(three_agent_instance, moved) - potential(three_agent_instance, base)
        assert du == pytest.approx(dw, rel=1e-10, abs=1e-10)

    def test_utility_rejects_unknown_agent(self, tiny_instance):
        with pytest.raises(DimensionMismatchError):
            utility(tiny_instance, 2, [0.0, 0.0])


@pytest.mark.unit
class TestDefiniteness:
    """Test definiteness classification of J."""

    def test_friendly_instance_is_positive_definite(self, tiny_instance):
        assert jacobian_definiteness(tiny_instance) is Definiteness.POSITIVE_DEFINITE

    def test_singular_instance_is_semidefinite(self, singular_instance):
        assert jacobian_definiteness(singular_instance) is Definiteness.POSITIVE_SEMIDEFINITE

    def test_strong_antagonism_is_indefinite(self, make_raw):
        inst = build_instance(make_raw([[0, -2], [-2, 0]], [[1], [1]]))
        # J = [[-1, 2], [2, -1]] has eigenvalues 1 and -3
        assert jacobian_definiteness(inst) is Definiteness.INDEFINITE


finite = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False, allow_infinity=False)
positive = st.floats(min_value=0.1, max_value=10.0, allow_nan=False, allow_infinity=False)
nonnegative = st.floats(min_value=0.0, max_value=50.0, allow_nan=False, allow_infinity=False)


@st.composite
def instances_and_profiles(draw):
    """A complete signed instance and an arbitrary (not necessarily feasible) profile."""
    n = draw(st.integers(min_value=1, max_value=4))
    m = draw(st.integers(min_value=1, max_value=3))
    magnitude = draw(arrays(np.float64, (n, n), elements=positive))
    sign = np.where(draw(arrays(np.bool_, (n, n))), -1.0, 1.0)
    upper = np.triu(sign * magnitude, k=1)
    raw = {
        "influence": (upper + upper.T).tolist(),
        "preferences": draw(arrays(np.float64, (n, m), elements=nonnegative)).tolist(),
        "pref_weights": draw(arrays(np.float64, (n, m), elements=positive)).tolist(),
        "costs": draw(arrays(np.float64, (n, m), elements=positive)).tolist(),
        "budgets": draw(arrays(np.float64, n, elements=positive)).tolist(),
    }
    return build_instance(raw), draw(arrays(np.float64, n * m, elements=finite))


@pytest.mark.unit
@pytest.mark.property
class TestFieldGrowth:
    """Test the affine growth bound of the vector field."""

    def test_tiny_constant(self, tiny_instance):
        # ||J|| = 3 and ||Dp|| = 4
        assert lipschitz_constant(tiny_instance) == pytest.approx(4.0)

    @given(instances_and_profiles())
    @settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
    def test_field_grows_at_most_affinely(self, case):
        inst, z = case
        alpha = lipschitz_constant(inst)
        bound = alpha * (1.0 + np.linalg.norm(z))
        assert np.linalg.norm(vector_field(inst, z)) <= bound * (1.0 + 1e-12) + 1e-12
