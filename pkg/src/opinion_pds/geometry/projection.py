"""Euclidean, weighted and tangent-cone projections onto budget polytopes.

The weighted projection solves

    min 1/2 ||z - x||^2_D  s.t.  c'z <= B, z >= 0

with ``D = diag(d)``. Its solution is ``z_j = max(0, x_j - nu c_j / d_j)``
for a multiplier ``nu >= 0`` that is zero when the clipped point already
meets the budget. When the budget binds, ``nu`` is found by scanning the
sorted breakpoints ``t_j = x_j d_j / c_j`` at which coordinates leave the
support, with a bracketing root finder as fallback.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy.optimize import brentq, nnls

from ..domain.instance import FloatArray
from ..domain.tolerances import DEFAULT_TOLERANCES, Tolerances
from ..exceptions import NonpositiveWeightError
from .polytope import ActiveSet, AgentPolytope, FeasibleSet, active_set


@dataclass(frozen=True, eq=False)
class WeightedProjection:
    """Projection result with its KKT multipliers.

    ``multiplier`` is the budget multiplier ``lambda <= 0`` in the stationarity
    condition ``D(z - x) - lambda c - mu = 0``.
    """

    point: FloatArray
    multiplier: float
    weights: FloatArray
    source: FloatArray
    cost: FloatArray

    @property
    def nonneg_multipliers(self) -> FloatArray:
        """``mu = D(z - x) - lambda c``, nonnegative and zero off the boundary."""
        return self.weights * (self.point - self.source) - self.multiplier * self.cost

    @property
    def budget_binding(self) -> bool:
        return self.multiplier < 0.0


def _knapsack(
    cost: FloatArray, budget: float, x: FloatArray, weights: FloatArray
) -> tuple[FloatArray, float]:
    clipped = np.maximum(x, 0.0)
    if float(cost @ clipped) <= budget:
        return clipped, 0.0

    ratio = cost / weights
    breaks = x / ratio
    order = np.argsort(-breaks, kind="stable")
    t_sorted = breaks[order]
    nus = (np.cumsum((cost * x)[order]) - budget) / np.cumsum((cost * ratio)[order])

    candidates = np.flatnonzero((t_sorted > 0) & (nus < t_sorted))
    if candidates.size:
        k = int(candidates[-1])
        nu = float(nus[k])
        lower = float(t_sorted[k + 1]) if k + 1 < t_sorted.size else -np.inf
        if nu > 0 and nu >= lower - 1e-12 * max(1.0, abs(lower)):
            return np.maximum(x - nu * ratio, 0.0), nu

    # breakpoint scan disagreed with itself (ties or roundoff); bracket instead
    def excess(nu: float) -> float:
        return float(cost @ np.maximum(x - nu * ratio, 0.0)) - budget

    upper = float(breaks.max())
    nu = float(brentq(excess, 0.0, upper, xtol=1e-15 * max(1.0, upper), rtol=1e-15))
    return np.maximum(x - nu * ratio, 0.0), nu


def project_weighted_kkt(
    poly: AgentPolytope, weights: npt.ArrayLike, x: npt.ArrayLike
) -> WeightedProjection:
    """Weighted projection together with its multipliers.

    Raises:
        NonpositiveWeightError: If any weight is not strictly positive.

    """
    w = np.asarray(weights, dtype=np.float64).reshape(-1)
    xv = poly._check(x)
    if w.size != poly.m or not np.all(w > 0) or not np.all(np.isfinite(w)):
        raise NonpositiveWeightError(w.tolist())
    point, nu = _knapsack(poly.cost, poly.budget, xv, w)
    return WeightedProjection(point=point, multiplier=-nu, weights=w, source=xv, cost=poly.cost)


def project_weighted(poly: AgentPolytope, weights: npt.ArrayLike, x: npt.ArrayLike) -> FloatArray:
    """``argmin_{z in K_i} 1/2 ||z - x||^2_D`` for positive weights ``d``."""
    return project_weighted_kkt(poly, weights, x).point


def project_euclidean(poly: AgentPolytope, x: npt.ArrayLike) -> FloatArray:
    """``argmin_{y in K_i} ||y - x||``."""
    xv = poly._check(x)
    return _knapsack(poly.cost, poly.budget, xv, np.ones(poly.m))[0]


def _cone_projection(cost: FloatArray, act: ActiveSet, v: FloatArray) -> FloatArray:
    u = np.array(v, dtype=np.float64, copy=True)
    if act.empty:
        return u
    idx = sorted(act.nonneg_active)
    if not act.budget_active:
        u[idx] = np.maximum(u[idx], 0.0)
        return u
    if not idx:
        excess = float(cost @ v)
        if excess > 0:
            u -= (excess / float(cost @ cost)) * cost
        return u
    if np.all(v[idx] >= 0) and float(cost @ v) <= 0:
        return u

    # Moreau: v = P_T(v) + P_polar(v); the polar cone is generated by the
    # outward normals of the active constraints
    normals = np.vstack([-np.eye(cost.size)[idx], cost[None, :]])
    eta, _ = nnls(normals.T, v)
    return v - normals.T @ eta


def project_tangent_cone(
    poly: AgentPolytope,
    z: npt.ArrayLike,
    v: npt.ArrayLike,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> FloatArray:
    """Project ``v`` onto the tangent cone of ``K_i`` at a feasible ``z``.

    Raises:
        InfeasiblePointError: If ``z`` is outside ``K_i`` beyond tolerance.

    """
    act = active_set(poly, z, tol)
    return _cone_projection(poly.cost, act, poly._check(v))


def project_profile(fs: FeasibleSet, z: npt.ArrayLike) -> FloatArray:
    """Euclidean projection of a stacked profile onto ``K``, agent by agent."""
    zm = fs.split(z)
    out = np.maximum(zm, 0.0)
    over = np.einsum("ij,ij->i", fs.costs, out) > fs.budgets
    ones = np.ones(fs.m)
    for i in np.flatnonzero(over):
        out[i] = _knapsack(fs.costs[i], float(fs.budgets[i]), zm[i], ones)[0]
    return out.reshape(-1)


def project_profile_tangent_cone(
    fs: FeasibleSet,
    z: npt.ArrayLike,
    v: npt.ArrayLike,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> FloatArray:
    """Tangent-cone projection on ``K``; the cone is the product of agent cones."""
    zm = fs.split(z)
    vm = fs.split(v)
    out = np.empty_like(vm)
    for i, poly in enumerate(fs):
        out[i] = _cone_projection(poly.cost, active_set(poly, zm[i], tol), vm[i])
    return out.reshape(-1)
