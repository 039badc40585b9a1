"""Exhaustive active-set oracles for small polytopes.

These solve the projection problems by enumerating every candidate active
set, so they are exponential in ``m`` and meant for cross-checking the fast
routines in :mod:`opinion_pds.geometry.projection` (``m <= 4`` or so).
"""

from __future__ import annotations

from itertools import combinations, product

import numpy as np
import numpy.typing as npt

from ..domain.instance import FloatArray
from ..domain.tolerances import DEFAULT_TOLERANCES, Tolerances
from .polytope import AgentPolytope, active_set


def enumerate_weighted_projection(
    poly: AgentPolytope,
    weights: npt.ArrayLike,
    x: npt.ArrayLike,
    slack: float = 1e-12,
) -> FloatArray:
    """Weighted projection by enumerating all ``2^(m+1)`` active sets.

    For each set of coordinates fixed at zero, and with the budget either
    free or held at equality, the equality-constrained least-squares point is
    formed in closed form. The feasible candidate with the smallest objective
    is the projection.
    """
    d = np.asarray(weights, dtype=np.float64).reshape(-1)
    xv = np.asarray(x, dtype=np.float64).reshape(-1)
    c, budget, m = poly.cost, poly.budget, poly.m
    best: FloatArray | None = None
    best_value = np.inf
    for zeros_mask, budget_tight in product(product((False, True), repeat=m), (False, True)):
        zeros = np.array(zeros_mask, dtype=bool)
        free = ~zeros
        cand = np.where(free, xv, 0.0)
        if budget_tight:
            if not free.any():
                continue
            ratio = c[free] / d[free]
            nu = (float(c[free] @ xv[free]) - budget) / float(c[free] @ ratio)
            cand[free] = xv[free] - nu * ratio
        if cand.min() < -slack or float(c @ cand) > budget + slack * max(1.0, budget):
            continue
        value = float(d @ (cand - xv) ** 2)
        if value < best_value:
            best, best_value = cand, value
    assert best is not None  # the origin is always a candidate
    return np.maximum(best, 0.0)


def enumerate_euclidean_projection(poly: AgentPolytope, x: npt.ArrayLike) -> FloatArray:
    return enumerate_weighted_projection(poly, np.ones(poly.m), x)


def enumerate_cone_projection(
    poly: AgentPolytope,
    z: npt.ArrayLike,
    v: npt.ArrayLike,
    tol: Tolerances = DEFAULT_TOLERANCES,
    slack: float = 1e-12,
) -> FloatArray:
    """Tangent-cone projection by enumerating subsets of active constraints.

    Each subset is held at equality and ``v`` is projected onto that subspace;
    the candidate inside the cone closest to ``v`` wins.
    """
    act = active_set(poly, z, tol)
    vv = np.asarray(v, dtype=np.float64).reshape(-1)
    rows = [-np.eye(poly.m)[j] for j in sorted(act.nonneg_active)]
    if act.budget_active:
        rows.append(poly.cost)
    if not rows:
        return vv.copy()
    normals = np.vstack(rows)
    best = np.zeros_like(vv)
    best_dist = float(vv @ vv)
    for size in range(len(rows) + 1):
        for subset in combinations(range(len(rows)), size):
            if subset:
                g = normals[list(subset)]
                cand = vv - g.T @ np.linalg.lstsq(g @ g.T, g @ vv, rcond=None)[0]
            else:
                cand = vv.copy()
            if np.all(normals @ cand <= slack * max(1.0, float(np.abs(vv).max()))):
                dist = float((cand - vv) @ (cand - vv))
                if dist < best_dist:
                    best, best_dist = cand, dist
    return best
