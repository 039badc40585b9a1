"""Per-agent budget polytopes, their product and active-set queries."""

from __future__ import annotations

from collections.abc import Callable, Iterator
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
import numpy.typing as npt

from ..domain.instance import FloatArray, ProblemInstance, frozen_array
from ..domain.tolerances import DEFAULT_TOLERANCES, Tolerances
from ..exceptions import (
    DimensionMismatchError,
    InfeasiblePointError,
    InstanceValidationError,
    OpinionPDSError,
    Violation,
)


@dataclass(frozen=True, eq=False)
class AgentPolytope:
    """``K_i = {z in R^m : c'z <= B, z >= 0}``."""

    cost: FloatArray
    budget: float

    def __post_init__(self) -> None:
        cost = frozen_array(self.cost).reshape(-1)
        problems = []
        if cost.size == 0 or not np.all(np.isfinite(cost)) or np.any(cost <= 0):
            problems.append(Violation("NONPOSITIVE_PARAMETER", "costs", "must be finite and > 0"))
        if not np.isfinite(self.budget) or self.budget <= 0:
            problems.append(Violation("NONPOSITIVE_PARAMETER", "budgets", "must be finite and > 0"))
        if problems:
            raise InstanceValidationError(problems)
        object.__setattr__(self, "cost", cost)
        object.__setattr__(self, "budget", float(self.budget))

    @property
    def m(self) -> int:
        return int(self.cost.size)

    def vertices(self) -> FloatArray:
        """The ``m + 1`` vertices: the origin and ``(B / c_j) e_j``."""
        verts = np.zeros((self.m + 1, self.m))
        verts[1:] = np.diag(self.budget / self.cost)
        return verts

    def violation(self, x: npt.ArrayLike) -> float:
        """Largest constraint violation of ``x`` (0 when feasible)."""
        xv = self._check(x)
        return float(max(0.0, -float(xv.min()), float(self.cost @ xv) - self.budget))

    def contains(self, x: npt.ArrayLike, tol: float = DEFAULT_TOLERANCES.feasibility) -> bool:
        return self.violation(x) <= tol

    def _check(self, x: npt.ArrayLike) -> FloatArray:
        xv = np.asarray(x, dtype=np.float64).reshape(-1)
        if xv.size != self.m:
            raise DimensionMismatchError("agent opinion", (self.m,), xv.size)
        return xv


@dataclass(frozen=True)
class ActiveSet:
    """Constraints active at a feasible point (0-based topic indices)."""

    nonneg_active: frozenset[int]
    budget_active: bool

    @property
    def empty(self) -> bool:
        return not self.nonneg_active and not self.budget_active


def active_set(
    poly: AgentPolytope,
    z: npt.ArrayLike,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ActiveSet:
    """Classify active constraints at ``z`` using the activity tolerance.

    Raises:
        InfeasiblePointError: If ``z`` violates the polytope by more than
            the feasibility tolerance.

    """
    zv = poly._check(z)
    violation = poly.violation(zv)
    if violation > tol.feasibility:
        raise InfeasiblePointError(violation, tol.feasibility)
    return ActiveSet(
        nonneg_active=frozenset(int(j) for j in np.flatnonzero(zv <= tol.activity)),
        budget_active=bool(poly.cost @ zv >= poly.budget - tol.activity),
    )


@dataclass(frozen=True, eq=False)
class FeasibleSet:
    """Product ``K = K_1 x ... x K_n`` of agent polytopes."""

    polytopes: tuple[AgentPolytope, ...]

    @classmethod
    def from_instance(cls, inst: ProblemInstance) -> FeasibleSet:
        return cls(
            tuple(
                AgentPolytope(inst.costs[i], float(inst.budgets[i]))
                for i in range(inst.n)
            )
        )

    @property
    def n(self) -> int:
        return len(self.polytopes)

    @property
    def m(self) -> int:
        return self.polytopes[0].m

    def __iter__(self) -> Iterator[AgentPolytope]:
        return iter(self.polytopes)

    def __getitem__(self, i: int) -> AgentPolytope:
        return self.polytopes[i]

    def split(self, z: npt.ArrayLike) -> FloatArray:
        """Stacked profile as an ``(n, m)`` array."""
        zv = np.asarray(z, dtype=np.float64)
        if zv.size != self.n * self.m:
            raise DimensionMismatchError("profile", (self.n * self.m,), zv.size)
        return zv.reshape(self.n, self.m)

    @cached_property
    def costs(self) -> FloatArray:
        """Costs as an ``(n, m)`` array."""
        return np.stack([p.cost for p in self.polytopes])

    @cached_property
    def budgets(self) -> FloatArray:
        return np.array([p.budget for p in self.polytopes])

    def violations(self, z: npt.ArrayLike) -> FloatArray:
        """Per-agent constraint violation, vectorized over agents."""
        zm = self.split(z)
        spend = np.einsum("ij,ij->i", self.costs, zm) - self.budgets
        return np.maximum(0.0, np.maximum(-zm.min(axis=1), spend))

    def worst_violation(self, z: npt.ArrayLike) -> tuple[float, int]:
        """Largest violation and the agent it occurs at."""
        per_agent = self.violations(z)
        i = int(np.argmax(per_agent))
        return float(per_agent[i]), i

    def contains(self, z: npt.ArrayLike, tol: float = DEFAULT_TOLERANCES.feasibility) -> bool:
        return self.worst_violation(z)[0] <= tol

    def require_feasible(
        self,
        z: npt.ArrayLike,
        tol: Tolerances = DEFAULT_TOLERANCES,
        error: Callable[[float, float, int], OpinionPDSError] = InfeasiblePointError,
    ) -> None:
        """Raise ``error`` if ``z`` lies outside ``K`` by more than the tolerance."""
        worst, agent = self.worst_violation(z)
        if worst > tol.feasibility:
            raise error(worst, tol.feasibility, agent)

    def active_sets(self, z: npt.ArrayLike, tol: Tolerances = DEFAULT_TOLERANCES) -> list[ActiveSet]:
        zm = self.split(z)
        return [active_set(p, zm[i], tol) for i, p in enumerate(self.polytopes)]


@lru_cache(maxsize=256)
def feasible_set(inst: ProblemInstance) -> FeasibleSet:
    """Cached feasible set of an instance."""
    return FeasibleSet.from_instance(inst)
