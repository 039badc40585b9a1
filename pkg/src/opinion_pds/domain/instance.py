"""Problem data, opinion profiles and instance validation.

A problem instance holds ``n`` agents and ``m`` topics: a symmetric influence
matrix with zero diagonal, and per-agent preferences, preference weights,
costs and budgets. Everything is stored as read-only numpy arrays so an
instance can be shared across threads without copying.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc

from ..exceptions import DimensionMismatchError, InstanceValidationError, Violation

FloatArray = npt.NDArray[np.float64]

RAW_FIELDS = ("influence", "preferences", "pref_weights", "costs", "budgets")


def frozen_array(values: npt.ArrayLike) -> FloatArray:
    arr = np.array(values, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """Validated problem data; build through :func:`build_instance`."""

    influence: FloatArray
    preferences: FloatArray
    pref_weights: FloatArray
    costs: FloatArray
    budgets: FloatArray

    @property
    def n(self) -> int:
        return int(self.influence.shape[0])

    @property
    def m(self) -> int:
        return int(self.preferences.shape[1])

    @property
    def dim(self) -> int:
        return self.n * self.m

    def agent_slice(self, i: int) -> slice:
        """Slice of agent ``i`` inside a stacked profile."""
        return slice(i * self.m, (i + 1) * self.m)

    @property
    def has_antagonists(self) -> bool:
        """True when some influence weight is negative."""
        return bool((self.influence < 0).any())

    def to_raw(self) -> dict[str, Any]:
        """Plain nested lists accepted back by :func:`build_instance`."""
        return {name: getattr(self, name).tolist() for name in RAW_FIELDS}


@dataclass(frozen=True, eq=False)
class OpinionProfile:
    """Stacked opinions ``[z_1; ...; z_n]`` at a point in simulated time."""

    z: FloatArray
    m: int
    time: float = 0.0
    feasible: bool = False

    def __post_init__(self) -> None:
        z = frozen_array(self.z).reshape(-1)
        if self.m < 1 or z.size % self.m:
            raise DimensionMismatchError("profile length (a multiple of m)", (self.m,), z.size)
        object.__setattr__(self, "z", z)

    @classmethod
    def of(
        cls,
        inst: ProblemInstance,
        z: npt.ArrayLike | OpinionProfile,
        time: float = 0.0,
        feasible: bool = False,
    ) -> OpinionProfile:
        return cls(as_vector(inst, z), inst.m, time=time, feasible=feasible)

    @property
    def agents(self) -> FloatArray:
        """Opinions as an ``(n, m)`` view."""
        return self.z.reshape(-1, self.m)

    def agent(self, i: int) -> FloatArray:
        return self.agents[i]


@dataclass(frozen=True, eq=False)
class SystemMatrices:
    """Signed Laplacian ``L``, Jacobian ``J = D + L (x) I_m`` and drift ``Dp``."""

    laplacian: FloatArray
    jacobian: FloatArray
    drift: FloatArray


def as_vector(inst: ProblemInstance, z: npt.ArrayLike | OpinionProfile) -> FloatArray:
    """Return ``z`` as a float vector of length ``n*m``.

    Accepts profiles, flat vectors and ``(n, m)`` matrices.

    Raises:
        DimensionMismatchError: If the size does not match the instance.

    """
    raw = z.z if isinstance(z, OpinionProfile) else z
    arr = np.asarray(raw, dtype=np.float64)
    if arr.shape not in {(inst.dim,), (inst.n, inst.m)}:
        raise DimensionMismatchError("profile", (inst.dim,), tuple(arr.shape))
    return arr.reshape(-1)


def connected_components(influence: npt.ArrayLike) -> tuple[int, npt.NDArray[np.int32]]:
    """Components of the graph whose edges are the nonzero off-diagonal entries."""
    a = np.asarray(influence, dtype=np.float64)
    adjacency = (a != 0) | (a.T != 0)
    np.fill_diagonal(adjacency, False)
    count, labels = _cc(csr_matrix(adjacency), directed=False)
    return int(count), labels


def _as_array(
    raw: Mapping[str, Any], name: str, violations: list[Violation]
) -> FloatArray | None:
    if name not in raw:
        violations.append(Violation("DIMENSION_MISMATCH", name, "missing"))
        return None
    try:
        return np.array(raw[name], dtype=np.float64)
    except (TypeError, ValueError) as exc:
        violations.append(Violation("DIMENSION_MISMATCH", name, f"not numeric: {exc}"))
        return None


def _check_shapes(
    arrays: dict[str, FloatArray], raw: Mapping[str, Any]
) -> list[Violation]:
    out: list[Violation] = []
    a, p = arrays["influence"], arrays["preferences"]
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        out.append(Violation("DIMENSION_MISMATCH", "influence", f"shape {a.shape} is not n x n"))
        return out
    n = a.shape[0]
    if p.ndim != 2 or p.shape[0] != n or p.shape[1] < 1:
        out.append(Violation("DIMENSION_MISMATCH", "preferences", f"shape {p.shape}, expected ({n}, m)"))
        return out
    m = p.shape[1]
    for name in ("pref_weights", "costs"):
        if arrays[name].shape != (n, m):
            out.append(
                Violation("DIMENSION_MISMATCH", name, f"shape {arrays[name].shape}, expected {(n, m)}")
            )
    if arrays["budgets"].shape != (n,):
        out.append(
            Violation("DIMENSION_MISMATCH", "budgets", f"shape {arrays['budgets'].shape}, expected ({n},)")
        )
    for key, actual in (("n", n), ("m", m)):
        declared = raw.get(key)
        if declared is not None and declared != actual:
            out.append(Violation("DIMENSION_MISMATCH", key, f"declared {declared}, data has {actual}"))
    return out


def _positions(mask: npt.NDArray[np.bool_], limit: int = 5) -> str:
    idx = [tuple(int(v) + 1 for v in np.atleast_1d(pos)) for pos in np.argwhere(mask)[:limit]]
    labels = ", ".join(str(t[0]) if len(t) == 1 else str(t) for t in idx)
    return labels + (" ..." if mask.sum() > limit else "")


def build_instance(raw: Mapping[str, Any], *, require_connected: bool = True) -> ProblemInstance:
    """Validate raw problem data and return an immutable instance.

    Args:
        raw: Mapping with ``influence`` (n x n), ``preferences``, ``pref_weights``
            and ``costs`` (n x m each) and ``budgets`` (n). Optional ``n``/``m``
            entries are checked against the data.
        require_connected: Reject disconnected influence graphs. Pass False to
            accept them and analyze components with :func:`split_components`.

    Raises:
        InstanceValidationError: Listing every violated invariant.

    """
    violations: list[Violation] = []
    parsed = {name: _as_array(raw, name, violations) for name in RAW_FIELDS}
    if violations:
        raise InstanceValidationError(violations)
    arrays: dict[str, FloatArray] = {k: v for k, v in parsed.items() if v is not None}

    violations.extend(_check_shapes(arrays, raw))
    if violations:
        raise InstanceValidationError(violations)

    for name, arr in arrays.items():
        bad = ~np.isfinite(arr)
        if bad.any():
            violations.append(Violation("NONFINITE_VALUE", name, f"at {_positions(bad)}"))
    if violations:
        raise InstanceValidationError(violations)

    a = arrays["influence"]
    asym = np.triu(a != a.T, k=1)
    if asym.any():
        violations.append(Violation("ASYMMETRIC_INFLUENCE", "influence", f"a_ik != a_ki at {_positions(asym)}"))
    diag = np.diag(a) != 0
    if diag.any():
        violations.append(Violation("NONZERO_SELF_LOOP", "influence", f"a_ii != 0 for agents {_positions(diag)}"))

    sign_rules = (
        ("preferences", arrays["preferences"] < 0, "must be >= 0"),
        ("pref_weights", arrays["pref_weights"] <= 0, "must be > 0"),
        ("costs", arrays["costs"] <= 0, "must be > 0"),
        ("budgets", arrays["budgets"] <= 0, "must be > 0"),
    )
    for name, bad, rule in sign_rules:
        if bad.any():
            violations.append(Violation("NONPOSITIVE_PARAMETER", name, f"{rule} at {_positions(bad)}"))

    if require_connected and a.shape[0] > 1:
        count, labels = connected_components(a)
        if count > 1:
            violations.append(
                Violation("DISCONNECTED_GRAPH", "influence", f"{count} components, labels {(labels + 1).tolist()}")
            )

    if violations:
        raise InstanceValidationError(violations)

    return ProblemInstance(**{name: frozen_array(arrays[name]) for name in RAW_FIELDS})


def split_components(inst: ProblemInstance) -> list[tuple[npt.NDArray[np.intp], ProblemInstance]]:
    """Split an instance into one sub-instance per connected component.

    Returns ``(members, sub_instance)`` pairs ordered by smallest member index.
    """
    _, labels = connected_components(inst.influence)
    parts: list[tuple[npt.NDArray[np.intp], ProblemInstance]] = []
    seen: list[int] = []
    for label in labels:
        if int(label) in seen:
            continue
        seen.append(int(label))
        members = np.flatnonzero(labels == label)
        sub = ProblemInstance(
            influence=frozen_array(inst.influence[np.ix_(members, members)]),
            preferences=frozen_array(inst.preferences[members]),
            pref_weights=frozen_array(inst.pref_weights[members]),
            costs=frozen_array(inst.costs[members]),
            budgets=frozen_array(inst.budgets[members]),
        )
        parts.append((members, sub))
    return parts
