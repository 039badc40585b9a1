"""Fixed-step integration of the projected opinion dynamics.

Two discretizations are provided. ``projected-euler`` takes
``z+ = P_K(z - delta f(z))`` and is feasible by construction.
``tangent-euler`` moves along the tangent-cone projection of ``-f(z)`` and
then re-projects onto ``K`` as a safeguard. Both converge to the same
equilibria and are kept side by side for cross-validation.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import numpy.typing as npt

from ..domain.instance import FloatArray, OpinionProfile, ProblemInstance, as_vector
from ..domain.tolerances import DEFAULT_TOLERANCES, Tolerances
from ..exceptions import (
    ConfigurationError,
    InfeasibleStartError,
    StepTooLargeError,
)
from ..geometry.polytope import FeasibleSet, feasible_set
from ..geometry.projection import project_profile, project_profile_tangent_cone
from ..logging import get_logger, log_simulation_run
from ..model.dynamics import (
    lipschitz_constant,
    max_stable_step,
    potential,
    vector_field,
)

logger = get_logger(__name__)


class Scheme(str, Enum):
    TANGENT_EULER = "tangent-euler"
    PROJECTED_EULER = "projected-euler"


class Termination(str, Enum):
    HORIZON = "horizon"
    RESIDUAL = "residual"
    STALL = "stall"
    ITERATION_CAP = "iteration-cap"


@dataclass(frozen=True)
class SimConfig:
    """Integration settings.

    ``max_step`` overrides the default stability bound ``1 / (2 ||J||)``.
    A run stalls when the best residual seen has not improved by a relative
    ``stall_rtol`` over ``ceil(stall_window / step)`` consecutive steps.
    """

    step: float
    t_end: float
    stop_residual: float = 1e-8
    record_every: int = 1
    scheme: Scheme = Scheme.PROJECTED_EULER
    max_step: float | None = None
    stall_window: float = 10.0
    stall_rtol: float = 1e-3

    def __post_init__(self) -> None:
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        problems = [
            name
            for name, ok in (
                ("step", self.step > 0),
                ("t_end", self.t_end > 0),
                ("stop_residual", self.stop_residual > 0),
                ("record_every", self.record_every >= 1),
                ("max_step", self.max_step is None or self.max_step > 0),
                ("stall_window", self.stall_window > 0),
                ("stall_rtol", 0 < self.stall_rtol < 1),
            )
            if not ok
        ]
        if problems:
            raise ConfigurationError("SimConfig", "invalid " + ", ".join(problems))


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    profile: OpinionProfile
    potential: float
    residual: float


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Recorded samples of one integration run, stored column-wise."""

    times: FloatArray
    states: FloatArray
    potentials: FloatArray
    residuals: FloatArray
    terminated_by: Termination
    scheme: Scheme
    step: float
    m: int
    steps_taken: int = 0
    elapsed: float = field(default=0.0, compare=False)

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def final(self) -> OpinionProfile:
        return OpinionProfile(self.states[-1], self.m, time=float(self.times[-1]), feasible=True)

    @property
    def final_residual(self) -> float:
        return float(self.residuals[-1])

    @property
    def samples(self) -> list[TrajectorySample]:
        return [
            TrajectorySample(
                t=float(t),
                profile=OpinionProfile(z, self.m, time=float(t), feasible=True),
                potential=float(w),
                residual=float(r),
            )
            for t, z, w, r in zip(
                self.times, self.states, self.potentials, self.residuals, strict=True
            )
        ]


def _advance(
    inst: ProblemInstance,
    fs: FeasibleSet,
    z: FloatArray,
    delta: float,
    scheme: Scheme,
    tol: Tolerances,
) -> FloatArray:
    f = vector_field(inst, z)
    if scheme is Scheme.PROJECTED_EULER:
        return project_profile(fs, z - delta * f)
    direction = project_profile_tangent_cone(fs, z, -f, tol)
    return project_profile(fs, z + delta * direction)


def _residual(inst: ProblemInstance, fs: FeasibleSet, z: FloatArray, tol: Tolerances) -> float:
    return float(np.linalg.norm(project_profile_tangent_cone(fs, z, -vector_field(inst, z), tol)))


def _displacement_bound(alpha: float, z: FloatArray, delta: float, slack: float) -> float:
    # both schemes move at most delta ||f(z)|| from a feasible z
    return delta * alpha * (1.0 + float(np.linalg.norm(z))) * (1.0 + 1e-9) + slack


def _check_displacement(
    alpha: float, z: FloatArray, nxt: FloatArray, delta: float, tol: Tolerances
) -> None:
    moved = float(np.linalg.norm(nxt - z))
    bound = _displacement_bound(alpha, z, delta, tol.feasibility)
    if moved > bound:
        raise StepTooLargeError(moved, bound, "displacement")


def step(
    inst: ProblemInstance,
    z: npt.ArrayLike | OpinionProfile,
    delta: float,
    scheme: Scheme | str = Scheme.PROJECTED_EULER,
    *,
    max_step: float | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> OpinionProfile:
    """Advance a feasible profile by one step of length ``delta``.

    Raises:
        InfeasiblePointError: If ``z`` is not feasible.
        StepTooLargeError: If ``delta`` exceeds ``max_step`` (default
            ``1 / (2 ||J||)``), or the move exceeds ``delta alpha (1 + ||z||)``.

    """
    if not delta > 0:
        raise ConfigurationError("step", f"delta must be positive, got {delta}")
    limit = max_step if max_step is not None else max_stable_step(inst)
    if delta > limit:
        raise StepTooLargeError(delta, limit, "step")
    vec = as_vector(inst, z)
    fs = feasible_set(inst)
    fs.require_feasible(vec, tol)
    nxt = _advance(inst, fs, vec, delta, Scheme(scheme), tol)
    _check_displacement(lipschitz_constant(inst), vec, nxt, delta, tol)
    start = z.time if isinstance(z, OpinionProfile) else 0.0
    return OpinionProfile(nxt, inst.m, time=start + delta, feasible=True)


def residual(
    inst: ProblemInstance,
    z: npt.ArrayLike | OpinionProfile,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """``r(z) = ||P_{T_K(z)}(-f(z))||``; zero exactly at equilibria.

    Raises:
        InfeasiblePointError: If ``z`` is not feasible.

    """
    vec = as_vector(inst, z)
    fs = feasible_set(inst)
    fs.require_feasible(vec, tol)
    return _residual(inst, fs, vec, tol)


def simulate(
    inst: ProblemInstance,
    z0: npt.ArrayLike | OpinionProfile,
    cfg: SimConfig,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Trajectory:
    """Integrate from a feasible start until the horizon, a small residual or a stall.

    At most ``tol.max_iterations`` steps are taken; a run cut short of
    ``t_end`` by that cap ends with ``iteration-cap``.

    The initial sample is always recorded, as is the terminal one. When the
    start is already an equilibrium the trajectory holds that single sample.

    Raises:
        InfeasibleStartError: If ``z0`` is not feasible.
        StepTooLargeError: If ``cfg.step`` exceeds the stability bound, or a
            single move exceeds the displacement bound.

    """
    started = time.perf_counter()
    z = np.array(as_vector(inst, z0), dtype=np.float64, copy=True)
    fs = feasible_set(inst)
    fs.require_feasible(z, tol, error=InfeasibleStartError)

    limit = cfg.max_step if cfg.max_step is not None else max_stable_step(inst)
    if cfg.step > limit:
        raise StepTooLargeError(cfg.step, limit, "step")

    horizon_steps = math.ceil(cfg.t_end / cfg.step - 1e-9)
    n_steps = min(horizon_steps, tol.max_iterations)
    window = max(1, math.ceil(cfg.stall_window / cfg.step))
    alpha = lipschitz_constant(inst)

    times = [0.0]
    states = [z.copy()]
    pots = [potential(inst, z)]
    r = _residual(inst, fs, z, tol)
    resids = [r]

    reason = Termination.HORIZON
    best = r
    best_at_window = r
    k = 0
    if r <= cfg.stop_residual:
        reason = Termination.RESIDUAL
    else:
        for k in range(1, n_steps + 1):
            nxt = _advance(inst, fs, z, cfg.step, cfg.scheme, tol)
            _check_displacement(alpha, z, nxt, cfg.step, tol)
            z = nxt
            r = _residual(inst, fs, z, tol)
            best = min(best, r)

            stop: Termination | None = None
            if r <= cfg.stop_residual:
                stop = Termination.RESIDUAL
            elif k % window == 0:
                if best > (1.0 - cfg.stall_rtol) * best_at_window:
                    stop = Termination.STALL
                best_at_window = best

            if stop is not None or k % cfg.record_every == 0 or k == n_steps:
                times.append(k * cfg.step)
                states.append(z.copy())
                pots.append(potential(inst, z))
                resids.append(r)
            if stop is not None:
                reason = stop
                break
        else:
            if n_steps < horizon_steps:
                reason = Termination.ITERATION_CAP

    elapsed = time.perf_counter() - started
    log_simulation_run(
        logger,
        cfg.scheme.value,
        steps=k,
        terminated_by=reason.value,
        final_residual=r,
        elapsed=elapsed,
    )
    return Trajectory(
        times=np.asarray(times),
        states=np.vstack(states),
        potentials=np.asarray(pots),
        residuals=np.asarray(resids),
        terminated_by=reason,
        scheme=cfg.scheme,
        step=cfg.step,
        m=inst.m,
        steps_taken=k,
        elapsed=elapsed,
    )
