"""Equilibrium computation and certification.

Three methods reach an equilibrium:

* ``potential-qp`` maximizes the potential ``W`` over ``K`` by projected
  gradient ascent with step ``1 / ||J||``; it needs ``J`` positive
  semidefinite.
* ``best-response`` runs cyclic best responses in ascending agent order; it
  needs nonnegative influence weights.
* ``trajectory-limit`` integrates the projected dynamics until the residual
  vanishes and is always available.

Every result carries a vertex-based variational-inequality certificate and,
where best responses are defined, the Nash residuals.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt
from scipy import linalg

from ..domain.instance import FloatArray, OpinionProfile, ProblemInstance, as_vector
from ..domain.tolerances import DEFAULT_TOLERANCES, Tolerances
from ..dynamics.integrator import SimConfig, Termination, simulate
from ..dynamics.integrator import residual as pds_residual
from ..exceptions import (
    AssumptionViolatedError,
    NoConvergenceError,
    NonpositiveDTildeError,
    NotPSDError,
    SingularJacobianError,
)
from ..geometry.polytope import feasible_set
from ..geometry.projection import project_profile
from ..logging import get_logger, log_solver_event
from ..model.dynamics import (
    Definiteness,
    jacobian_definiteness,
    jacobian_norm,
    jacobian_spectrum,
    max_stable_step,
    potential,
    system_matrices,
    vector_field,
)
from .best_response import best_response

logger = get_logger(__name__)


class Method(str, Enum):
    POTENTIAL_QP = "potential-qp"
    BEST_RESPONSE = "best-response"
    TRAJECTORY_LIMIT = "trajectory-limit"


class Uniqueness(str, Enum):
    UNIQUE = "unique"
    UNKNOWN = "unknown"


@dataclass(frozen=True, eq=False)
class EquilibriumReport:
    """A computed equilibrium with its certificates.

    ``nash_residuals`` is None when some agent's effective weights are not
    positive, since best responses are then undefined.
    """

    point: OpinionProfile
    vi_certificate: FloatArray
    nash_residuals: FloatArray | None
    method: Method
    potential_value: float
    uniqueness: Uniqueness
    iterations: int
    residual: float
    tol: Tolerances = DEFAULT_TOLERANCES

    @property
    def vi_certified(self) -> bool:
        return bool(self.vi_certificate.min() >= -self.tol.vi)

    @property
    def nash_certified(self) -> bool | None:
        if self.nash_residuals is None:
            return None
        return bool(self.nash_residuals.max() <= self.tol.nash)


def unconstrained_equilibrium(inst: ProblemInstance) -> FloatArray:
    """``q* = J^{-1} D p``, the rest point of the dynamics without constraints.

    Raises:
        SingularJacobianError: If ``J`` is numerically singular.

    """
    eig = jacobian_spectrum(inst)
    smallest = float(np.abs(eig).min())
    if smallest <= 1e-12 * jacobian_norm(inst):
        raise SingularJacobianError(smallest)
    mats = system_matrices(inst)
    return np.asarray(linalg.solve(mats.jacobian, mats.drift, assume_a="sym"))


def verify_vi(
    inst: ProblemInstance,
    z: npt.ArrayLike | OpinionProfile,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> FloatArray:
    """Per-agent worst margin ``min_v <f_i(z), v - z_i>`` over polytope vertices.

    The per-agent objective is affine, so its minimum over ``K_i`` sits at a
    vertex; all margins ``>= -tol.vi`` certify ``z`` solves the VI.

    Raises:
        InfeasiblePointError: If ``z`` is not feasible.

    """
    vec = as_vector(inst, z)
    fs = feasible_set(inst)
    fs.require_feasible(vec, tol)
    f = vector_field(inst, vec).reshape(inst.n, inst.m)
    zm = vec.reshape(inst.n, inst.m)
    return np.array(
        [float(((poly.vertices() - zm[i]) @ f[i]).min()) for i, poly in enumerate(fs)]
    )


def verify_nash(
    inst: ProblemInstance,
    z: npt.ArrayLike | OpinionProfile,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> FloatArray:
    """Per-agent distance ``||z_i - BR_i(z_-i)||``.

    Raises:
        InfeasiblePointError: If ``z`` is not feasible.
        NonpositiveDTildeError: If a best response is undefined.

    """
    vec = as_vector(inst, z)
    feasible_set(inst).require_feasible(vec, tol)
    zm = vec.reshape(inst.n, inst.m)
    return np.array(
        [float(np.linalg.norm(zm[i] - best_response(inst, i, vec))) for i in range(inst.n)]
    )


def _converged(inst: ProblemInstance, change: float, z: FloatArray, tol: Tolerances) -> bool:
    """Step below ``tol.solver`` with vertex margins within ``tol.vi``, or a step at roundoff level."""
    scale = max(1.0, float(np.linalg.norm(z)))
    if change > tol.solver * scale:
        return False
    if change <= 8.0 * np.finfo(float).eps * scale:
        return True
    return bool(verify_vi(inst, z.reshape(-1), tol=tol).min() >= -tol.vi)


def _potential_qp(inst: ProblemInstance, tol: Tolerances) -> tuple[FloatArray, int]:
    definiteness = jacobian_definiteness(inst)
    if definiteness is Definiteness.INDEFINITE:
        raise NotPSDError(float(jacobian_spectrum(inst)[0]))
    fs = feasible_set(inst)
    rate = 1.0 / jacobian_norm(inst)
    z = np.zeros(inst.dim)
    change = np.inf
    for it in range(1, tol.max_iterations + 1):
        nxt = project_profile(fs, z - rate * vector_field(inst, z))
        change = float(np.linalg.norm(nxt - z))
        z = nxt
        if _converged(inst, change, z, tol):
            return z, it
    raise NoConvergenceError(Method.POTENTIAL_QP.value, tol.max_iterations, change)


def _best_response_sweeps(inst: ProblemInstance, tol: Tolerances) -> tuple[FloatArray, int]:
    if inst.has_antagonists:
        raise AssumptionViolatedError("A1 (no antagonistic relations)", Method.BEST_RESPONSE.value)
    zm = np.zeros((inst.n, inst.m))
    change = np.inf
    for sweep in range(1, tol.max_iterations + 1):
        before = zm.copy()
        for i in range(inst.n):
            zm[i] = best_response(inst, i, zm)
        change = float(np.linalg.norm(zm - before))
        if _converged(inst, change, zm, tol):
            return zm.reshape(-1), sweep
    raise NoConvergenceError(Method.BEST_RESPONSE.value, tol.max_iterations, change)


def default_limit_config(inst: ProblemInstance, tol: Tolerances = DEFAULT_TOLERANCES) -> SimConfig:
    """Integration settings for ``trajectory-limit``.

    The stop residual scales with the polytope diameter so that the vertex
    margins of the limit point stay well inside ``tol.vi``.
    """
    reach = float(np.linalg.norm((inst.budgets[:, None] / inst.costs).max(axis=1)))
    delta = max_stable_step(inst)
    return SimConfig(
        step=delta,
        t_end=delta * tol.max_iterations,
        stop_residual=1e-2 * tol.vi / max(1.0, reach),
    )


def _trajectory_limit(
    inst: ProblemInstance,
    tol: Tolerances,
    z0: npt.ArrayLike | OpinionProfile | None,
    cfg: SimConfig | None,
) -> tuple[FloatArray, int]:
    start = np.zeros(inst.dim) if z0 is None else as_vector(inst, z0)
    traj = simulate(inst, start, cfg or default_limit_config(inst, tol), tol=tol)
    if traj.terminated_by is not Termination.RESIDUAL:
        raise NoConvergenceError(Method.TRAJECTORY_LIMIT.value, traj.steps_taken, traj.final_residual)
    return traj.states[-1].copy(), traj.steps_taken


def choose_method(inst: ProblemInstance) -> Method:
    """``potential-qp`` when ``J`` is positive semidefinite, else ``trajectory-limit``."""
    if jacobian_definiteness(inst) is Definiteness.INDEFINITE:
        return Method.TRAJECTORY_LIMIT
    return Method.POTENTIAL_QP


def certify(
    inst: ProblemInstance,
    z: npt.ArrayLike | OpinionProfile,
    method: Method,
    *,
    iterations: int = 0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> EquilibriumReport:
    """Build a report for a candidate point without solving anything."""
    vec = np.array(as_vector(inst, z), dtype=np.float64, copy=True)
    try:
        nash: FloatArray | None = verify_nash(inst, vec, tol=tol)
    except NonpositiveDTildeError:
        nash = None
    definiteness = jacobian_definiteness(inst)
    return EquilibriumReport(
        point=OpinionProfile(vec, inst.m, feasible=True),
        vi_certificate=verify_vi(inst, vec, tol=tol),
        nash_residuals=nash,
        method=method,
        potential_value=potential(inst, vec),
        uniqueness=(
            Uniqueness.UNIQUE
            if definiteness is Definiteness.POSITIVE_DEFINITE
            else Uniqueness.UNKNOWN
        ),
        iterations=iterations,
        residual=pds_residual(inst, vec, tol=tol),
        tol=tol,
    )


def solve_equilibrium(
    inst: ProblemInstance,
    method: Method | str | None = None,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
    z0: npt.ArrayLike | OpinionProfile | None = None,
    sim_config: SimConfig | None = None,
) -> EquilibriumReport:
    """Compute and certify an equilibrium.

    Args:
        inst: Problem instance.
        method: Solver method; None picks one from the definiteness of ``J``.
        tol: Tolerances and iteration cap.
        z0: Start of the trajectory for ``trajectory-limit`` (zeros by default).
        sim_config: Integration settings for ``trajectory-limit``.

    Raises:
        NotPSDError: ``potential-qp`` on an indefinite ``J``.
        AssumptionViolatedError: ``best-response`` with antagonistic relations.
        NoConvergenceError: The method hit its iteration cap.

    """
    chosen = choose_method(inst) if method is None else Method(method)
    started = time.perf_counter()
    try:
        if chosen is Method.POTENTIAL_QP:
            z, iterations = _potential_qp(inst, tol)
        elif chosen is Method.BEST_RESPONSE:
            z, iterations = _best_response_sweeps(inst, tol)
        else:
            z, iterations = _trajectory_limit(inst, tol, z0, sim_config)
    except (NotPSDError, AssumptionViolatedError, NoConvergenceError) as exc:
        log_solver_event(
            logger, chosen.value, elapsed=time.perf_counter() - started, error=exc.message
        )
        raise

    report = certify(inst, z, chosen, iterations=iterations, tol=tol)
    log_solver_event(
        logger,
        chosen.value,
        iterations=iterations,
        residual=report.residual,
        elapsed=time.perf_counter() - started,
        extra_data={
            "vi_margin": float(report.vi_certificate.min()),
            "uniqueness": report.uniqueness.value,
        },
    )
    if not report.vi_certified:
        logger.warning(
            "equilibrium from %s is not VI-certified (worst margin %.3e)",
            chosen.value,
            float(report.vi_certificate.min()),
        )
    return report
