"""Convergence diagnostics for recorded trajectories."""

from __future__ import annotations

from dataclasses import replace

import numpy as np
import numpy.typing as npt

from ..domain.instance import FloatArray, OpinionProfile, ProblemInstance, as_vector
from ..domain.tolerances import DEFAULT_TOLERANCES, Tolerances
from ..geometry.polytope import feasible_set
from ..geometry.projection import project_profile_tangent_cone
from ..model.dynamics import jacobian_norm, lipschitz_constant, vector_field
from .integrator import SimConfig, Trajectory, simulate


def lyapunov_slack_constant(inst: ProblemInstance) -> float:
    """``kappa = ||J|| alpha`` used as the discretization slack ``kappa dt^2``."""
    return jacobian_norm(inst) * lipschitz_constant(inst)


def lyapunov_violations(
    inst: ProblemInstance,
    traj: Trajectory,
    kappa: float | None = None,
    *,
    step: float | None = None,
) -> list[int]:
    """Indices ``k`` where ``V(z_{k+1}) > V(z_k) + s_k kappa delta^2``.

    ``V = -W`` and ``s_k`` is the number of integrator steps of length
    ``delta`` (default ``traj.step``) between samples ``k`` and ``k + 1``,
    so thinned recordings get the per-step slack summed rather than squared.
    An empty list means the samples are monotone within slack.
    """
    kappa = lyapunov_slack_constant(inst) if kappa is None else kappa
    delta = traj.step if step is None else step
    v = -traj.potentials
    steps = np.maximum(1.0, np.rint(np.diff(traj.times) / delta))
    bad = np.flatnonzero(v[1:] > v[:-1] + steps * kappa * delta**2)
    return [int(k) for k in bad]


def better_response_margins(
    inst: ProblemInstance,
    z: npt.ArrayLike | OpinionProfile,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> FloatArray:
    """Per-agent ``-f_i' P_{T_i}(-f_i)``; nonnegative along the dynamics."""
    vec = as_vector(inst, z)
    fs = feasible_set(inst)
    fs.require_feasible(vec, tol)
    f = vector_field(inst, vec)
    u = project_profile_tangent_cone(fs, vec, -f, tol)
    return np.einsum("ij,ij->i", -f.reshape(inst.n, inst.m), u.reshape(inst.n, inst.m))


def distance_curve(traj: Trajectory, z_star: npt.ArrayLike | OpinionProfile) -> FloatArray:
    """``||z(t) - z*||`` at every recorded sample."""
    target = z_star.z if isinstance(z_star, OpinionProfile) else np.asarray(z_star, dtype=np.float64)
    return np.linalg.norm(traj.states - target.reshape(1, -1), axis=1)


def monotone_violations(values: npt.ArrayLike, slack: float = 1e-8) -> list[int]:
    """Indices where a sequence increases by more than ``slack``."""
    seq = np.asarray(values, dtype=np.float64)
    return [int(k) for k in np.flatnonzero(np.diff(seq) > slack)]


def self_convergence(
    inst: ProblemInstance,
    z0: npt.ArrayLike | OpinionProfile,
    cfg: SimConfig,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """Largest state gap between runs with step ``delta`` and ``delta / 2``.

    Both runs go to the horizon and record every step so that coarse sample
    ``k`` lines up with fine sample ``2k``. The gap shrinks like ``O(delta)``.
    """
    coarse_cfg = replace(cfg, stop_residual=np.finfo(float).tiny, record_every=1)
    fine_cfg = replace(coarse_cfg, step=cfg.step / 2)
    coarse = simulate(inst, z0, coarse_cfg, tol=tol)
    fine = simulate(inst, z0, fine_cfg, tol=tol)
    count = min(len(coarse), (len(fine) + 1) // 2)
    gaps = coarse.states[:count] - fine.states[: 2 * count : 2]
    return float(np.linalg.norm(gaps, axis=1).max())
