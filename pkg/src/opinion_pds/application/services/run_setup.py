"""Translate a validated run configuration into library objects."""

from __future__ import annotations

import numpy as np

from ...api.schemas import RandomInitial, RunConfig
from ...domain.instance import FloatArray, ProblemInstance, build_instance
from ...dynamics.integrator import Scheme, SimConfig
from ...exceptions import ConfigurationError
from ...model.dynamics import max_stable_step


def instance_from_config(cfg: RunConfig) -> ProblemInstance:
    """Build the instance; invariant violations raise ``InstanceValidationError``."""
    return build_instance(cfg.instance_data())


def random_feasible_profile(inst: ProblemInstance, seed: int) -> FloatArray:
    """Uniform sample from ``K`` drawn with a PCG64 generator.

    Each ``K_i`` is the simplex spanned by the origin and ``(B_i / c_i^j) e_j``,
    so Dirichlet(1, ..., 1) barycentric weights give a uniform point.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    bary = rng.dirichlet(np.ones(inst.m + 1), size=inst.n)[:, 1:]
    return (bary * (inst.budgets[:, None] / inst.costs)).reshape(-1)


def initial_profile(cfg: RunConfig, inst: ProblemInstance) -> FloatArray:
    """Start of the simulation named by ``cfg.simulation.initial``.

    Raises:
        ConfigurationError: If an explicit profile has the wrong shape.

    """
    initial = cfg.simulation.initial
    if initial == "zeros":
        return np.zeros(inst.dim)
    if initial == "random":
        return random_feasible_profile(inst, cfg.simulation.seed)
    if isinstance(initial, RandomInitial):
        return random_feasible_profile(inst, initial.seed)
    try:
        arr = np.asarray(initial, dtype=np.float64)
    except ValueError as exc:
        raise ConfigurationError("simulation.initial", f"profile is ragged: {exc}") from exc
    if arr.shape != (inst.n, inst.m):
        raise ConfigurationError(
            "simulation.initial", f"profile has shape {arr.shape}, expected {(inst.n, inst.m)}"
        )
    return arr.reshape(-1)


def sim_config_from(cfg: RunConfig, inst: ProblemInstance) -> SimConfig:
    sim = cfg.simulation
    return SimConfig(
        step=sim.step if sim.step is not None else max_stable_step(inst),
        t_end=sim.t_end,
        stop_residual=sim.stop_residual,
        record_every=sim.record_every,
        scheme=Scheme(sim.scheme),
    )
