"""Application use-cases for simulating and plotting trajectories."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import numpy as np

from ...domain.instance import FloatArray
from ...domain.ports import (
    ConfigRepositoryPort,
    PlotRendererPort,
    ReportRepositoryPort,
    TrajectoryRepositoryPort,
)
from ...domain.tolerances import DEFAULT_TOLERANCES, Tolerances
from ...dynamics.integrator import simulate
from ...exceptions import ConfigurationError
from ...infrastructure.repositories.paths import output_stem
from ..services.reporting import simulation_summary
from ..services.run_setup import initial_profile, instance_from_config, sim_config_from


def _resolve(out_dir: Path, configured: str | None, default: str) -> Path:
    return out_dir / (configured or default)


def execute_simulate(
    *,
    config_path: Path,
    out_dir: Path,
    config_repository: ConfigRepositoryPort,
    trajectory_repository: TrajectoryRepositoryPort,
    report_repository: ReportRepositoryPort,
    plot_renderer: PlotRendererPort | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
    logger: logging.Logger,
) -> dict[str, Any]:
    """Integrate the configured instance and write the CSV and summary files."""
    cfg = config_repository.load(config_path)
    inst = instance_from_config(cfg)
    stem = output_stem(cfg.name, config_path)
    name = cfg.name or stem

    traj = simulate(inst, initial_profile(cfg, inst), sim_config_from(cfg, inst), tol=tol)

    csv_path = _resolve(out_dir, cfg.outputs.trajectory_csv, f"{stem}.trajectory.csv")
    summary_path = _resolve(out_dir, cfg.outputs.summary_json, f"{stem}.summary.json")
    trajectory_repository.write(csv_path, traj, n=inst.n, m=inst.m)
    summary = simulation_summary(name, inst, traj, trajectory_file=csv_path.name)
    report_repository.write(summary_path, summary)

    files = {"trajectory_csv": str(csv_path), "summary_json": str(summary_path)}
    if cfg.outputs.plot_svg and plot_renderer is not None:
        svg_path = out_dir / cfg.outputs.plot_svg
        plot_renderer.render(
            svg_path,
            trajectory_repository.read(csv_path),
            costs=inst.costs,
            budgets=inst.budgets,
        )
        files["plot_svg"] = str(svg_path)

    logger.info(
        "simulation written",
        extra={"name": name, "samples": len(traj), "terminated_by": traj.terminated_by.value},
    )
    return {**summary.model_dump(mode="json"), "files": files}


def equilibrium_from_payload(payload: dict[str, Any], *, source: str) -> list[Any]:
    """Locate an equilibrium profile inside a JSON document.

    Accepts an analysis report (``equilibrium.point``), a simulation summary
    (``terminal_profile``) or a bare ``{"z_star": ...}`` object.

    Raises:
        ConfigurationError: If none of those keys is present.

    """
    eq = payload.get("equilibrium")
    if isinstance(eq, dict) and "point" in eq:
        return list(eq["point"])
    for key in ("terminal_profile", "z_star"):
        if key in payload:
            return list(payload[key])
    raise ConfigurationError(source, "no equilibrium.point, terminal_profile or z_star entry")


def _as_profile(values: Any, n: int, m: int, *, source: str) -> FloatArray:
    try:
        arr = np.asarray(values, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(source, f"equilibrium is not numeric: {exc}") from exc
    if arr.size != n * m or not np.all(np.isfinite(arr)):
        raise ConfigurationError(source, f"equilibrium must hold {n * m} finite values, got shape {arr.shape}")
    return arr.reshape(-1)


def execute_plot(
    *,
    traj_path: Path,
    out_path: Path,
    eq_path: Path | None,
    config_path: Path | None,
    trajectory_repository: TrajectoryRepositoryPort,
    report_repository: ReportRepositoryPort,
    config_repository: ConfigRepositoryPort,
    plot_renderer: PlotRendererPort,
    logger: logging.Logger,
) -> dict[str, Any]:
    """Render a trajectory CSV to SVG, optionally with allocation and error panels."""
    table = trajectory_repository.read(traj_path)

    equilibrium = None
    if eq_path is not None:
        payload = report_repository.read_payload(eq_path)
        raw = equilibrium_from_payload(payload, source=str(eq_path))
        equilibrium = _as_profile(raw, table.n, table.m, source=str(eq_path))

    costs = budgets = None
    if config_path is not None:
        inst = instance_from_config(config_repository.load(config_path))
        if (inst.n, inst.m) != (table.n, table.m):
            raise ConfigurationError(
                str(config_path),
                f"instance is {inst.n}x{inst.m} but the trajectory is {table.n}x{table.m}",
            )
        costs, budgets = inst.costs, inst.budgets

    written = plot_renderer.render(out_path, table, equilibrium=equilibrium, costs=costs, budgets=budgets)
    logger.info("plot written", extra={"path": str(written), "samples": len(table)})
    return {
        "plot_svg": str(written),
        "samples": len(table),
        "panels": 1 + (costs is not None) + (equilibrium is not None),
    }
