"""Application use-cases for structural analysis and the acceptance checks."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import numpy as np

from ...api.schemas import RunConfig
from ...domain.instance import FloatArray, ProblemInstance
from ...domain.ports import ConfigRepositoryPort, ReportRepositoryPort
from ...domain.tolerances import DEFAULT_TOLERANCES, Tolerances
from ...exceptions import ConfigurationError
from ...infrastructure.repositories.paths import output_stem
from ..services.acceptance import AcceptanceRunner, SweepPlan
from ..services.analysis_service import analyze_instance
from ..services.reporting import analysis_report
from ..services.run_setup import instance_from_config


def fixture_q_star(cfg: RunConfig, inst: ProblemInstance, *, source: str) -> FloatArray | None:
    """The published ``q*`` table of the config, if any.

    Raises:
        ConfigurationError: If the table does not have shape ``n x m``.

    """
    if cfg.fixture is None or cfg.fixture.q_star is None:
        return None
    try:
        q = np.asarray(cfg.fixture.q_star, dtype=np.float64)
    except ValueError as exc:
        raise ConfigurationError(source, f"fixture.q_star is ragged: {exc}") from exc
    if q.shape != (inst.n, inst.m):
        raise ConfigurationError(source, f"fixture.q_star has shape {q.shape}, expected {(inst.n, inst.m)}")
    return q.reshape(-1)


def execute_analyze(
    *,
    config_path: Path,
    out_path: Path | None,
    config_repository: ConfigRepositoryPort,
    report_repository: ReportRepositoryPort,
    tol: Tolerances = DEFAULT_TOLERANCES,
    logger: logging.Logger,
) -> dict[str, Any]:
    """Classify the instance, certify an equilibrium and evaluate the exhaustion conditions."""
    cfg = config_repository.load(config_path)
    inst = instance_from_config(cfg)
    name = cfg.name or output_stem(None, config_path)
    outcome = analyze_instance(
        inst,
        method=cfg.analysis.method,
        tol=tol,
        q_star_override=fixture_q_star(cfg, inst, source=str(config_path)),
    )
    report = analysis_report(name, inst, outcome)

    target = out_path
    if target is None and cfg.outputs.report_json:
        target = config_path.parent / cfg.outputs.report_json
    if target is not None:
        report_repository.write(target, report)
        logger.info("analysis report written", extra={"path": str(target)})
    return report.model_dump(mode="json")


def execute_check(
    *,
    config_path: Path,
    quick: bool,
    out_path: Path | None,
    config_repository: ConfigRepositoryPort,
    report_repository: ReportRepositoryPort,
    tol: Tolerances = DEFAULT_TOLERANCES,
    workers: int = 1,
    max_attempts: int = 10_000,
    include_sweeps: bool = True,
    logger: logging.Logger,
) -> dict[str, Any]:
    """Run the instance checks and the seeded sweeps; ``passed`` summarizes them."""
    cfg = config_repository.load(config_path)
    inst = instance_from_config(cfg)
    fixture_q_star(cfg, inst, source=str(config_path))
    runner = AcceptanceRunner(
        tol=tol,
        plan=SweepPlan.quick() if quick else SweepPlan(),
        workers=workers,
        max_attempts=max_attempts,
    )
    name = cfg.name or output_stem(None, config_path)
    report = runner.run(name, cfg, inst, quick=quick, include_sweeps=include_sweeps)
    if out_path is not None:
        report_repository.write(out_path, report)
    failed = [c.name for c in report.checks if not c.passed]
    logger.info("checks finished", extra={"passed": report.passed, "failed": failed})
    return report.model_dump(mode="json")
