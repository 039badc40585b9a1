"""API-layer command handlers: wire repositories and settings into the use cases."""

from __future__ import annotations

import argparse
import json
import logging
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from ..api.schemas import GeneratorSpec
from ..application.use_cases import (
    execute_analyze,
    execute_check,
    execute_generate,
    execute_plot,
    execute_simulate,
)
from ..config import Settings
from ..exceptions import ConfigurationError
from ..infrastructure.repositories import (
    ConfigRepository,
    CsvTrajectoryRepository,
    JsonReportRepository,
    SvgPlotRenderer,
)


def _optional_path(value: str | None) -> Path | None:
    return None if value is None else Path(value)


def simulate_payload(*, args: argparse.Namespace, settings: Settings, logger: logging.Logger) -> dict[str, Any]:
    """Build payload for the simulate command."""
    return execute_simulate(
        config_path=Path(args.config),
        out_dir=Path(args.out_dir),
        config_repository=ConfigRepository(),
        trajectory_repository=CsvTrajectoryRepository(),
        report_repository=JsonReportRepository(),
        plot_renderer=SvgPlotRenderer(),
        tol=settings.tolerances,
        logger=logger,
    )


def analyze_payload(*, args: argparse.Namespace, settings: Settings, logger: logging.Logger) -> dict[str, Any]:
    """Build payload for the analyze command."""
    return execute_analyze(
        config_path=Path(args.config),
        out_path=_optional_path(args.out),
        config_repository=ConfigRepository(),
        report_repository=JsonReportRepository(),
        tol=settings.tolerances,
        logger=logger,
    )


def generate_payload(*, args: argparse.Namespace, settings: Settings, logger: logging.Logger) -> dict[str, Any]:
    """Build payload for the generate command.

    Raises:
        ConfigurationError: If the arguments do not form a valid generator request.

    """
    try:
        spec = GeneratorSpec(
            n=args.n,
            m=args.m,
            seed=args.seed,
            regime=args.regime,
            budget_scale=args.budget_scale,
            density=args.density,
            name=args.name,
        )
    except ValidationError as exc:
        raise ConfigurationError(
            "generate", "invalid generator request", errors=json.loads(exc.json(include_url=False))
        ) from exc
    return execute_generate(
        spec=spec,
        out_path=Path(args.out),
        config_repository=ConfigRepository(),
        max_attempts=settings.generator_max_attempts,
        logger=logger,
    )


def plot_payload(*, args: argparse.Namespace, settings: Settings, logger: logging.Logger) -> dict[str, Any]:
    """Build payload for the plot command."""
    return execute_plot(
        traj_path=Path(args.traj),
        out_path=Path(args.out),
        eq_path=_optional_path(args.eq),
        config_path=_optional_path(args.config),
        trajectory_repository=CsvTrajectoryRepository(),
        report_repository=JsonReportRepository(),
        config_repository=ConfigRepository(),
        plot_renderer=SvgPlotRenderer(),
        logger=logger,
    )


def check_payload(*, args: argparse.Namespace, settings: Settings, logger: logging.Logger) -> dict[str, Any]:
    """Build payload for the check command."""
    return execute_check(
        config_path=Path(args.config),
        quick=args.quick,
        out_path=_optional_path(args.out),
        config_repository=ConfigRepository(),
        report_repository=JsonReportRepository(),
        tol=settings.tolerances,
        workers=settings.sweep_workers,
        max_attempts=settings.generator_max_attempts,
        include_sweeps=not args.instance_only,
        logger=logger,
    )


COMMANDS = {
    "simulate": simulate_payload,
    "analyze": analyze_payload,
    "generate": generate_payload,
    "plot": plot_payload,
    "check": check_payload,
}
