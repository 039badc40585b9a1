"""Application use-cases for seeded instance generation."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

from ...api.schemas import GeneratorSpec
from ...domain.ports import ConfigRepositoryPort
from ..services.generator import generate_config


def execute_generate(
    *,
    spec: GeneratorSpec,
    out_path: Path,
    config_repository: ConfigRepositoryPort,
    max_attempts: int = 10_000,
    logger: logging.Logger,
) -> dict[str, Any]:
    """Write a run configuration whose instance satisfies ``spec.regime``."""
    config = generate_config(spec, max_attempts=max_attempts)
    written = config_repository.save(out_path, config)
    logger.info("config generated", extra={"name": config.name, "path": str(written)})
    return {
        "name": config.name,
        "path": str(written),
        "n": config.n,
        "m": config.m,
        "regime": spec.regime,
        "seed": spec.seed,
    }
