"""Configuration settings for the opinion dynamics toolkit.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.

This module provides Pydantic-based configuration management with environment variable
support and validation. Settings are loaded from environment variables with optional
.env file support. Per-run problem data lives in run configs, not here.
"""

import logging
import sys
from typing import Optional

from pydantic import Field, PositiveFloat, field_validator
from pydantic.types import PositiveInt
from pydantic_settings import BaseSettings, SettingsConfigDict

from .domain.tolerances import Tolerances


class Settings(BaseSettings):
    """Process-wide settings with environment variable support.

    All settings can be overridden via environment variables with OPINION_PDS_ prefix.
    Example: OPINION_PDS_LOG_LEVEL=DEBUG
    """

    # Logging Configuration
    log_level: str = Field(
        default="INFO",
        description="Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)",
    )
    debug_mode: bool = Field(
        default=False,
        description="Enable debug mode with human-readable log lines",
    )
    log_json: bool = Field(
        default=True,
        description="Emit JSON log lines on stderr",
    )

    # Numerical tolerances
    feasibility_tol: PositiveFloat = Field(
        default=1e-9,
        le=1e-3,
        description="Absolute slack when tagging a profile as feasible",
    )
    activity_tol: PositiveFloat = Field(
        default=1e-8,
        le=1e-2,
        description="Absolute threshold for active constraints and supports",
    )
    vi_tol: PositiveFloat = Field(
        default=1e-7,
        description="Lower bound on vertex margins for a certified VI solution",
    )
    nash_tol: PositiveFloat = Field(
        default=1e-7,
        description="Upper bound on best-response residuals for a certified Nash profile",
    )
    solver_tol: PositiveFloat = Field(
        default=1e-12,
        description="Fixed-point displacement at which iterative solvers stop",
    )
    max_iterations: PositiveInt = Field(
        default=1_000_000,
        ge=10,
        description="Iteration cap for solvers and the trajectory-limit method",
    )

    # Generator / batch configuration
    generator_max_attempts: PositiveInt = Field(
        default=10_000,
        ge=1,
        le=1_000_000,
        description="Rejection-sampling cap for seeded instance generation",
    )
    sweep_workers: PositiveInt = Field(
        default=1,
        le=64,
        description="Worker threads for randomized sweeps (1 runs sequentially)",
    )

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        env_prefix="OPINION_PDS_",
    )

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level is supported by Python logging."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            raise ValueError(f"Log level must be one of: {', '.join(valid_levels)}")
        return v.upper()

    @property
    def tolerances(self) -> Tolerances:
        """Tolerances handed to the numerical library."""
        return Tolerances(
            feasibility=self.feasibility_tol,
            activity=self.activity_tol,
            vi=self.vi_tol,
            nash=self.nash_tol,
            solver=self.solver_tol,
            max_iterations=self.max_iterations,
        )

    def validate_startup(self) -> None:
        """Validate cross-field configuration at startup.

        Raises:
            ValueError: If configuration is invalid for startup.

        """
        errors = []

        if self.activity_tol < self.feasibility_tol:
            errors.append(
                "activity_tol must be at least feasibility_tol "
                f"({self.activity_tol} < {self.feasibility_tol})"
            )

        if self.solver_tol >= self.feasibility_tol:
            errors.append(
                "solver_tol must be below feasibility_tol "
                f"({self.solver_tol} >= {self.feasibility_tol})"
            )

        if self.nash_tol > 1e-3 or self.vi_tol > 1e-3:
            errors.append("certification tolerances above 1e-3 are not meaningful")

        if errors:
            error_msg = "Configuration validation failed:\n" + "\n".join(
                f"  - {err}" for err in errors
            )
            raise ValueError(error_msg)


class SettingsManager:
    """Singleton manager for the global settings instance."""

    _instance: Optional["SettingsManager"] = None
    _settings: Settings | None = None

    def __new__(cls) -> "SettingsManager":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def get_settings(self, reload: bool = False) -> Settings:
        """Get application settings singleton.

        Args:
            reload: If True, reload settings from environment/files.

        Returns:
            Settings instance.

        Raises:
            ValueError: If settings are invalid.

        """
        if self._settings is None or reload:
            try:
                self._settings = Settings()
                self._settings.validate_startup()
            except (ValueError, TypeError, OSError) as e:
                raise ValueError(f"Failed to load configuration: {e}") from e

        return self._settings


# Global settings manager instance
_settings_manager = SettingsManager()


def get_settings(reload: bool = False) -> Settings:
    """Get application settings singleton.

    Args:
        reload: If True, reload settings from environment/files.

    Returns:
        Settings instance.

    Raises:
        ValueError: If settings are invalid.

    """
    return _settings_manager.get_settings(reload)


def validate_settings_on_startup() -> Settings:
    """Validate and configure settings during CLI startup.

    Returns:
        Validated Settings instance.

    Raises:
        SystemExit: With status 2 if configuration is invalid.

    """
    try:
        app_settings = get_settings(reload=True)
        logger = logging.getLogger("opinion-pds")
        logger.debug("Configuration loaded successfully")
        logger.debug(
            "Tolerances: feasibility=%g activity=%g vi=%g nash=%g solver=%g",
            app_settings.feasibility_tol,
            app_settings.activity_tol,
            app_settings.vi_tol,
            app_settings.nash_tol,
            app_settings.solver_tol,
        )
        logger.debug("Sweep workers: %d", app_settings.sweep_workers)
        return app_settings

    except ValueError as e:
        # Print to stderr since logging might not be configured yet
        print(f"Configuration Error: {e}", file=sys.stderr)
        print(
            "Check your OPINION_PDS_* environment variables or .env file.",
            file=sys.stderr,
        )
        raise SystemExit(2) from e
