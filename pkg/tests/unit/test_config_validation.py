"""
Unit tests for opinion-pds settings validation.

Tests the Pydantic settings validation, environment variable handling,
and startup validation with various configuration scenarios.
"""

import os

import pytest
from pydantic import ValidationError

from opinion_pds.config import Settings, get_settings, validate_settings_on_startup
from opinion_pds.domain.tolerances import DEFAULT_TOLERANCES


@pytest.mark.unit
class TestSettingsValidation:
    """Test Settings class validation."""

    def test_default_settings(self, clean_env):
        """Test that default settings are valid."""
        settings = Settings()

        assert settings.log_level == "INFO"
        assert settings.debug_mode is False
        assert settings.log_json is True
        assert settings.max_iterations == 1_000_000
        assert settings.generator_max_attempts == 10_000
        assert settings.sweep_workers == 1
        assert settings.tolerances == DEFAULT_TOLERANCES

    def test_environment_variable_override(self, clean_env):
        """Test that environment variables override defaults."""
        os.environ["OPINION_PDS_LOG_LEVEL"] = "DEBUG"
        os.environ["OPINION_PDS_VI_TOL"] = "1e-6"
        os.environ["OPINION_PDS_SWEEP_WORKERS"] = "4"
        os.environ["OPINION_PDS_LOG_JSON"] = "false"

        settings = Settings()

        assert settings.log_level == "DEBUG"
        assert settings.vi_tol == 1e-6
        assert settings.tolerances.vi == 1e-6
        assert settings.sweep_workers == 4
        assert settings.log_json is False

    def test_log_level_validation_invalid(self, clean_env):
        """Test invalid log levels are rejected."""
        os.environ["OPINION_PDS_LOG_LEVEL"] = "INVALID"

        with pytest.raises(ValidationError) as exc_info:
            Settings()

        error = exc_info.value.errors()[0]
        assert error["type"] == "value_error"
        assert "Log level must be one of" in str(error["ctx"]["error"])

    def test_log_level_case_insensitive(self, clean_env):
        os.environ["OPINION_PDS_LOG_LEVEL"] = "warning"
        assert Settings().log_level == "WARNING"

    @pytest.mark.parametrize(
        ("variable", "value"),
        [
            ("OPINION_PDS_FEASIBILITY_TOL", "0"),
            ("OPINION_PDS_FEASIBILITY_TOL", "0.5"),
            ("OPINION_PDS_MAX_ITERATIONS", "5"),
            ("OPINION_PDS_SWEEP_WORKERS", "0"),
            ("OPINION_PDS_SWEEP_WORKERS", "65"),
            ("OPINION_PDS_GENERATOR_MAX_ATTEMPTS", "-1"),
        ],
    )
    def test_field_bounds(self, clean_env, variable, value):
        os.environ[variable] = value
        with pytest.raises(ValidationError):
            Settings()


@pytest.mark.unit
class TestStartupValidation:
    """Test cross-field checks run at startup."""

    def test_defaults_pass(self, clean_env):
        Settings().validate_startup()

    def test_activity_below_feasibility(self, clean_env):
        settings = Settings(feasibility_tol=1e-6, activity_tol=1e-8)
        with pytest.raises(ValueError, match="activity_tol must be at least feasibility_tol"):
            settings.validate_startup()

    def test_solver_not_below_feasibility(self, clean_env):
        settings = Settings(solver_tol=1e-9)
        with pytest.raises(ValueError, match="solver_tol must be below feasibility_tol"):
            settings.validate_startup()

    def test_loose_certificates(self, clean_env):
        settings = Settings(vi_tol=1e-2)
        with pytest.raises(ValueError, match="not meaningful"):
            settings.validate_startup()

    def test_errors_are_collected(self, clean_env):
        settings = Settings(feasibility_tol=1e-6, activity_tol=1e-8, solver_tol=1e-5)
        with pytest.raises(ValueError) as exc_info:
            settings.validate_startup()
        assert str(exc_info.value).count("  - ") == 2


@pytest.mark.unit
class TestSettingsManager:
    """Test the settings singleton and CLI startup hook."""

    def test_get_settings_is_cached(self, clean_env):
        first = get_settings(reload=True)
        assert get_settings() is first

    def test_reload_picks_up_environment(self, clean_env):
        get_settings(reload=True)
        os.environ["OPINION_PDS_NASH_TOL"] = "1e-6"
        assert get_settings(reload=True).nash_tol == 1e-6

    def test_invalid_environment_wrapped(self, clean_env):
        os.environ["OPINION_PDS_LOG_LEVEL"] = "LOUD"
        with pytest.raises(ValueError, match="Failed to load configuration"):
            get_settings(reload=True)

    def test_startup_exits_with_config_status(self, clean_env, capsys):
        os.environ["OPINION_PDS_SOLVER_TOL"] = "1e-3"
        with pytest.raises(SystemExit) as exc_info:
            validate_settings_on_startup()
        assert exc_info.value.code == 2
        assert "OPINION_PDS_" in capsys.readouterr().err

    def test_startup_returns_settings(self, clean_env):
        assert isinstance(validate_settings_on_startup(), Settings)
