"""Run configuration files in JSON or YAML."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, ValidationError

from ...api.schemas import RunConfig
from ...exceptions import ConfigurationError
from .paths import checked_path, prepare_output

YAML_SUFFIXES = frozenset({".yaml", ".yml"})


def dump_json(payload: Any) -> str:
    """Stable JSON text: two-space indent and a trailing newline."""
    return json.dumps(payload, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


class ConfigRepository:
    """Load and save :class:`RunConfig` documents."""

    def read_bytes(self, path: Path) -> bytes:
        src = checked_path(path, source="config")
        try:
            return src.read_bytes()
        except OSError as exc:
            raise ConfigurationError(str(path), f"cannot read: {exc.strerror or exc}") from exc

    def parse(self, payload: bytes, *, source: str, yaml_input: bool = False) -> RunConfig:
        """Decode and validate a config document.

        Raises:
            ConfigurationError: On undecodable text or a schema violation.

        """
        try:
            text = payload.decode("utf-8")
            data = yaml.safe_load(text) if yaml_input else json.loads(text)
        except (UnicodeDecodeError, json.JSONDecodeError, yaml.YAMLError) as exc:
            raise ConfigurationError(source, f"not valid {'YAML' if yaml_input else 'JSON'}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigurationError(source, "top level must be an object")
        try:
            return RunConfig.model_validate(data)
        except ValidationError as exc:
            errors = json.loads(exc.json(include_url=False))
            raise ConfigurationError(source, "schema validation failed", errors=errors) from exc

    def load(self, path: Path) -> RunConfig:
        return self.parse(
            self.read_bytes(path),
            source=str(path),
            yaml_input=Path(path).suffix.lower() in YAML_SUFFIXES,
        )

    def save(self, path: Path, config: BaseModel) -> Path:
        out = prepare_output(path)
        payload = config.model_dump(mode="json", exclude_none=True)
        if out.suffix.lower() in YAML_SUFFIXES:
            text = yaml.safe_dump(payload, sort_keys=False)
        else:
            text = dump_json(payload)
        with out.open("w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        return out
