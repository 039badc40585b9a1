"""JSON reports."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from pydantic import BaseModel

from ...exceptions import ConfigurationError
from .config_repository import dump_json
from .paths import checked_path, prepare_output


class JsonReportRepository:
    """Write pydantic reports as JSON and read JSON objects back."""

    def write(self, path: Path, report: BaseModel) -> Path:
        out = prepare_output(path)
        with out.open("w", encoding="utf-8", newline="\n") as fh:
            fh.write(dump_json(report.model_dump(mode="json")))
        return out

    def read_payload(self, path: Path) -> dict[str, Any]:
        src = checked_path(path, source="report")
        try:
            data = json.loads(src.read_text(encoding="utf-8"))
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ConfigurationError(str(path), f"cannot read JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigurationError(str(path), "top level must be an object")
        return data
