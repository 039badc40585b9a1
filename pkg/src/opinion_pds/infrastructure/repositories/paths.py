"""Output path validation and default file stems."""

from __future__ import annotations

from pathlib import Path

from pathvalidate import ValidationError, validate_filepath
from slugify import slugify

from ...exceptions import ConfigurationError


def checked_path(path: str | Path, *, source: str = "outputs") -> Path:
    """Validate ``path`` for the running platform.

    Raises:
        ConfigurationError: If the path is not a valid file path.

    """
    try:
        validate_filepath(str(path), platform="auto")
    except ValidationError as exc:
        raise ConfigurationError(source, f"invalid path {str(path)!r}: {exc}") from exc
    return Path(path)


def prepare_output(path: str | Path, *, source: str = "outputs") -> Path:
    """Validate ``path`` and create its parent directory."""
    out = checked_path(path, source=source)
    out.parent.mkdir(parents=True, exist_ok=True)
    return out


def output_stem(name: str | None, fallback: str | Path) -> str:
    """Filesystem-safe stem from a config name, else from ``fallback``'s stem."""
    stem = slugify(name) if name else ""
    return stem or slugify(Path(fallback).stem) or "run"
