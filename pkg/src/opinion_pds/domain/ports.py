"""Domain ports (interfaces) for layered architecture boundaries."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Protocol


class ConfigRepositoryPort(Protocol):
    """Access to run configs and generator output on disk."""

    def read_bytes(self, path: Path) -> bytes:
        """Return the raw config document."""

    def load(self, path: Path) -> Any:
        """Return a validated run config."""

    def save(self, path: Path, config: Any) -> Path:
        """Persist a run config and return the written path."""


class TrajectoryRepositoryPort(Protocol):
    """Tabular trajectory storage."""

    def write(self, path: Path, trajectory: Any, *, n: int, m: int) -> Path:
        """Write a trajectory and return the written path."""

    def read(self, path: Path) -> Any:
        """Return a parsed trajectory table."""


class ReportRepositoryPort(Protocol):
    """Structured report storage."""

    def write(self, path: Path, report: Any) -> Path:
        """Write a report and return the written path."""

    def read_payload(self, path: Path) -> dict[str, Any]:
        """Return the raw JSON object stored at ``path``."""


class PlotRendererPort(Protocol):
    """Figure rendering for trajectories."""

    def render(
        self,
        path: Path,
        table: Any,
        *,
        equilibrium: Any | None = None,
        costs: Any | None = None,
        budgets: Any | None = None,
    ) -> Path:
        """Render a figure and return the written path."""
