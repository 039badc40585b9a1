"""Trajectory tables as CSV.

Columns are ``t``, ``z_<agent>_<topic>`` (1-based, agent-major), ``potential``
and ``residual``. Values are written with 17 significant digits and LF line
endings so identical runs give identical files.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ...domain.instance import FloatArray
from ...dynamics.integrator import Trajectory
from ...exceptions import MalformedTrajectoryError
from .paths import checked_path, prepare_output

_OPINION_COLUMN = re.compile(r"^z_(\d+)_(\d+)$")


def opinion_columns(n: int, m: int) -> list[str]:
    return [f"z_{i}_{j}" for i in range(1, n + 1) for j in range(1, m + 1)]


def header(n: int, m: int) -> list[str]:
    return ["t", *opinion_columns(n, m), "potential", "residual"]


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


@dataclass(frozen=True, eq=False)
class TrajectoryTable:
    """Parsed trajectory CSV."""

    times: FloatArray
    states: FloatArray
    potentials: FloatArray
    residuals: FloatArray
    n: int
    m: int

    def __len__(self) -> int:
        return int(self.times.size)

    def agent_states(self, i: int) -> FloatArray:
        """Opinions of agent ``i`` (0-based) as ``(samples, m)``."""
        return self.states[:, i * self.m : (i + 1) * self.m]


def _dimensions(columns: list[str], path: Path) -> tuple[int, int]:
    if len(columns) < 4 or columns[0] != "t" or columns[-2:] != ["potential", "residual"]:
        raise MalformedTrajectoryError(str(path), "header must be t, z_<i>_<j>..., potential, residual")
    pairs = []
    for name in columns[1:-2]:
        match = _OPINION_COLUMN.match(name)
        if match is None:
            raise MalformedTrajectoryError(str(path), f"unexpected column {name!r}")
        pairs.append((int(match.group(1)), int(match.group(2))))
    n = max(i for i, _ in pairs)
    m = max(j for _, j in pairs)
    if columns != header(n, m):
        raise MalformedTrajectoryError(str(path), "opinion columns are not agent-major and complete")
    return n, m


class CsvTrajectoryRepository:
    """Write and read trajectory CSV files."""

    def write(self, path: Path, trajectory: Trajectory, *, n: int, m: int) -> Path:
        out = prepare_output(path)
        with out.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header(n, m))
            for t, z, w, r in zip(
                trajectory.times,
                trajectory.states,
                trajectory.potentials,
                trajectory.residuals,
                strict=True,
            ):
                writer.writerow([_fmt(t), *(_fmt(v) for v in z), _fmt(w), _fmt(r)])
        return out

    def read(self, path: Path) -> TrajectoryTable:
        """Parse a trajectory CSV.

        Raises:
            MalformedTrajectoryError: On a missing file, a bad header, an
                empty body or a non-numeric cell.

        """
        src = checked_path(path, source="trajectory")
        try:
            with src.open(encoding="utf-8", newline="") as fh:
                rows = list(csv.reader(fh))
        except (OSError, UnicodeDecodeError) as exc:
            raise MalformedTrajectoryError(str(path), f"cannot read: {exc}") from exc
        if not rows:
            raise MalformedTrajectoryError(str(path), "file is empty")
        n, m = _dimensions(rows[0], src)
        body = [row for row in rows[1:] if row]
        if not body:
            raise MalformedTrajectoryError(str(path), "no samples")
        width = len(rows[0])
        for lineno, row in enumerate(body, start=2):
            if len(row) != width:
                raise MalformedTrajectoryError(str(path), f"line {lineno} has {len(row)} cells, expected {width}")
        try:
            data = np.array(body, dtype=np.float64)
        except ValueError as exc:
            raise MalformedTrajectoryError(str(path), f"non-numeric cell: {exc}") from exc
        if not np.all(np.isfinite(data)):
            raise MalformedTrajectoryError(str(path), "non-finite value")
        return TrajectoryTable(
            times=data[:, 0],
            states=data[:, 1:-2],
            potentials=data[:, -2],
            residuals=data[:, -1],
            n=n,
            m=m,
        )
