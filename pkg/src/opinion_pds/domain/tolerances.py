"""Numerical tolerances shared by the library."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Absolute thresholds used for feasibility, activity and certification."""

    feasibility: float = 1e-9
    activity: float = 1e-8
    vi: float = 1e-7
    nash: float = 1e-7
    solver: float = 1e-12
    max_iterations: int = 1_000_000


DEFAULT_TOLERANCES = Tolerances()
