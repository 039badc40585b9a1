"""
Shared pytest fixtures for the opinion dynamics tests.

Provides small hand-checked instances, config files and a clean settings
environment for unit and integration tests.
"""

import json
import os
import shutil
from collections.abc import Callable, Generator
from pathlib import Path
from typing import Any

import numpy as np
import pytest

from opinion_pds.config import get_settings
from opinion_pds.domain.instance import ProblemInstance, build_instance

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES_DIR = Path(__file__).resolve().parent / "fixtures"
SHIPPED_FIXTURES = REPO_ROOT / "fixtures"


def raw_instance(
    influence: Any,
    preferences: Any,
    pref_weights: Any = None,
    costs: Any = None,
    budgets: Any = None,
) -> dict[str, Any]:
    """Raw instance data with unit weights and costs unless given."""
    p = np.asarray(preferences, dtype=float)
    n, m = p.shape
    return {
        "influence": influence,
        "preferences": p.tolist(),
        "pref_weights": np.ones((n, m)).tolist() if pref_weights is None else pref_weights,
        "costs": np.ones((n, m)).tolist() if costs is None else costs,
        "budgets": [10.0] * n if budgets is None else budgets,
    }


@pytest.fixture
def clean_env() -> Generator[None, None, None]:
    """Remove OPINION_PDS_ variables and reload settings around a test."""
    saved = {k: v for k, v in os.environ.items() if k.startswith("OPINION_PDS_")}
    for key in saved:
        del os.environ[key]

    yield

    for key in [k for k in os.environ if k.startswith("OPINION_PDS_")]:
        del os.environ[key]
    os.environ.update(saved)
    get_settings(reload=True)


@pytest.fixture
def tiny_instance() -> ProblemInstance:
    """Two agents, one topic; equilibrium (2, 1) with agent 1 exhausting.

    Hand oracle: J = [[2, -1], [-1, 2]], Dp = (4, 0), q* = (8/3, 4/3).
    Agent 1 is capped at B1 = 2, agent 2 best-responds with z2 = z1 / 2 = 1,
    W(z*) = -3 and lambda_1* = w~ (z - p~) / c = 2 (2 - 2.5) = -1.
    """
    return build_instance(
        raw_instance([[0, 1], [1, 0]], [[4], [0]], budgets=[2, 10])
    )


@pytest.fixture
def singular_instance() -> ProblemInstance:
    """J = [[0.5, 0.5], [0.5, 0.5]] is PSD and singular; equilibria form a segment."""
    return build_instance(
        raw_instance([[0, -0.5], [-0.5, 0]], [[1], [1]], budgets=[5, 5])
    )


@pytest.fixture
def antagonistic_pair() -> ProblemInstance:
    """a12 = -1 with unit weights: A3 holds, A2 does not."""
    return build_instance(raw_instance([[0, -1], [-1, 0]], [[1], [2]]))


@pytest.fixture
def three_agent_instance() -> ProblemInstance:
    """Friendly path graph with two topics and unequal costs."""
    return build_instance(
        raw_instance(
            [[0, 1.5, 0], [1.5, 0, 0.5], [0, 0.5, 0]],
            [[3, 1], [0, 4], [2, 2]],
            pref_weights=[[1, 2], [0.5, 1], [2, 1]],
            costs=[[1, 2], [1.5, 1], [1, 1]],
            budgets=[2, 3, 10],
        )
    )


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[..., Path]:
    """Write a config mapping to a JSON file under ``tmp_path``."""

    def _write(payload: dict[str, Any], name: str = "config.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path

    return _write


@pytest.fixture
def tiny_config(tmp_path: Path) -> Path:
    """Copy of the TINY config in a scratch directory."""
    target = tmp_path / "tiny.json"
    shutil.copyfile(FIXTURES_DIR / "tiny.json", target)
    return target


@pytest.fixture
def tiny_payload() -> dict[str, Any]:
    return json.loads((FIXTURES_DIR / "tiny.json").read_text(encoding="utf-8"))


@pytest.fixture
def four_agent_config(tmp_path: Path) -> Path:
    """Copy of the shipped four-agent reference config."""
    target = tmp_path / "four_agent_example.json"
    shutil.copyfile(SHIPPED_FIXTURES / "four_agent_example.json", target)
    return target


@pytest.fixture
def make_raw() -> Callable[..., dict[str, Any]]:
    """Factory for raw instance data (see :func:`raw_instance`)."""
    return raw_instance
