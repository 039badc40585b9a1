"""Architecture guard tests to prevent layering regressions."""

from __future__ import annotations

import ast
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[2]
SRC_ROOT = PROJECT_ROOT / "src" / "opinion_pds"
CORE_PACKAGES = ("domain", "model", "geometry", "dynamics", "equilibrium", "analysis")


def _module_name(path: Path) -> str:
    parts = path.relative_to(SRC_ROOT.parent).with_suffix("").parts
    return ".".join(parts[:-1] if parts[-1] == "__init__" else parts)


def _imports_for_file(path: Path) -> list[str]:
    """Absolute names of every module a file imports."""
    tree = ast.parse(path.read_text(encoding="utf-8"))
    package = _module_name(path).split(".")
    if path.name != "__init__.py":
        package = package[:-1]
    imports: list[str] = []
    for node in ast.walk(tree):
        if isinstance(node, ast.Import):
            imports.extend(alias.name for alias in node.names)
        elif isinstance(node, ast.ImportFrom):
            module = node.module or ""
            if node.level > 0:
                base = package[: len(package) - node.level + 1]
                imports.append(".".join([*base, module]) if module else ".".join(base))
            else:
                imports.append(module)
    return imports


def _sources(*packages: str) -> list[Path]:
    return sorted(
        p
        for pkg in packages
        for p in (SRC_ROOT / pkg).rglob("*.py")
        if "__pycache__" not in p.parts
    )


def _violations(files: list[Path], banned: tuple[str, ...]) -> list[str]:
    found = []
    for file_path in files:
        for imported in _imports_for_file(file_path):
            if any(imported == b or imported.startswith(b + ".") for b in banned):
                found.append(f"{file_path.relative_to(PROJECT_ROOT)}: {imported}")
    return found


@pytest.mark.unit
def test_numerical_core_is_free_of_io_layers() -> None:
    """The library packages never reach into CLI, config or storage code."""
    banned = tuple(
        f"opinion_pds.{name}"
        for name in ("api", "application", "infrastructure", "cli", "config")
    )
    violations = _violations(_sources(*CORE_PACKAGES), banned)
    assert not violations, "Numerical core imports outer layers:\n" + "\n".join(violations)


@pytest.mark.unit
def test_infrastructure_does_not_import_application() -> None:
    violations = _violations(
        _sources("infrastructure"), ("opinion_pds.application", "opinion_pds.cli")
    )
    assert not violations, "Repositories import use cases:\n" + "\n".join(violations)


@pytest.mark.unit
def test_relative_imports_resolve() -> None:
    """Guards above are only meaningful if relative imports are resolved correctly."""
    solver = SRC_ROOT / "equilibrium" / "solver.py"
    imports = _imports_for_file(solver)
    assert "opinion_pds.domain.instance" in imports
    assert "opinion_pds.equilibrium.best_response" in imports
