"""
Standardized exception types for the opinion dynamics toolkit.

Every failure the library or the CLI can report is a subclass of
``OpinionPDSError`` carrying an error code, structured context and the CLI
exit status it maps to.
"""

from dataclasses import asdict, dataclass
from typing import Any, ClassVar

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_GENERATION = 4


class OpinionPDSError(Exception):
    """Base exception for all toolkit errors.

    Provides structured error information with context and recovery guidance.
    """

    exit_code: ClassVar[int] = EXIT_RUNTIME

    def __init__(
        self,
        message: str,
        error_code: str,
        context: dict[str, Any] | None = None,
        recoverable: bool = False,
    ):
        super().__init__(message)
        self.message = message
        self.error_code = error_code
        self.context = context or {}
        self.recoverable = recoverable

    def to_dict(self) -> dict[str, Any]:
        """Convert exception to dictionary for logging and reporting."""
        return {
            "error_type": self.__class__.__name__,
            "message": self.message,
            "error_code": self.error_code,
            "context": self.context,
            "recoverable": self.recoverable,
        }


# --- input validation (exit 2) ---------------------------------------------


@dataclass(frozen=True)
class Violation:
    """One violated instance invariant."""

    code: str
    parameter: str
    detail: str


class InstanceValidationError(OpinionPDSError):
    """Raw problem data violates one or more instance invariants."""

    exit_code = EXIT_CONFIG

    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        codes = sorted({v.code for v in self.violations})
        super().__init__(
            message="Invalid problem instance: " + ", ".join(codes),
            error_code="INSTANCE_INVALID",
            context={"violations": [asdict(v) for v in self.violations]},
        )

    @property
    def codes(self) -> set[str]:
        """Distinct violation codes."""
        return {v.code for v in self.violations}


class ConfigurationError(OpinionPDSError):
    """A run config or generator spec is invalid or unreadable."""

    exit_code = EXIT_CONFIG

    def __init__(self, source: str, reason: str, errors: list[Any] | None = None):
        super().__init__(
            message=f"Configuration error in {source}: {reason}",
            error_code="CONFIG_INVALID",
            context={"source": source, "reason": reason, "errors": errors or []},
        )


class MalformedTrajectoryError(OpinionPDSError):
    """A trajectory CSV cannot be parsed."""

    exit_code = EXIT_CONFIG

    def __init__(self, path: str, reason: str):
        super().__init__(
            message=f"Malformed trajectory {path}: {reason}",
            error_code="TRAJECTORY_MALFORMED",
            context={"path": path, "reason": reason},
        )


# --- numerical failures (exit 3) --------------------------------------------


class DimensionMismatchError(OpinionPDSError):
    """A vector does not have the dimension the instance requires."""

    def __init__(self, what: str, expected: int | tuple[int, ...], actual: Any):
        super().__init__(
            message=f"DimensionMismatch: {what} expected {expected}, got {actual}",
            error_code="DIMENSION_MISMATCH",
            context={"what": what, "expected": expected, "actual": actual},
        )


class InfeasiblePointError(OpinionPDSError):
    """A profile lies outside the feasible set by more than the tolerance."""

    def __init__(self, violation: float, tolerance: float, agent: int | None = None):
        where = f" (agent {agent + 1})" if agent is not None else ""
        super().__init__(
            message=f"InfeasiblePoint{where}: violation {violation:.3e} exceeds {tolerance:.1e}",
            error_code="INFEASIBLE_POINT",
            context={"violation": violation, "tolerance": tolerance, "agent": agent},
        )


class InfeasibleStartError(OpinionPDSError):
    """The initial profile of a simulation is not feasible."""

    def __init__(self, violation: float, tolerance: float, agent: int | None = None):
        where = f" (agent {agent + 1})" if agent is not None else ""
        super().__init__(
            message=f"InfeasibleStart{where}: violation {violation:.3e} exceeds {tolerance:.1e}",
            error_code="INFEASIBLE_START",
            context={"violation": violation, "tolerance": tolerance, "agent": agent},
        )


class StepTooLargeError(OpinionPDSError):
    """The integration step exceeds the stability bound."""

    def __init__(self, step: float, bound: float, reason: str = "step"):
        super().__init__(
            message=f"StepTooLarge: {reason} {step:.6g} exceeds bound {bound:.6g}",
            error_code="STEP_TOO_LARGE",
            context={"step": step, "bound": bound, "reason": reason},
        )


class SingularJacobianError(OpinionPDSError):
    """The Jacobian is singular so the unconstrained equilibrium is undefined."""

    def __init__(self, min_abs_eigenvalue: float):
        super().__init__(
            message=f"SingularJacobian: smallest |eigenvalue| {min_abs_eigenvalue:.3e}",
            error_code="SINGULAR_JACOBIAN",
            context={"min_abs_eigenvalue": min_abs_eigenvalue},
        )


class NotPSDError(OpinionPDSError):
    """The potential QP needs a positive semidefinite Jacobian."""

    def __init__(self, min_eigenvalue: float):
        super().__init__(
            message=f"NotPSD: Jacobian has eigenvalue {min_eigenvalue:.6g} < 0",
            error_code="NOT_PSD",
            context={"min_eigenvalue": min_eigenvalue},
        )


class NoConvergenceError(OpinionPDSError):
    """An iterative method hit its iteration cap."""

    def __init__(self, method: str, iterations: int, last_change: float):
        super().__init__(
            message=f"NoConvergence: {method} after {iterations} iterations (last change {last_change:.3e})",
            error_code="NO_CONVERGENCE",
            context={
                "method": method,
                "iterations": iterations,
                "last_change": last_change,
            },
        )


class NonpositiveWeightError(OpinionPDSError):
    """A weighted projection was requested with a nonpositive weight."""

    def __init__(self, weights: list[float]):
        super().__init__(
            message="NonpositiveWeight: projection weights must be strictly positive",
            error_code="NONPOSITIVE_WEIGHT",
            context={"weights": weights},
        )


class NonpositiveDTildeError(OpinionPDSError):
    """An agent's effective weights are not all positive, so its best response is undefined."""

    def __init__(self, agent: int, d_tilde: list[float]):
        super().__init__(
            message=f"NonpositiveDTilde: agent {agent + 1} has effective weights {d_tilde}",
            error_code="NONPOSITIVE_D_TILDE",
            context={"agent": agent, "d_tilde": d_tilde},
        )


class AssumptionViolatedError(OpinionPDSError):
    """A check requires a relation class the instance does not satisfy."""

    def __init__(self, assumption: str, operation: str):
        super().__init__(
            message=f"AssumptionViolated: {operation} requires {assumption}",
            error_code="ASSUMPTION_VIOLATED",
            context={"assumption": assumption, "operation": operation},
        )


class ZeroInfluenceSumError(OpinionPDSError):
    """The exhaustion threshold is undefined for an agent whose influence sums to zero."""

    def __init__(self, agent: int):
        super().__init__(
            message=f"ZeroInfluenceSum: agent {agent + 1} has zero total influence",
            error_code="ZERO_INFLUENCE_SUM",
            context={"agent": agent},
        )


class CommandExecutionError(OpinionPDSError):
    """A command failed with an unexpected error."""

    def __init__(
        self, command: str, reason: str, context: dict[str, Any] | None = None
    ):
        super().__init__(
            message=f"Command {command} failed: {reason}",
            error_code="COMMAND_FAILED",
            context={"command": command, "reason": reason, **(context or {})},
        )


# --- generation (exit 4) ----------------------------------------------------


class GenerationFailedError(OpinionPDSError):
    """The seeded generator could not satisfy the requested regime."""

    exit_code = EXIT_GENERATION

    def __init__(self, regime: str, attempts: int, seed: int):
        super().__init__(
            message=f"GenerationFailed: regime {regime} not reached after {attempts} attempts (seed {seed})",
            error_code="GENERATION_FAILED",
            context={"regime": regime, "attempts": attempts, "seed": seed},
        )
