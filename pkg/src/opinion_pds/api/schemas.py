"""Pydantic models for run configurations, generator requests and reports.

Field declaration order fixes the key order of every JSON document the CLI
writes. Agent and topic numbers in these models are 1-based.
"""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

SchemeName = Literal["projected-euler", "tangent-euler"]
MethodName = Literal["potential-qp", "best-response", "trajectory-limit"]
RegimeName = Literal["a1", "a2", "a3", "signed"]
Matrix = list[list[float]]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class RandomInitial(_Strict):
    """Uniform random feasible start drawn with a dedicated seed."""

    kind: Literal["random"] = "random"
    seed: int = 0


class AgentSection(_Strict):
    """Per-agent model parameters."""

    preferences: list[float] = Field(min_length=1)
    weights: list[float] = Field(min_length=1)
    costs: list[float] = Field(min_length=1)
    budget: float


class SimulationSection(_Strict):
    """Integration settings.

    ``step`` defaults to the stability bound of the instance. ``initial`` is
    ``"zeros"``, ``"random"`` (drawn from ``seed``), an explicit ``n x m``
    profile or a ``{"kind": "random", "seed": ...}`` object.
    """

    step: float | None = Field(default=None, gt=0)
    t_end: float = Field(default=100.0, gt=0)
    stop_residual: float = Field(default=1e-8, gt=0)
    scheme: SchemeName = "projected-euler"
    record_every: int = Field(default=1, ge=1)
    initial: Literal["zeros", "random"] | Matrix | RandomInitial = "zeros"
    seed: int = 0


class AnalysisSection(_Strict):
    method: MethodName | None = None


class OutputsSection(_Strict):
    """Output file names, resolved against the output directory."""

    trajectory_csv: str | None = None
    summary_json: str | None = None
    report_json: str | None = None
    plot_svg: str | None = None


class AgentSnapshot(_Strict):
    """Published equilibrium values of one agent."""

    agent: int = Field(ge=1)
    z_star: list[float]
    p_tilde: list[float]
    w_tilde: list[float]
    distance: list[float] | None = None
    distance_slack: float = Field(default=0.5, ge=0)
    ratio_rtol: float = Field(default=0.02, gt=0)


class ExhaustExpectation(_Strict):
    agent: int = Field(ge=1)
    topic: int = Field(ge=1)
    threshold: float
    tolerance: float = Field(default=0.2, ge=0)


class NotExhaustExpectation(_Strict):
    """A published affordability check for a run with a different budget."""

    agent: int = Field(ge=1)
    budget: float = Field(gt=0)
    spend: float


class GoldenExpectation(_Strict):
    """Hand-derived equilibrium values checked by ``opinion-pds check``."""

    z_star: Matrix
    potential: float | None = None
    exhausting: list[int] | None = None
    non_exhausting: list[int] | None = None
    lambda_star: dict[str, float] = Field(default_factory=dict)
    tolerance: float = Field(default=1e-6, gt=0)


class FixtureSection(_Strict):
    """Reference data shipped with a configuration."""

    provenance: str = ""
    q_star: Matrix | None = None
    agent_snapshot: AgentSnapshot | None = None
    exhaust: ExhaustExpectation | None = None
    not_exhaust: NotExhaustExpectation | None = None
    golden: GoldenExpectation | None = None


class RunConfig(_Strict):
    """A complete run configuration."""

    name: str | None = None
    n: int = Field(ge=1)
    m: int = Field(ge=1)
    adjacency: Matrix
    agents: list[AgentSection] = Field(min_length=1)
    simulation: SimulationSection = Field(default_factory=SimulationSection)
    analysis: AnalysisSection = Field(default_factory=AnalysisSection)
    outputs: OutputsSection = Field(default_factory=OutputsSection)
    fixture: FixtureSection | None = None

    def instance_data(self) -> dict[str, Any]:
        """Raw arrays in the layout ``build_instance`` expects."""
        return {
            "n": self.n,
            "m": self.m,
            "influence": self.adjacency,
            "preferences": [a.preferences for a in self.agents],
            "pref_weights": [a.weights for a in self.agents],
            "costs": [a.costs for a in self.agents],
            "budgets": [a.budget for a in self.agents],
        }


class GeneratorSpec(_Strict):
    """Request for a seeded random instance."""

    n: int = Field(ge=1, le=200)
    m: int = Field(ge=1, le=50)
    seed: int = Field(ge=0)
    regime: RegimeName = "a1"
    budget_scale: float = Field(default=1.0, gt=0)
    density: float = Field(default=0.5, ge=0, le=1)
    name: str | None = None

    @field_validator("regime", mode="before")
    @classmethod
    def lower_regime(cls, v: Any) -> Any:
        return v.lower() if isinstance(v, str) else v


# --- reports ---------------------------------------------------------------


class SimulationSummary(BaseModel):
    name: str
    scheme: str
    step: float
    steps_taken: int
    terminated_by: str
    final_time: float
    final_residual: float
    final_potential: float
    terminal_profile: Matrix
    samples: int
    trajectory_file: str | None = None


class RelationSummary(BaseModel):
    class_flags: dict[str, bool]
    enemies: list[list[int]]
    friends: list[list[int]]
    neighbors: list[list[int]]
    jacobian_definiteness: str
    gerschgorin_pd: bool
    min_eigenvalue: float
    implications_hold: bool


class UnconstrainedSummary(BaseModel):
    source: str
    q_star: Matrix | None = None
    nonnegative: bool | None = None


class EquilibriumSummary(BaseModel):
    method: str
    point: Matrix
    potential: float
    residual: float
    iterations: int
    uniqueness: str
    vi_margins: list[float]
    vi_certified: bool
    nash_residuals: list[float] | None = None
    nash_certified: bool | None = None


class PartitionSummary(BaseModel):
    exhausting: list[int]
    non_exhausting: list[int]
    lambda_star: dict[str, float]
    support: list[list[int]]


class NecessaryConditionSummary(BaseModel):
    agent: int
    exhausting: bool
    holds: bool
    deviation: float | None = None
    support: list[int] | None = None
    ratios: list[float] | None = None
    lambda_star: float | None = None


class NotExhaustSummary(BaseModel):
    agent: int
    upsilon: list[float]
    spend: float
    budget: float
    guaranteed: bool


class ExhaustSummary(BaseModel):
    agent: int
    topic: int
    threshold: float
    q_value: float
    guaranteed: bool


class LemmaSection(BaseModel):
    """Verdicts of the exhaustion conditions; ``notes`` says why a list is missing."""

    necessary: list[NecessaryConditionSummary] | None = None
    not_exhaust: list[NotExhaustSummary] | None = None
    exhaust: list[ExhaustSummary] | None = None
    consistent: bool | None = None
    notes: list[str] = Field(default_factory=list)


class AnalysisReport(BaseModel):
    name: str
    n: int
    m: int
    relations: RelationSummary
    unconstrained: UnconstrainedSummary
    equilibrium: EquilibriumSummary
    partition: PartitionSummary
    lemmas: LemmaSection


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""
    metrics: dict[str, float] = Field(default_factory=dict)


class CheckReport(BaseModel):
    name: str
    quick: bool
    passed: bool
    checks: list[CheckResult]
