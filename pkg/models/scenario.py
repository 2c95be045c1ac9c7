"""
Scenario file model.

Every section rejects unknown keys so a misspelt parameter fails loudly with
its dotted location instead of silently falling back to a default.
"""

from typing import List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from models.report import ConditionTolerances

Bound = Union[float, List[float]]


class StrictSection(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ManifoldSection(StrictSection):
    """Either a built-in manifold name or a list of parametrization expressions in w1..wm."""

    name: Optional[str] = Field(None, description="Built-in manifold name, e.g. 'helicoid3'")
    expressions: Optional[List[str]] = Field(None, description="One expression per ambient coordinate")
    m: Optional[int] = Field(None, ge=1, description="Number of virtual coordinates for expression manifolds")

    @model_validator(mode="after")
    def _one_source(self):
        if (self.name is None) == (self.expressions is None):
            raise ValueError("give exactly one of 'name' or 'expressions'")
        if self.expressions is not None and not self.expressions:
            raise ValueError("'expressions' must not be empty")
        return self


class InitialState(StrictSection):
    x: List[float] = Field(..., description="Physical position, one entry per ambient coordinate")
    omega: List[float] = Field(..., description="Virtual coordinates, one entry per manifold parameter")


class SamplingBox(StrictSection):
    x_low: Bound = Field(..., description="Lower bound(s) of sampled positions")
    x_high: Bound = Field(..., description="Upper bound(s) of sampled positions")
    omega_low: Bound = Field(..., description="Lower bound(s) of sampled virtual coordinates")
    omega_high: Bound = Field(..., description="Upper bound(s) of sampled virtual coordinates")


class RobotsSection(StrictSection):
    count: Optional[int] = Field(None, ge=1, description="Number of robots N")
    initial_states: Optional[List[InitialState]] = Field(None, description="Explicit initial states, robot 1 first")
    seed: Optional[int] = Field(None, description="Seed for sampling initial states in the box")
    box: Optional[SamplingBox] = Field(None, description="Sampling box used together with 'seed'")
    max_sampling_attempts: int = Field(10_000, ge=1, description="Rejection-sampling attempts before giving up")

    @model_validator(mode="after")
    def _one_source(self):
        if self.initial_states is not None:
            if not self.initial_states:
                raise ValueError("'initial_states' must not be empty")
            if self.count is not None and self.count != len(self.initial_states):
                raise ValueError(f"'count' is {self.count} but {len(self.initial_states)} initial states are given")
            return self
        if self.seed is None or self.count is None:
            raise ValueError("give either 'initial_states' or both 'count' and 'seed'")
        if self.box is None:
            raise ValueError("sampling with 'seed' needs a 'box'")
        return self

    @property
    def n_robots(self) -> int:
        return len(self.initial_states) if self.initial_states is not None else self.count


class GainsSection(StrictSection):
    k: Union[float, List[float], List[List[float]]] = Field(
        ..., description="Convergence gains: scalar, one per ambient coordinate, or one row per robot"
    )
    c: Union[float, List[float]] = Field(..., description="Attraction gain: scalar or one per robot")


class RadiiSection(StrictSection):
    r: float = Field(..., gt=0.0, description="Safe radius in virtual-coordinate space")
    R: float = Field(..., gt=0.0, description="Sensing radius in virtual-coordinate space")


class IntegratorSection(StrictSection):
    dt: float = Field(..., gt=0.0, description="Nominal integration step in seconds")
    t_end: float = Field(..., ge=0.0, description="Simulated horizon in seconds")
    dt_min: float = Field(..., gt=0.0, description="Smallest substep of the near-barrier safeguard")


class TargetSection(StrictSection):
    omega0: Optional[List[float]] = Field(None, description="Virtual target at t=0; zeros when omitted")


class BreakdownEvent(StrictSection):
    robot: int = Field(..., ge=1, description="1-based id of the robot that breaks down")
    time: float = Field(..., ge=0.0, description="Breakdown time in seconds")


class OutputsSection(StrictSection):
    csv: Optional[str] = Field(None, description="Trace CSV path; defaults to <output dir>/<scenario>.csv")
    json_path: Optional[str] = Field(None, alias="json", description="Summary JSON path")
    decimation: int = Field(1, ge=1, description="Record every decimation-th integration step")

    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class ChecksSection(StrictSection):
    conditions: List[Literal["C1", "C2", "C3a", "C3b"]] = Field(
        default_factory=lambda: ["C1", "C2", "C3a", "C3b"], description="Conditions that decide the exit code"
    )
    tolerances: ConditionTolerances = Field(default_factory=ConditionTolerances)


class ScenarioFile(StrictSection):
    name: Optional[str] = Field(None, description="Scenario name; defaults to the file stem")
    description: Optional[str] = Field(None, description="Free text shown by list-scenarios")
    manifold: ManifoldSection
    robots: RobotsSection
    gains: GainsSection
    radii: RadiiSection
    integrator: IntegratorSection
    target: TargetSection = Field(default_factory=TargetSection)
    breakdowns: List[BreakdownEvent] = Field(default_factory=list)
    outputs: OutputsSection = Field(default_factory=OutputsSection)
    checks: ChecksSection = Field(default_factory=ChecksSection)

    @field_validator("manifold", mode="before")
    @classmethod
    def _manifold_shorthand(cls, value):
        if isinstance(value, str):
            return {"name": value}
        return value
