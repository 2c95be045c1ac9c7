"""
Report models for condition checks, verification suites and run summaries.
"""

from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field


class ConditionTolerances(BaseModel):
    """Thresholds used when checking the success conditions at the end of a run."""

    model_config = ConfigDict(extra="forbid")

    phi: float = Field(1e-2, gt=0.0, description="Bound on max_i |Phi_i| for on-manifold convergence")
    omega_rate: float = Field(1e-2, gt=0.0, description="Bound on max_i |w_i' - (-1)^n 1_m| for on-manifold maneuvering")
    centroid: float = Field(1e-2, gt=0.0, description="Bound on |mean_i w_i - w_*| for the centroid of alive robots")


class ConditionResult(BaseModel):
    """Outcome of one condition with the value that decided it."""

    name: str = Field(..., description="Condition name: C1, C2, C3a or C3b")
    passed: bool = Field(..., description="Whether the condition holds")
    witness: float = Field(..., description="Measured value compared against the threshold")
    threshold: float = Field(..., description="Threshold the witness is compared against")
    robot: Optional[int] = Field(None, description="Robot attaining the witness value, if any")
    pair: Optional[Tuple[int, int]] = Field(None, description="Robot pair attaining the witness value, if any")
    detail: Optional[str] = Field(None, description="Human-readable explanation")


class ConditionReport(BaseModel):
    """Condition results evaluated at the final sample of a trace."""

    time: float = Field(..., description="Time of the evaluated sample in seconds")
    alive: List[int] = Field(default_factory=list, description="Ids of robots alive at that time")
    results: List[ConditionResult] = Field(default_factory=list, description="One result per requested condition")

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    def result(self, name: str) -> ConditionResult:
        for result in self.results:
            if result.name == name:
                return result
        raise KeyError(f"Condition {name} was not checked")

    def format(self) -> str:
        lines = [f"Conditions at t={self.time:.6g}s (alive robots: {', '.join(map(str, self.alive)) or 'none'})"]
        for result in self.results:
            status = "PASS" if result.passed else "FAIL"
            line = f"  {result.name:<4} {status}  witness={result.witness:.6g}  threshold={result.threshold:.6g}"
            if result.detail:
                line += f"  ({result.detail})"
            lines.append(line)
        return "\n".join(lines)


class DecouplingReport(BaseModel):
    """Agreement of brute-force and closed-form propagation terms over random partials."""

    n_max: int = Field(..., ge=1)
    m_max: int = Field(..., ge=1)
    trials: int = Field(..., ge=0)
    seed: int
    tolerance: float
    pass_matrix: List[List[bool]] = Field(..., description="Entry [n-1][m-1] tells whether every trial passed")
    cases: int = Field(0, description="Number of (n, m, trial) instances compared")
    max_relative_error: float = Field(0.0, description="Largest relative deviation observed")

    @property
    def passed(self) -> bool:
        return all(all(row) for row in self.pass_matrix)

    def format(self) -> str:
        header = "n\\m " + " ".join(f"{m:>4}" for m in range(1, self.m_max + 1))
        lines = [header]
        for n, row in enumerate(self.pass_matrix, start=1):
            lines.append(f"{n:>3} " + " ".join(" yes" if cell else "  NO" for cell in row))
        lines.append(
            f"{self.cases} instances, {self.trials} trials per cell, max relative error {self.max_relative_error:.3g}"
        )
        return "\n".join(lines)


class CouplingDraw(BaseModel):
    partials: List[List[float]]
    infeasible: List[float] = Field(..., description="Last three entries with the infeasible auxiliary vectors")
    reference: List[float] = Field(..., description="The same entries from their explicit expressions")
    published: List[float] = Field(..., description="The same entries from the published expressions")
    feasible: List[float] = Field(..., description="Last three entries with the feasible auxiliary vectors")

    @property
    def published_disagrees(self) -> bool:
        return any(abs(a - b) > 1e-9 * max(1.0, abs(a)) for a, b in zip(self.infeasible, self.published))


class CouplingReport(BaseModel):
    """Propagation-term entries with infeasible versus feasible auxiliary vectors."""

    symbolic: List[str] = Field(..., description="Infeasible last three entries as expressions of the partials f_jl")
    published_symbolic: List[str] = Field(..., description="The published expressions for the same entries")
    spot_checks: List[CouplingDraw] = Field(..., description="All-ones and all-zeros partials")
    draws: List[CouplingDraw]
    infeasible_std: List[float] = Field(..., description="Per-entry standard deviation over the random draws")
    feasible_std: List[float] = Field(..., description="Per-entry standard deviation over the random draws")

    def format(self) -> str:
        def fmt(values):
            return "[" + ", ".join(f"{v:+.4f}" for v in values) + "]"

        lines = ["Infeasible auxiliary vectors, last three entries (derived | published):"]
        for idx, (derived, published) in enumerate(zip(self.symbolic, self.published_symbolic), start=4):
            lines.append(f"  p{idx} = {derived:<24} | {published}")
        lines.append(
            "draw  infeasible                    reference                     published                     feasible"
        )
        labelled = [("ones", d) for d in self.spot_checks[:1]] + [("zero", d) for d in self.spot_checks[1:]]
        labelled += [(str(idx), d) for idx, d in enumerate(self.draws)]
        for label, draw in labelled:
            mark = " *" if draw.published_disagrees else ""
            lines.append(
                f"{label:>4}  {fmt(draw.infeasible):<28}  {fmt(draw.reference):<28}  "
                f"{fmt(draw.published):<28}  {fmt(draw.feasible)}{mark}"
            )
        lines.append(f"std   {fmt(self.infeasible_std):<28}  {'':<28}  {'':<28}  {fmt(self.feasible_std)}")
        if any(draw.published_disagrees for _, draw in labelled):
            lines.append(
                f"* p6 disagrees: published {self.published_symbolic[2]}, brute force gives {self.symbolic[2]}"
            )
        return "\n".join(lines)


class RunSummary(BaseModel):
    """JSON summary written next to the CSV trace."""

    scenario: str
    manifold: str
    n_robots: int
    alive: List[int]
    t_end: float
    samples: int
    min_separation: float = Field(..., description="Smallest distance between alive virtual coordinates over the run")
    min_separation_pair: Optional[Tuple[int, int]] = None
    min_separation_time: Optional[float] = None
    final_lyapunov: float
    lyapunov_descent: bool = Field(..., description="Whether V never increased beyond the numerical slack")
    conditions: ConditionReport
    csv_path: Optional[str] = None
