"""Wire types for the HTTP service.

These models only shape the JSON; numeric validation stays in the core
package so the service and library reject exactly the same inputs.
"""
from __future__ import annotations

from pydantic import BaseModel

from ..params import (
    HashrateProfile,
    ProtocolParams,
    Scenario,
    TieBreakParams,
    validate_scenario,
)

THETA_DEFAULT = 1.0 / 3.0


class ScenarioIn(BaseModel):
    alpha1: float = 0.0
    alpha2: float = 0.0
    gamma1: float = 0.5
    gamma2: float = 0.5
    theta1: float = THETA_DEFAULT
    theta2: float = THETA_DEFAULT
    n_cap: int = 4
    blocks_per_epoch: int = 2016
    honest_majority_required: bool = True

    def build(self) -> Scenario:
        return validate_scenario(
            HashrateProfile(self.alpha1, self.alpha2),
            TieBreakParams(self.gamma1, self.gamma2, self.theta1, self.theta2),
            ProtocolParams(
                n_cap=self.n_cap,
                blocks_per_epoch=self.blocks_per_epoch,
                honest_majority_required=self.honest_majority_required,
            ),
        )


class AnalyzeRequest(ScenarioIn):
    include_edges: bool = False


class AnalyzeResponse(BaseModel):
    states: int
    rates: tuple[float, float, float]
    orphan_rates: tuple[float, float, float]
    relative: tuple[float, float, float]
    yield_per_block: float
    blocks_per_round: float
    closed_form_cap: int | None = None
    closed_form_residual: float | None = None
    edges: str | None = None


class SimulateRequest(ScenarioIn):
    blocks: int = 1_000_000
    seed: int = 0
    replications: int = 1
    jobs: int = 1


class ReplicationOut(BaseModel):
    seed: int
    credits: tuple[int, int, int]
    orphans: tuple[int, int, int]
    rounds: int
    relative: tuple[float, float, float]
    relative_stderr: tuple[float, float, float]


class SimulateResponse(BaseModel):
    blocks: int
    replications: list[ReplicationOut]
    credits: tuple[int, int, int]
    orphans: tuple[int, int, int]
    rounds: int
    relative: tuple[float, float, float]
    yield_per_block: float
    conserved: bool


class ThresholdRequest(BaseModel):
    mode: str = "symmetric"
    evaluator: str = "markov"
    n_cap: int = 4
    alpha1: float | None = None
    gamma1: float = 0.5
    gamma2: float = 0.5
    theta1: float = THETA_DEFAULT
    theta2: float = THETA_DEFAULT
    tol: float = 1e-5
    blocks: int = 2_000_000
    seed: int = 0

    def tiebreak(self) -> TieBreakParams:
        return TieBreakParams(self.gamma1, self.gamma2, self.theta1, self.theta2)


class ThresholdResponse(BaseModel):
    mode: str
    evaluator: str
    n_cap: int
    threshold: float
    bracket: tuple[float, float]
    evaluations: int
    honest_majority_ok: bool
    alpha1: float | None = None


class GrowthIn(BaseModel):
    kind: str = "constant"
    factor: float = 1.0
    multipliers: list[float] = []


class TransientRequest(ScenarioIn):
    epochs: int = 60
    growth: GrowthIn = GrowthIn()


class EpochRowOut(BaseModel):
    epoch: int
    hashrate: float
    difficulty: float
    duration: float
    blocks_mined: float
    credits: tuple[float, float, float]
    absolute_rates: tuple[float, float, float]
    cumulative_rate1: float
    baseline_rate1: float
    profitable: bool


class TransientResponse(BaseModel):
    shares: tuple[float, float, float]
    yield_per_block: float
    rows: list[EpochRowOut]
    profitable_after: int | None
    days_to_profit: float | None


class ReproduceResponse(BaseModel):
    figure: str
    columns: list[str]
    rows: list[list[float]]
    parameters: dict


class ErrorBody(BaseModel):
    error: str
    detail: str
