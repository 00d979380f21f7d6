"""Pydantic request/response models for the conformance service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class ScoreParamsModel(BaseModel):
    match: float = 1.0
    gap: float = -2.0
    mismatch: float = -2.0


class SimulateRequest(BaseModel):
    net: str = Field(description="Net document, PNML or compact JSON")
    net_format: Literal["pnml", "json"] = "pnml"
    seed: int
    runs: int = Field(default=1000, ge=1)
    max_len: int = Field(default=65, ge=1)
    final_activity: str = "Check catheter position"
    drop_invisible: bool = True
    deduplicate: bool = True


class SimStatsModel(BaseModel):
    discarded_incomplete: int
    discarded_deadlocked: int
    duplicates_removed: int


class SimulateResponse(BaseModel):
    csv: str = Field(description="Normative event log in the log CSV schema")
    n_kept: int
    stats: SimStatsModel


class AlignRequest(BaseModel):
    s1: list[str]
    s2: list[str]
    scores: ScoreParamsModel = ScoreParamsModel()


class AlignResponse(BaseModel):
    case_id: Optional[str] = None
    normative_index: Optional[int] = None
    score: float
    identity: float
    matches: int
    s1: list[str]
    s2: list[str]


class ReportRequest(BaseModel):
    log_csv: str
    norm_csv: str
    stages_csv: str
    resources_csv: Optional[str] = None
    scores: ScoreParamsModel = ScoreParamsModel()


class ReportResponse(BaseModel):
    report: dict


class HealthResponse(BaseModel):
    status: str
    version: str
