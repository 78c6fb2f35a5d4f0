"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class ActionOut(BaseModel):
    index: int
    name: str
    impact: float
    resource_engagement: float
    weight: float


class ActionsResponse(BaseModel):
    actions: list[ActionOut]
    weight_source: str


class CriterionIn(BaseModel):
    name: str
    weight: float
    kind: str = "Benefit"


class AlternativeIn(BaseModel):
    label: str
    values: list[float]


class WeightsRequest(BaseModel):
    criteria: list[CriterionIn]
    alternatives: list[AlternativeIn]


class WeightEntry(BaseModel):
    label: str
    weight: float


class WeightsResponse(BaseModel):
    weights: list[WeightEntry]


class ScoreRequest(BaseModel):
    bits: list[int]


class PerActionScore(BaseModel):
    index: int
    name: str
    weight: float
    included: bool


class ScoreResponse(BaseModel):
    score: float
    per_action: list[PerActionScore]


class FuseRequest(BaseModel):
    plans: list[list[int]]


class FuseResponse(BaseModel):
    bits: list[int]
    source: str
    # None when the fused vector is not catalog-length and cannot be scored
    score: float | None


class IncidentIn(BaseModel):
    """Inline incident record; mirrors the accident CSV columns that matter
    for report rendering. Only `id` is required."""

    id: str
    source: str | None = None
    severity: int | None = None
    start_lat: float | None = None
    start_lng: float | None = None
    extent_miles: float | None = None
    description: str | None = None
    street: str | None = None
    city: str | None = None
    county: str | None = None
    state: str | None = None
    zipcode: str | None = None
    timezone: str | None = None
    airport_code: str | None = None


class GenerateRequest(BaseModel):
    incident_id: str | None = None
    record: IncidentIn | None = None
    m: int | None = Field(default=None, ge=1)
    backend: str | None = None


class GenerationOut(BaseModel):
    source: str
    bits: list[int]
    score: float
    reprompts: int
    raw_text: str


class JobResult(BaseModel):
    generations: list[GenerationOut]
    fused_bits: list[int]
    fused_source: str
    score: float


class JobResponse(BaseModel):
    job_id: str
    incident_id: str
    backend_id: str
    m: int
    retry_budget: int
    status: str
    error: str | None = None
    result: JobResult | None = None


class SynthesizeRequest(BaseModel):
    document: str
    backend: str | None = None


class GuidelineRowOut(BaseModel):
    scenario_id: int
    incident_type: str
    severity: str
    location: str
    actions: list[str]
    equipment: list[str]


class SynthesizeResponse(BaseModel):
    schema_version: int
    rows: list[GuidelineRowOut]


class IncidentSummary(BaseModel):
    id: str
    description: str | None = None
    city: str | None = None
    state: str | None = None
    report: str
