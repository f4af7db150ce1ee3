"""Request and response models for the HTTP API."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field

ValueKind = Literal["number", "text", "text_list", "number_list", "map", "model", "none"]
TruthKind = Literal["number", "text", "text_list", "number_list", "map", "multipart"]


class DatasetInfo(BaseModel):
    id: str
    name: str
    rows: int
    columns: int
    size: str


class DatasetList(BaseModel):
    datasets: list[DatasetInfo]


class ProfileResponse(BaseModel):
    id: str
    profile: str
    level: int
    tokens: int


class QueryRequest(BaseModel):
    dataset_id: str
    question: str = Field(min_length=1)
    budget: int | None = Field(default=None, ge=1)


class PlanStepOut(BaseModel):
    index: int
    rationale: str
    op: str
    result: str


class AnswerOut(BaseModel):
    kind: str
    value: Any


class QueryResponse(BaseModel):
    dataset_id: str
    plan: list[PlanStepOut]
    answer: AnswerOut
    answer_text: str


class ValueIn(BaseModel):
    kind: ValueKind
    value: Any


class TruthIn(BaseModel):
    kind: TruthKind
    value: Any
    margin: float | None = Field(default=None, ge=0)


class CheckRequest(BaseModel):
    predicted: ValueIn
    truth: TruthIn
    order_insensitive: bool = False


class CheckResponse(BaseModel):
    correct: bool
    reason: str


class BenchRequest(BaseModel):
    manifest_path: str


class FailureInfo(BaseModel):
    kind: str
    detail: str


class FailureResponse(BaseModel):
    failure: FailureInfo
