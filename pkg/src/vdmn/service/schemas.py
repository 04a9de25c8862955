"""Request and response bodies for the HTTP API."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field


class ModelSummary(BaseModel):
    name: str
    title: str
    root: str
    indicators: int
    errors: int
    warnings: int


class ModelListResponse(BaseModel):
    models: list[ModelSummary]


class DiagnosticBody(BaseModel):
    code: str
    severity: str
    subjects: list[str]
    message: str


class ModelDetailResponse(BaseModel):
    name: str
    model: dict
    diagnostics: list[DiagnosticBody]
    overridable: list[str]

    model_config = ConfigDict(protected_namespaces=())


class EvaluateRequest(BaseModel):
    bindings: dict[str, float] | None = None
    result_type: str = "actual"
    division_by_zero: Literal["raise", "mark"] = "raise"

    model_config = ConfigDict(extra="forbid")


class NotComputedBody(BaseModel):
    reason: str
    detail: str | None = None


class ValuationBody(BaseModel):
    result_type: str
    root: str
    values: dict[str, float | None]
    not_computed: dict[str, NotComputedBody]
    gateway_choices: dict[str, str]


class SessionCreateRequest(BaseModel):
    model: str
    bindings: dict[str, float] | None = None
    result_type: str = "actual"

    model_config = ConfigDict(extra="forbid", protected_namespaces=())


class WhatIfEntryBody(BaseModel):
    id: str
    base: float | None
    new: float | None
    delta: float | None
    percent: float | None


class WhatIfBody(BaseModel):
    result_type: str
    root: str
    overrides: dict[str, float]
    entries: list[WhatIfEntryBody]


class SessionResponse(BaseModel):
    session: str
    model: str
    result_type: str
    overrides: dict[str, float]
    overridable: list[str]
    valuation: ValuationBody
    report: WhatIfBody

    model_config = ConfigDict(protected_namespaces=())


class SensitivityEntryBody(BaseModel):
    id: str
    base_value: float
    delta_per_unit: float
    elasticity: float | None
    controllable: bool


class SensitivityBody(BaseModel):
    result_type: str
    root: str
    root_value: float
    epsilon: float
    entries: list[SensitivityEntryBody]


class ErrorBody(BaseModel):
    error: str
    detail: str
    subjects: list[str] = Field(default_factory=list)
