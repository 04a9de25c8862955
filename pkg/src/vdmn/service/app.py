"""HTTP API over a model registry.

Models are immutable and shared; sessions are in-memory what-if
workspaces, each guarded by its own lock so concurrent PATCHes on one
session serialize. Engine failures surface as structured JSON: 409 for
bindings that fight the model, 422 for everything the engine rejects,
404 for names this registry has never heard of.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException, Response

from .. import __version__
from ..engine import (
    Bindings,
    Valuation,
    evaluate,
    overridable_ids,
    sensitivity,
    what_if,
)
from ..errors import ConflictingBinding, EngineError, InvalidArgument, LayoutOverflow, VdmnError
from ..interchange import model_to_document
from ..model import Model
from ..registry import ModelRegistry, load_corpus
from ..render import to_dot, to_svg
from ..validator import validate
from .schemas import (
    DiagnosticBody,
    EvaluateRequest,
    ModelDetailResponse,
    ModelListResponse,
    ModelSummary,
    SensitivityBody,
    SessionCreateRequest,
    SessionResponse,
    ValuationBody,
    WhatIfBody,
)


@dataclass
class _Session:
    id: str
    name: str
    model: Model
    base: Bindings
    result_type: str
    overrides: dict[str, float] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)


def _error_payload(exc: Exception) -> dict:
    return {"error": type(exc).__name__, "detail": str(exc)}


def _http_error(exc: Exception) -> HTTPException:
    if isinstance(exc, ConflictingBinding):
        return HTTPException(status_code=409, detail=_error_payload(exc))
    if isinstance(exc, (EngineError, InvalidArgument, LayoutOverflow, VdmnError)):
        return HTTPException(status_code=422, detail=_error_payload(exc))
    raise exc


def _valuation_body(valuation: Valuation) -> ValuationBody:
    return ValuationBody(**valuation.to_json_dict())


def create_app(registry: ModelRegistry | None = None) -> FastAPI:
    registry = registry if registry is not None else load_corpus()
    app = FastAPI(title="vdmn", version=__version__)
    sessions: dict[str, _Session] = {}
    diagnostics_cache = {
        name: validate(registry.models[name]) for name in registry.names()
    }

    def _model_or_404(name: str) -> Model:
        model = registry.get(name)
        if model is None:
            raise HTTPException(
                status_code=404,
                detail={"error": "UnknownModel", "detail": f"no model named '{name}'"},
            )
        return model

    def _session_or_404(session_id: str) -> _Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(
                status_code=404,
                detail={"error": "UnknownSession", "detail": f"no session '{session_id}'"},
            )
        return session

    def _session_response(session: _Session) -> SessionResponse:
        try:
            report = what_if(
                session.model,
                session.base,
                Bindings(session.overrides, session.result_type),
                result_type=session.result_type,
            )
        except VdmnError as exc:
            raise _http_error(exc) from exc
        return SessionResponse(
            session=session.id,
            model=session.name,
            result_type=session.result_type,
            overrides=dict(sorted(session.overrides.items())),
            overridable=list(overridable_ids(session.model)),
            valuation=_valuation_body(report.new),
            report=WhatIfBody(**report.to_json_dict()),
        )

    @app.get("/models", response_model=ModelListResponse)
    def list_models() -> ModelListResponse:
        out = []
        for name in registry.names():
            model = registry.models[name]
            diags = diagnostics_cache[name]
            out.append(
                ModelSummary(
                    name=name,
                    title=model.name,
                    root=model.root.id,
                    indicators=len(model.indicators),
                    errors=sum(1 for d in diags if d.severity.value == "error"),
                    warnings=sum(1 for d in diags if d.severity.value == "warning"),
                )
            )
        return ModelListResponse(models=out)

    @app.get("/models/{name}", response_model=ModelDetailResponse)
    def model_detail(name: str) -> ModelDetailResponse:
        model = _model_or_404(name)
        return ModelDetailResponse(
            name=name,
            model=model_to_document(model),
            diagnostics=[
                DiagnosticBody(**d.to_json_dict()) for d in diagnostics_cache[name]
            ],
            overridable=list(overridable_ids(model)),
        )

    @app.post("/models/{name}/evaluate", response_model=ValuationBody)
    def evaluate_model(name: str, request: EvaluateRequest) -> ValuationBody:
        model = _model_or_404(name)
        try:
            valuation = evaluate(
                model,
                Bindings(request.bindings or {}, request.result_type),
                result_type=request.result_type,
                division_by_zero=request.division_by_zero,
            )
        except VdmnError as exc:
            raise _http_error(exc) from exc
        return _valuation_body(valuation)

    @app.get("/models/{name}/sensitivity", response_model=SensitivityBody)
    def model_sensitivity(
        name: str, epsilon: float = 1e-3, result_type: str = "actual"
    ) -> SensitivityBody:
        model = _model_or_404(name)
        try:
            report = sensitivity(model, result_type=result_type, epsilon=epsilon)
        except VdmnError as exc:
            raise _http_error(exc) from exc
        return SensitivityBody(**report.to_json_dict())

    @app.get("/models/{name}/svg")
    def model_svg(
        name: str,
        values: bool = True,
        show_operators: bool = True,
        show_levels: bool = True,
        show_clusters: bool = True,
    ) -> Response:
        model = _model_or_404(name)
        valuation = (
            evaluate(model, division_by_zero="mark") if values else None
        )
        try:
            svg = to_svg(
                model,
                show_operators=show_operators,
                show_levels=show_levels,
                show_clusters=show_clusters,
                valuation=valuation,
            )
        except VdmnError as exc:
            raise _http_error(exc) from exc
        return Response(content=svg, media_type="image/svg+xml")

    @app.get("/models/{name}/dot")
    def model_dot(name: str) -> Response:
        model = _model_or_404(name)
        return Response(content=to_dot(model), media_type="text/vnd.graphviz")

    @app.post("/sessions", response_model=SessionResponse, status_code=201)
    def create_session(request: SessionCreateRequest) -> SessionResponse:
        model = _model_or_404(request.model)
        session = _Session(
            id=uuid.uuid4().hex,
            name=request.model,
            model=model,
            base=Bindings(request.bindings or {}, request.result_type),
            result_type=request.result_type,
        )
        response = _session_response(session)
        sessions[session.id] = session
        return response

    @app.get("/sessions/{session_id}", response_model=SessionResponse)
    def session_state(session_id: str) -> SessionResponse:
        session = _session_or_404(session_id)
        with session.lock:
            return _session_response(session)

    @app.patch("/sessions/{session_id}/overrides", response_model=SessionResponse)
    def patch_overrides(
        session_id: str, overrides: dict[str, float | None]
    ) -> SessionResponse:
        session = _session_or_404(session_id)
        with session.lock:
            allowed = set(overridable_ids(session.model))
            for key, value in overrides.items():
                if not session.model.has(key):
                    raise HTTPException(
                        status_code=404,
                        detail={"error": "UnknownIndicator",
                                "detail": f"no indicator '{key}'"},
                    )
                if value is not None and key not in allowed:
                    raise HTTPException(
                        status_code=422,
                        detail={
                            "error": "OverrideNotALeafDriver",
                            "detail": f"'{key}' is not an overridable leaf driver, "
                                      f"external factor, or cut node",
                        },
                    )
            rollback = dict(session.overrides)
            for key, value in overrides.items():
                if value is None:
                    session.overrides.pop(key, None)
                else:
                    session.overrides[key] = float(value)
            try:
                return _session_response(session)
            except HTTPException:
                session.overrides.clear()
                session.overrides.update(rollback)
                raise

    @app.delete("/sessions/{session_id}/overrides", response_model=SessionResponse)
    def reset_overrides(session_id: str) -> SessionResponse:
        session = _session_or_404(session_id)
        with session.lock:
            session.overrides.clear()
            return _session_response(session)

    @app.get("/sessions/{session_id}/sensitivity", response_model=SensitivityBody)
    def session_sensitivity(session_id: str, epsilon: float = 1e-3) -> SensitivityBody:
        session = _session_or_404(session_id)
        with session.lock:
            merged = session.base.overridden(
                Bindings(session.overrides, session.result_type)
            )
            try:
                report = sensitivity(
                    session.model,
                    merged,
                    result_type=session.result_type,
                    epsilon=epsilon,
                )
            except VdmnError as exc:
                raise _http_error(exc) from exc
        return SensitivityBody(**report.to_json_dict())

    return app
