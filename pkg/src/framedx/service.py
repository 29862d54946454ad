"""HTTP shell around the diagnosis pipeline.

Exposes the consultation workflow (create session, submit phases in order,
read the differential, finalize) plus the attribute catalog that drives
dynamic form generation.  Error bodies are always {code, message, detail}.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import CaseInputError
from .kb import KnowledgeBase, Phase, catalog_payload
from .pipeline import DEFAULT_EPSILON, render_json
from .session import (
    CaseStore,
    PhaseOrderError,
    SessionManager,
    SessionNotFoundError,
)


class CreateSessionBody(BaseModel):
    patient_id: str


class PhaseSubmissionBody(BaseModel):
    findings: dict[str, list[str]]


def _error(status: int, code: str, message: str, detail=None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "detail": detail},
    )


def create_app(
    kb: KnowledgeBase,
    store_dir: str | Path | None = None,
    epsilon: float = DEFAULT_EPSILON,
) -> FastAPI:
    store = CaseStore(store_dir) if store_dir is not None else None
    sessions = SessionManager(kb, store=store, epsilon=epsilon)
    app = FastAPI(title="framedx", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.sessions = sessions

    @app.exception_handler(SessionNotFoundError)
    async def _session_not_found(request: Request, exc: SessionNotFoundError):
        return _error(404, "session_not_found", str(exc))

    @app.exception_handler(PhaseOrderError)
    async def _phase_order(request: Request, exc: PhaseOrderError):
        return _error(409, "phase_order", str(exc))

    @app.exception_handler(CaseInputError)
    async def _case_input(request: Request, exc: CaseInputError):
        detail = None
        if exc.attribute is not None:
            detail = {
                "attribute": exc.attribute,
                "value": exc.value,
                "allowed": exc.allowed,
            }
        return _error(422, "invalid_token", str(exc), detail)

    @app.exception_handler(RequestValidationError)
    async def _request_validation(request: Request, exc: RequestValidationError):
        return _error(422, "invalid_request", "request body failed validation",
                      exc.errors())

    @app.get("/catalog")
    def get_catalog():
        return catalog_payload(kb.catalog)

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        session = sessions.create(body.patient_id)
        return {
            "session_id": session.session_id,
            "patient_id": session.patient_id,
            "phase_status": session.phase_status(),
            "created_at": session.created_at,
        }

    @app.post("/sessions/{session_id}/phases/{phase}")
    def submit_phase(session_id: str, phase: Phase, body: PhaseSubmissionBody):
        sessions.submit_phase(session_id, phase, body.findings)
        payload = sessions.differential_payload(session_id)
        return Response(content=render_json(payload), media_type="application/json")

    @app.get("/sessions/{session_id}/differential")
    def get_differential(session_id: str):
        payload = sessions.differential_payload(session_id)
        return Response(content=render_json(payload), media_type="application/json")

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        session = sessions.get(session_id)
        return {
            "session_id": session.session_id,
            "patient_id": session.patient_id,
            "phase_status": session.phase_status(),
            "findings": {
                p.value: session.findings[p] for p in session.findings
            },
            "finalized_record_id": session.finalized_record_id,
            "created_at": session.created_at,
            "updated_at": session.updated_at,
        }

    @app.post("/sessions/{session_id}/finalize")
    def finalize(session_id: str):
        record = sessions.finalize(session_id)
        return record

    return app
