"""HTTP service exposing the recommendation engine to the UI.

Thin layer: every endpoint delegates to the store, the agent, or the
ingestion pipeline and maps package errors onto one stable JSON error
shape. Ingestion runs on a single background worker so POST /api/ingest
returns immediately with a pollable job id.
"""

from __future__ import annotations

import logging
import queue
import threading
import uuid

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .config import AppConfig
from .errors import HapticRecError, NotFoundError, QueryError
from .runtime import AppState, build_state
from .schema import Op, Predicate

logger = logging.getLogger(__name__)

_STATUS_BY_CODE = {
    "bad_request": 400,
    "not_found": 404,
    "conflict": 409,
    "provider_unavailable": 503,
    "internal": 500,
}


class ChatRequest(BaseModel):
    prompt: str


class IngestRequest(BaseModel):
    uri: str
    kind: str = "plain_text"
    source_kind: str = "commercial"


class IngestJobQueue:
    """One worker thread draining a FIFO of ingest jobs."""

    def __init__(self, state: AppState):
        self._state = state
        self._jobs: dict[str, dict] = {}
        self._lock = threading.Lock()
        self._queue: queue.Queue = queue.Queue()
        self._worker = threading.Thread(target=self._run, daemon=True)
        self._worker.start()

    def submit(self, uri: str, kind: str, source_kind: str) -> str:
        job_id = uuid.uuid4().hex[:12]
        with self._lock:
            self._jobs[job_id] = {
                "job_id": job_id,
                "uri": uri,
                "status": "queued",
                "review_id": None,
                "error": None,
            }
        self._queue.put((job_id, uri, kind, source_kind))
        return job_id

    def status(self, job_id: str) -> dict:
        with self._lock:
            if job_id not in self._jobs:
                raise NotFoundError(f"no ingest job {job_id!r}")
            return dict(self._jobs[job_id])

    def _set(self, job_id: str, **updates) -> None:
        with self._lock:
            self._jobs[job_id].update(updates)

    def _run(self) -> None:
        while True:
            job_id, uri, kind, source_kind = self._queue.get()
            self._set(job_id, status="running")
            try:
                item = self._state.pipeline.ingest_file(uri, kind, source_kind)
            except Exception as exc:
                logger.warning("ingest job %s failed: %s", job_id, exc)
                self._set(job_id, status="error", error=str(exc))
            else:
                self._set(job_id, status="done", review_id=item.id)
            finally:
                self._queue.task_done()


def _parse_attr_filters(request: Request) -> list[Predicate]:
    predicates = []
    for key, raw in request.query_params.multi_items():
        if not key.startswith("attr."):
            continue
        attribute = key[len("attr.") :]
        op_name, sep, literal = raw.partition(":")
        if not sep:
            raise QueryError(
                f"filter {key}={raw!r} must use <op>:<value>, e.g. gte:6"
            )
        try:
            op = Op(op_name)
        except ValueError:
            raise QueryError(f"unknown operator {op_name!r} in {key}") from None
        predicates.append(Predicate(attribute, op, literal))
    return predicates


def create_app(state: AppState | None = None, config: AppConfig | None = None) -> FastAPI:
    state = state or build_state(config)
    app = FastAPI(title="hapticrec", docs_url=None, redoc_url=None)
    app.state.engine = state
    jobs = IngestJobQueue(state)

    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(HapticRecError)
    async def _handle_error(_request: Request, exc: HapticRecError):
        return JSONResponse(
            status_code=_STATUS_BY_CODE.get(exc.api_code, 500),
            content={
                "error": {
                    "code": exc.api_code,
                    "message": str(exc),
                    "retryable": bool(exc.retryable),
                }
            },
        )

    @app.post("/api/sessions")
    def create_session():
        session = state.sessions.create()
        return {"session_id": session.id}

    @app.post("/api/sessions/{session_id}/chat")
    def chat(session_id: str, body: ChatRequest):
        if not body.prompt.strip():
            raise QueryError("prompt must be non-empty")
        response = state.agent.chat_turn(session_id, body.prompt)
        return response.to_dict()

    @app.get("/api/devices/{device_id}")
    def get_device(device_id: int):
        return state.store.get_device(device_id).to_dict()

    @app.get("/api/devices")
    def list_devices(request: Request):
        predicates = _parse_attr_filters(request)
        records = state.store.query_structured(predicates)
        return {"devices": [r.to_dict() for r in records]}

    @app.get("/api/samples")
    def samples():
        return {"samples": list(state.samples)}

    @app.post("/api/ingest")
    def ingest(body: IngestRequest):
        job_id = jobs.submit(body.uri, body.kind, body.source_kind)
        return {"job_id": job_id}

    @app.get("/api/ingest/{job_id}")
    def ingest_status(job_id: str):
        return jobs.status(job_id)

    return app
