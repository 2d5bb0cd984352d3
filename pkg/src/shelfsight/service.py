"""HTTP/JSON API over the session engine.

Endpoints mirror the session operations one-to-one; every body is UTF-8
JSON and every error is shaped {"error": {"code", "message"}}. The coupon
endpoint is a long-lived newline-delimited JSON stream (?follow=false
returns the backlog and closes, for polling clients and tests).
"""

from __future__ import annotations

import asyncio
import json
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles

from . import wire
from .catalog import Catalog
from .errors import (
    EmptyComparisonError,
    InvalidArgumentError,
    NotFoundError,
    SchemaError,
)
from .session import EngineConfig, SessionManager

STREAM_POLL_SECONDS = 0.2


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": {"code": code, "message": message}})


async def _read_json(request: Request) -> dict:
    try:
        body = await request.body()
        return json.loads(body) if body else {}
    except json.JSONDecodeError as e:
        raise SchemaError("body", f"invalid JSON: {e.msg}") from e


def create_app(
    catalog: Catalog,
    config: EngineConfig | None = None,
    fixtures_dir: Path | None = None,
    ui_dir: Path | None = None,
) -> FastAPI:
    manager = SessionManager(catalog, config)
    app = FastAPI(title="shelfsight", docs_url=None, redoc_url=None)
    app.state.manager = manager
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(SchemaError)
    async def _schema_error(request: Request, exc: SchemaError):
        return _error(400, "validation_error", str(exc))

    @app.exception_handler(InvalidArgumentError)
    async def _invalid_argument(request: Request, exc: InvalidArgumentError):
        return _error(400, "validation_error", str(exc))

    @app.exception_handler(NotFoundError)
    async def _not_found(request: Request, exc: NotFoundError):
        return _error(404, "not_found", str(exc))

    @app.exception_handler(EmptyComparisonError)
    async def _empty_comparison(request: Request, exc: EmptyComparisonError):
        return _error(409, "empty_comparison", str(exc))

    @app.exception_handler(RequestValidationError)
    async def _request_validation(request: Request, exc: RequestValidationError):
        return _error(400, "validation_error", str(exc.errors()))

    @app.get("/health")
    async def health():
        return {"status": "ok", "products": len(catalog)}

    @app.get("/products")
    async def products():
        return {"products": [wire.record_to_dict(r) for r in catalog.products]}

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        doc = await _read_json(request)
        features = doc.get("features")
        if features is not None and (
            not isinstance(features, list) or not all(isinstance(f, str) for f in features)
        ):
            raise SchemaError("features", "expected array of feature names")
        session = manager.create_session(features)
        return wire.session_to_dict(session)

    @app.post("/sessions/{session_id}/frames")
    async def submit_frame(session_id: str, request: Request):
        frame = wire.parse_scene_frame(await _read_json(request))
        return wire.overlay_to_dict(manager.submit_frame(session_id, frame))

    @app.put("/sessions/{session_id}/filter")
    async def set_filter(session_id: str, request: Request):
        predicate = wire.parse_filter(await _read_json(request))
        return wire.overlay_to_dict(manager.set_filter(session_id, predicate))

    @app.put("/sessions/{session_id}/features")
    async def select_features(session_id: str, request: Request):
        doc = await _read_json(request)
        features = doc.get("features")
        if not isinstance(features, list) or not all(isinstance(f, str) for f in features):
            raise SchemaError("features", "expected array of feature names")
        return wire.overlay_to_dict(manager.select_features(session_id, features))

    @app.put("/sessions/{session_id}/glyphs")
    async def toggle_glyphs(session_id: str, request: Request):
        doc = await _read_json(request)
        enabled = doc.get("enabled")
        if not isinstance(enabled, bool):
            raise SchemaError("enabled", "expected boolean")
        return wire.overlay_to_dict(manager.toggle_glyphs(session_id, enabled))

    @app.post("/sessions/{session_id}/favorites/{product_id}")
    async def toggle_favorite(session_id: str, product_id: str):
        return {"favorites": manager.toggle_favorite(session_id, product_id)}

    @app.get("/sessions/{session_id}/overlay")
    async def overlay(session_id: str):
        return wire.overlay_to_dict(manager.overlay(session_id))

    @app.get("/sessions/{session_id}/comparison")
    async def comparison(session_id: str):
        return wire.comparison_to_dict(manager.comparison_view(session_id))

    @app.get("/sessions/{session_id}/coupons")
    async def coupons(session_id: str, request: Request, since: int = 0, follow: bool = True):
        manager.get(session_id)

        async def stream():
            cursor = since
            while True:
                for event in manager.coupon_events(session_id, cursor):
                    cursor = event.seq
                    yield wire.dumps_line(wire.event_to_dict(event)) + "\n"
                if not follow or await request.is_disconnected():
                    return
                await asyncio.sleep(STREAM_POLL_SECONDS)

        return StreamingResponse(stream(), media_type="application/x-ndjson")

    if fixtures_dir is not None:

        @app.get("/fixtures-index")
        async def fixtures_index():
            frames = sorted(p.name for p in fixtures_dir.glob("*.json"))
            return {"frames": frames}

        app.mount("/fixtures", StaticFiles(directory=str(fixtures_dir)), name="fixtures")
    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
