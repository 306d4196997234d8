"""HTTP session service backing the interactive profiler UI.

Sessions are in-memory only, evicted LRU beyond a configurable cap.  Each
session owns one profiled dataset; window recomputation at a user-chosen
operating point is cached per SRR target.
"""

from __future__ import annotations

import math
import os
import threading
import uuid
from collections import OrderedDict
from typing import Optional

from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from . import ingest
from .cli import _jsonable
from .dtypes import Dtype
from .errors import ApaxError, InvalidConfig, InvalidSpec
from .profiler import DEFAULT_GRID, OperatingPoint, ProfileSession

DEFAULT_PORT = 8807
DEFAULT_MAX_SESSIONS = 32
DEFAULT_MAX_BYTES = 512 * 1024 * 1024


class SessionStore:
    def __init__(self, cap: int = DEFAULT_MAX_SESSIONS) -> None:
        self._lock = threading.Lock()
        self._sessions: "OrderedDict[str, ProfileSession]" = OrderedDict()
        self._cap = cap

    def add(self, session: ProfileSession) -> str:
        sid = uuid.uuid4().hex
        with self._lock:
            self._sessions[sid] = session
            while len(self._sessions) > self._cap:
                self._sessions.popitem(last=False)
        return sid

    def get(self, sid: str) -> Optional[ProfileSession]:
        with self._lock:
            session = self._sessions.get(sid)
            if session is not None:
                self._sessions.move_to_end(sid)
            return session

    def drop(self, sid: str) -> bool:
        with self._lock:
            return self._sessions.pop(sid, None) is not None


def _curve_json(session: ProfileSession) -> dict:
    rec = session.recommended
    return {
        "curve": [{"srr_target": p.srr_target, "ratio": p.ratio, "r": p.r}
                  for p in session.curve.points],
        "recommended": {"srr_target": rec.srr_target, "ratio": rec.ratio,
                        "r": rec.r, "target_unreachable": rec.target_unreachable},
    }


def _load_source(source: dict, corpus_dir: Optional[str], max_bytes: int):
    """Resolve a session source into (samples, dtype, name)."""
    if not isinstance(source, dict):
        raise InvalidSpec("source must be an object")
    if "synth" in source:
        spec = ingest.SynthSpec.from_dict(source["synth"])
        if spec.length * spec.dtype.width_bytes > max_bytes:
            raise InvalidSpec("dataset exceeds the configured size limit")
        return ingest.synth(spec), spec.dtype, spec.name or spec.kind
    if "raw" in source:
        raw = source["raw"]
        dtype = Dtype.from_code(raw["dtype"])
        path = raw["path"]
        if corpus_dir is not None:
            path = os.path.join(corpus_dir, os.path.basename(path))
        spec = ingest.RawDatasetSpec(path=path, dtype=dtype,
                                     byte_order=raw.get("byte_order", "little"),
                                     element_count=raw.get("element_count"))
        if os.path.exists(path) and os.path.getsize(path) > max_bytes:
            raise InvalidSpec("dataset exceeds the configured size limit")
        return ingest.read_raw(spec), dtype, os.path.basename(path)
    raise InvalidSpec("source must contain 'synth' or 'raw'")


def create_app(corpus_dir: Optional[str] = None,
               max_sessions: int = DEFAULT_MAX_SESSIONS,
               max_bytes: int = DEFAULT_MAX_BYTES,
               static_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="apax profiler service")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    store = SessionStore(max_sessions)

    @app.post("/sessions")
    async def create_session(request: Request):
        try:
            body = await request.json()
        except Exception:
            return JSONResponse({"error": "body must be JSON"}, status_code=400)
        if not isinstance(body, dict) or "source" not in body:
            return JSONResponse({"error": "missing 'source'"}, status_code=400)
        try:
            grid = body.get("grid", DEFAULT_GRID)
            block_size = int(body.get("block_size", 4096))
            x, dtype, name = _load_source(body["source"], corpus_dir, max_bytes)
        except (InvalidSpec, InvalidConfig, KeyError, TypeError, ValueError) as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        except (ApaxError, OSError) as exc:
            return JSONResponse({"error": str(exc)}, status_code=422)
        try:
            session = ProfileSession(x, dtype, grid, block_size, name=name)
        except InvalidConfig as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        except ApaxError as exc:
            return JSONResponse({"error": str(exc)}, status_code=422)
        sid = store.add(session)
        return JSONResponse(_jsonable({"id": sid, **_curve_json(session)}))

    @app.get("/sessions/{sid}/curve")
    async def get_curve(sid: str):
        session = store.get(sid)
        if session is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        return JSONResponse(_jsonable(_curve_json(session)))

    @app.get("/sessions/{sid}/windows")
    async def get_windows(sid: str, srr_target: float = Query(...)):
        session = store.get(sid)
        if session is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        grid = session.grid
        step = grid[1] - grid[0] if len(grid) > 1 else 0.0
        if not (grid[0] - step <= srr_target <= grid[-1] + step) or not math.isfinite(srr_target):
            return JSONResponse({"error": "srr_target outside the swept range"},
                                status_code=400)
        windows = session.windows_at(srr_target)
        session.current_point = OperatingPoint(
            srr_target, windows["ratio"], windows["metrics"]["pearson_r"])
        return JSONResponse(_jsonable(windows))

    @app.delete("/sessions/{sid}")
    async def delete_session(sid: str):
        if not store.drop(sid):
            return JSONResponse({"error": "unknown session"}, status_code=404)
        return Response(status_code=204)

    if static_dir is None:
        bundled = os.path.join(os.path.dirname(__file__), "..", "..",
                               "frontend", "dist")
        static_dir = bundled if os.path.isdir(bundled) else None
    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
