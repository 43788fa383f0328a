"""HTTP boundary: accepts grid-cell command payloads, bridges them onto the
bus byte-for-byte, and streams boards, explanations and robot status back to
clients over server-sent events.

Handlers never mutate dialogue state directly: commands go through the bus,
profile and feedback changes are submitted to the dialogue worker, and reads
are immutable snapshots.
"""

from __future__ import annotations

import asyncio
import json
import queue
import threading
import time
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import HTMLResponse, JSONResponse, Response, StreamingResponse
from fastapi.staticfiles import StaticFiles

from .boards import BOARD_KINDS
from .bus import TOPIC_EXPLANATIONS
from .errors import IllegalValue, UnknownMessage
from .runtime import Runtime

MAX_BODY_BYTES = 4096
MAX_TOKEN_BYTES = 64
DEFAULT_HEARTBEAT_SECONDS = 15.0

_FALLBACK_PAGE = """<!doctype html>
<html lang="en"><head><meta charset="utf-8"><title>pictobridge</title></head>
<body><h1>pictobridge gateway</h1>
<p>No UI bundle is installed. Endpoints:</p>
<ul>
<li>POST /api/command</li>
<li>GET /api/stream</li>
<li>GET /api/board/{id}</li>
<li>GET/POST /api/profile</li>
<li>POST /api/feedback</li>
<li>GET /api/history?limit=N</li>
</ul></body></html>
"""


def _bad_request(detail: str) -> JSONResponse:
    return JSONResponse({"status": "error", "detail": detail}, status_code=400)


def _normalize_token(command: str, args: dict | None) -> str:
    if args:
        value = args.get("value") or args.get("arg")
        if value:
            return f"{command}:{value}"
    return command


def _validate_token(token: str) -> str | None:
    """Returns an error string, or None when the token is acceptable."""
    if not token:
        return "empty command token"
    if len(token.encode("utf-8")) > MAX_TOKEN_BYTES:
        return f"command token over {MAX_TOKEN_BYTES} bytes"
    if any(c.isspace() for c in token):
        return "command token must not contain whitespace"
    return None


def _sse(event: str, data: str) -> str:
    lines = "".join(f"data: {line}\n" for line in data.splitlines() or [""])
    return f"event: {event}\n{lines}\n"


def build_app(
    runtime: Runtime,
    *,
    heartbeat_seconds: float = DEFAULT_HEARTBEAT_SECONDS,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="pictobridge", docs_url=None, redoc_url=None)
    app.state.runtime = runtime
    app.state.heartbeat_seconds = heartbeat_seconds

    # -- command bridge -------------------------------------------------------

    @app.post("/api/command")
    async def post_command(request: Request):
        body = await request.body()
        if len(body) > MAX_BODY_BYTES:
            return JSONResponse(
                {"status": "error", "detail": "body too large"}, status_code=413
            )
        content_type = request.headers.get("content-type", "")
        if "application/json" in content_type:
            try:
                raw = json.loads(body.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError):
                return _bad_request("body is not valid JSON")
            if not isinstance(raw, dict) or not isinstance(raw.get("command"), str):
                return _bad_request("expected {\"command\": \"<token>\"}")
            args = raw.get("args")
            if args is not None and not isinstance(args, dict):
                return _bad_request("args must be an object")
            token = _normalize_token(raw["command"], args)
        else:
            try:
                token = body.decode("utf-8").strip()
            except UnicodeDecodeError:
                return _bad_request("body is not UTF-8 text")
        error = _validate_token(token)
        if error is not None:
            return _bad_request(error)
        runtime.publish_command(token)
        return {"status": "ok", "published": token}

    # -- live stream -----------------------------------------------------------

    @app.get("/api/stream")
    async def stream():
        async def gen():
            sub = runtime.bus.subscribe(TOPIC_EXPLANATIONS)
            aq: asyncio.Queue = asyncio.Queue()
            loop = asyncio.get_running_loop()
            stop = threading.Event()

            def pump() -> None:
                while not stop.is_set():
                    try:
                        msg = sub.get(timeout=0.2)
                    except queue.Empty:
                        continue
                    loop.call_soon_threadsafe(aq.put_nowait, msg.payload)

            thread = threading.Thread(target=pump, name="sse-pump", daemon=True)
            thread.start()
            try:
                yield _sse("board", json.dumps({"active": runtime.active_board}))
                last_status = runtime.snapshot()
                yield _sse("status", json.dumps(last_status, ensure_ascii=False))
                last_beat = time.monotonic()
                while True:
                    wait = min(0.25, max(0.05, heartbeat_seconds - (time.monotonic() - last_beat)))
                    try:
                        payload = await asyncio.wait_for(aq.get(), timeout=wait)
                        yield _sse("explanation", payload)
                        continue
                    except asyncio.TimeoutError:
                        pass
                    status = runtime.snapshot()
                    if status != last_status:
                        last_status = status
                        yield _sse("status", json.dumps(status, ensure_ascii=False))
                    if time.monotonic() - last_beat >= heartbeat_seconds:
                        last_beat = time.monotonic()
                        yield ": heartbeat\n\n"
            finally:
                stop.set()
                sub.close()

        return StreamingResponse(gen(), media_type="text/event-stream")

    # -- boards ------------------------------------------------------------------

    @app.get("/api/board/{board_id}")
    async def get_board(board_id: str):
        if board_id not in BOARD_KINDS or runtime.board_dir is None:
            return JSONResponse({"status": "error", "detail": "unknown board"}, status_code=404)
        path = runtime.board_dir / f"{board_id}.json"
        if not path.exists():
            return JSONResponse({"status": "error", "detail": "unknown board"}, status_code=404)
        return Response(content=path.read_bytes(), media_type="application/json")

    # -- profile, feedback, history ------------------------------------------------

    @app.get("/api/profile")
    async def get_profile():
        def read(engine):
            return {
                "profile": engine.profile.to_dict(),
                "feedback": {"yes": engine.ledger.yes_count, "no": engine.ledger.no_count},
            }

        return await asyncio.wrap_future(runtime.submit(read))

    @app.post("/api/profile")
    async def post_profile(request: Request):
        try:
            patch = json.loads(await request.body())
        except json.JSONDecodeError:
            return _bad_request("body is not valid JSON")
        if not isinstance(patch, dict) or not patch:
            return _bad_request("expected a non-empty JSON object of profile fields")

        def apply(engine):
            return engine.apply_profile_patch(patch), engine.profile.to_dict()

        try:
            profile = await asyncio.wrap_future(runtime.submit_routed(apply))
        except IllegalValue as exc:
            return _bad_request(str(exc))
        runtime.save_profile()
        return {"status": "ok", "profile": profile}

    @app.post("/api/feedback")
    async def post_feedback(request: Request):
        try:
            raw = json.loads(await request.body())
        except json.JSONDecodeError:
            return _bad_request("body is not valid JSON")
        if (
            not isinstance(raw, dict)
            or not isinstance(raw.get("message_id"), str)
            or not isinstance(raw.get("helpful"), bool)
        ):
            return _bad_request("expected {\"message_id\": str, \"helpful\": bool}")

        def apply(engine):
            emission = engine.apply_feedback(raw["message_id"], raw["helpful"])
            return emission, {"yes": engine.ledger.yes_count, "no": engine.ledger.no_count}

        try:
            counts = await asyncio.wrap_future(runtime.submit_routed(apply))
        except UnknownMessage:
            return JSONResponse({"status": "error", "detail": "unknown message"}, status_code=404)
        if runtime.store is not None and runtime.engine.ledger.entries:
            runtime.store.append_feedback(runtime.engine.ledger.entries[-1])
        return {"status": "ok", "feedback": counts}

    @app.get("/api/history")
    async def get_history(request: Request):
        raw_limit = request.query_params.get("limit", "50")
        try:
            limit = int(raw_limit)
        except ValueError:
            return _bad_request(f"limit must be an integer, got {raw_limit!r}")
        if limit < 0:
            return _bad_request("limit must be non-negative")
        entries = await asyncio.wrap_future(runtime.submit(lambda engine: engine.history_entries(limit)))
        return {"entries": entries}

    # -- UI bundle -------------------------------------------------------------------

    resolved_ui = Path(ui_dir) if ui_dir else None
    if resolved_ui is not None and resolved_ui.is_dir():
        app.mount("/", StaticFiles(directory=resolved_ui, html=True), name="ui")
    else:

        @app.get("/")
        async def index():
            return HTMLResponse(_FALLBACK_PAGE)

    return app
