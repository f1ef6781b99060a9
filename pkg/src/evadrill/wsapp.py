"""WebSocket adapter exposing DrillSession over one JSON frame per message.

The adapter owns no simulation logic: it queues client frames into the
session, paces the authoritative 20 Hz loop, and forwards the session's
outbound messages. `time_scale` only changes wall-clock pacing (for
development and tests); simulated time is always tick-exact.
"""

from __future__ import annotations

import asyncio
import logging
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .dynamics import DynamicsParams
from .floorplan import FloorPlan
from .navgrid import build_nav_grid
from .session import TICK_DT, DrillSession, SessionRegistry, create_session

log = logging.getLogger(__name__)


def create_app(plan: FloorPlan, params: DynamicsParams | None = None,
               log_dir: str | Path | None = None,
               ui_dir: str | Path | None = None,
               time_scale: float = 1.0,
               cell_size: float = 0.5) -> FastAPI:
    app = FastAPI(title="evadrill", docs_url=None, redoc_url=None)
    registry_path = (Path(log_dir) / "subjects.json"
                     if log_dir is not None else None)
    registry = SessionRegistry(registry_path)
    grid = build_nav_grid(plan, cell_size)
    app.state.registry = registry
    app.state.plan = plan

    @app.get("/healthz")
    async def healthz():
        return {"ok": True, "plan": plan.name, "digest": plan.digest()}

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        session: DrillSession | None = None
        subject_id: str | None = None
        sealed = False
        recv_task: asyncio.Task | None = None
        try:
            hello = await ws.receive_json()
            if hello.get("type") != "hello" or "subject_id" not in hello:
                await ws.send_json({"type": "error",
                                    "reason": "expected hello"})
                await ws.close()
                return
            subject_id = str(hello["subject_id"])
            session = create_session(registry, subject_id, plan,
                                     params=params, grid=grid)
            if session is None:
                await ws.send_json({"type": "rejected",
                                    "reason": "already played"})
                await ws.close()
                return
            await ws.send_json(session.welcome())

            interval = TICK_DT / max(time_scale, 1e-6)
            recv_task = asyncio.create_task(ws.receive_json())
            loop = asyncio.get_event_loop()
            next_tick = loop.time() + interval
            while True:
                timeout = max(0.0, next_tick - loop.time())
                done, _ = await asyncio.wait({recv_task}, timeout=timeout)
                if done:
                    try:
                        frame = recv_task.result()
                    except WebSocketDisconnect:
                        raise
                    _apply_frame(session, frame)
                    if (frame.get("type") == "post_questionnaire"
                            and session.finished):
                        path = session.seal(frame.get("answers") or {},
                                            log_dir)
                        registry.complete(subject_id, session.session_id)
                        sealed = True
                        await ws.send_json({
                            "type": "sealed",
                            "session_id": session.session_id,
                            "path": str(path) if path else None})
                        await ws.close()
                        return
                    recv_task = asyncio.create_task(ws.receive_json())
                    continue
                next_tick += interval
                for msg in session.tick():
                    await ws.send_json(msg)
        except WebSocketDisconnect:
            pass
        finally:
            if recv_task is not None and not recv_task.done():
                recv_task.cancel()
            if session is not None and not sealed:
                # connection lost before the questionnaire sealed the log
                if session.finished:
                    session.seal({}, log_dir)
                    registry.complete(subject_id, session.session_id)
                else:
                    registry.abort(subject_id)

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True),
                  name="ui")
    return app


def _apply_frame(session: DrillSession, frame: dict) -> None:
    kind = frame.get("type")
    if kind == "input":
        session.queue_input(frame)
    elif kind == "answer":
        session.queue_answer(str(frame.get("choice")))
    elif kind == "post_questionnaire":
        pass
    else:
        log.warning("unknown frame type %r ignored", kind)
