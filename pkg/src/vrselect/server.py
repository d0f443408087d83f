"""HTTP and websocket surface over sessions.

Every mutation goes through a per-session lock and fans out one StateDelta
to every subscriber, in commit order. Payloads are plain JSON objects with
a "v": 1 schema version.
"""

from __future__ import annotations

import queue
import threading
from pathlib import Path
from typing import Any, Optional

import anyio
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import harness
from .nlu import Lexicon
from .scene import ColorKind, PerplexityLevel, Ray, ShapeKind, serialize_scene
from .session import (
    BadParams,
    IllegalPhase,
    NoSuchSession,
    Session,
    SessionError,
    StateDelta,
    TrialNotActive,
    WrongTechnique,
    make_adhoc_session,
    make_plan_session,
)

_ERROR_STATUS = {
    NoSuchSession: 404,
    BadParams: 422,
    WrongTechnique: 409,
    TrialNotActive: 409,
    IllegalPhase: 409,
}


class SessionHub:
    """Registry of live sessions with per-session command serialization."""

    def __init__(self, lexicon: Optional[Lexicon] = None):
        self.lexicon = lexicon
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._subscribers: dict[str, list[queue.Queue]] = {}
        self._registry_lock = threading.Lock()

    def add(self, session: Session) -> Session:
        with self._registry_lock:
            self._sessions[session.id] = session
            self._locks[session.id] = threading.Lock()
            self._subscribers[session.id] = []
        return session

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise NoSuchSession(session_id)
        return session

    def mutate(self, session_id: str, fn) -> StateDelta:
        """Run one mutation under the session lock and broadcast its delta."""
        session = self.get(session_id)
        with self._locks[session_id]:
            delta = fn(session)
            for q in self._subscribers[session_id]:
                q.put(delta)
        return delta

    def subscribe(self, session_id: str) -> tuple[queue.Queue, StateDelta]:
        session = self.get(session_id)
        with self._locks[session_id]:
            q: queue.Queue = queue.Queue()
            self._subscribers[session_id].append(q)
            return q, session.snapshot_delta()

    def unsubscribe(self, session_id: str, q: queue.Queue) -> None:
        subs = self._subscribers.get(session_id)
        if subs and q in subs:
            subs.remove(q)


class CreateSessionBody(BaseModel):
    technique: str = "assistvr"
    mode: str = "adhoc"  # adhoc | plan
    level: str = "low"
    num_targets: int = 1
    seed: int = 0
    target_shape: str = ""
    target_color: str = ""
    participant: str = ""
    order_index: int = 0


class UtteranceBody(BaseModel):
    text: str


class RayBody(BaseModel):
    origin: list[float]
    direction: list[float]


class MapPickBody(BaseModel):
    point: list[float]


class AimBody(BaseModel):
    origin: list[float]
    direction: list[float]
    half_angle: float = 0.0


def create_app(lexicon: Optional[Lexicon] = None, static_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="vrselect", version="0.1.0")
    hub = SessionHub(lexicon=lexicon)
    app.state.hub = hub

    @app.exception_handler(SessionError)
    async def session_error_handler(request, exc: SessionError):
        status = _ERROR_STATUS.get(type(exc), 400)
        return JSONResponse(
            status_code=status,
            content={"v": 1, "error": type(exc).__name__, "detail": str(exc)},
        )

    @app.post("/sessions")
    def create_session(body: CreateSessionBody) -> dict[str, Any]:
        try:
            technique = harness.Technique(body.technique.lower())
        except ValueError:
            raise BadParams(f"unknown technique {body.technique!r}")
        if body.mode == "plan":
            plan = harness.build_plan(body.participant or "anon", body.order_index)
            session = make_plan_session(plan, lexicon=hub.lexicon)
        elif body.mode == "adhoc":
            try:
                level = PerplexityLevel(body.level.lower())
            except ValueError:
                raise BadParams(f"unknown level {body.level!r}")
            if body.num_targets not in (1, 2, 4):
                raise BadParams("num_targets must be 1, 2, or 4")
            override = None
            if body.target_shape or body.target_color:
                try:
                    override = (ShapeKind(body.target_shape), ColorKind(body.target_color))
                except ValueError:
                    raise BadParams("target override must name a shape and color token")
            try:
                session = make_adhoc_session(
                    technique, level, body.num_targets, body.seed, override, hub.lexicon
                )
            except ValueError as err:
                raise BadParams(str(err))
        else:
            raise BadParams(f"unknown mode {body.mode!r}")
        hub.add(session)
        return {
            "v": 1,
            "id": session.id,
            "technique": session.technique.value,
            "mode": "plan" if session.plan else "adhoc",
            "num_objects": len(session.scene.objects),
            "trial": session.trial_status().phase.value,
        }

    @app.get("/sessions/{session_id}/scene")
    def get_scene(session_id: str) -> dict[str, Any]:
        return hub.get(session_id).scene_payload()

    @app.get("/sessions/{session_id}/scene.txt", response_class=PlainTextResponse)
    def get_scene_text(session_id: str) -> str:
        return serialize_scene(hub.get(session_id).scene)

    @app.post("/sessions/{session_id}/utterance")
    def post_utterance(session_id: str, body: UtteranceBody) -> dict[str, Any]:
        delta = hub.mutate(session_id, lambda s: s.submit_utterance(body.text))
        return delta.to_payload()

    @app.post("/sessions/{session_id}/ray")
    def post_ray(session_id: str, body: RayBody) -> dict[str, Any]:
        if len(body.origin) != 3 or len(body.direction) != 3:
            raise BadParams("origin and direction must be 3-vectors")
        try:
            ray = Ray(tuple(body.origin), tuple(body.direction))
        except ValueError as err:
            raise BadParams(str(err))
        delta = hub.mutate(session_id, lambda s: s.submit_ray(ray))
        return delta.to_payload()

    @app.post("/sessions/{session_id}/map-pick")
    def post_map_pick(session_id: str, body: MapPickBody) -> dict[str, Any]:
        if len(body.point) != 2:
            raise BadParams("point must be a 2-vector")
        delta = hub.mutate(
            session_id, lambda s: s.submit_map_pick((body.point[0], body.point[1]))
        )
        return delta.to_payload()

    @app.post("/sessions/{session_id}/minimap")
    def post_minimap(session_id: str, body: AimBody) -> dict[str, Any]:
        if len(body.origin) != 3 or len(body.direction) != 3:
            raise BadParams("origin and direction must be 3-vectors")
        hub.mutate(
            session_id,
            lambda s: s.aim_minimap(
                tuple(body.origin), tuple(body.direction), body.half_angle or None
            ),
        )
        return hub.get(session_id).minimap_payload()

    @app.get("/sessions/{session_id}/minimap")
    def get_minimap(session_id: str) -> dict[str, Any]:
        return hub.get(session_id).minimap_payload()

    @app.post("/sessions/{session_id}/trial/{verb}")
    def post_trial(session_id: str, verb: str) -> dict[str, Any]:
        delta = hub.mutate(session_id, lambda s: s.trial_control(verb))
        return delta.to_payload()

    @app.get("/sessions/{session_id}/records", response_class=PlainTextResponse)
    def get_records(session_id: str) -> str:
        return harness.serialize_records(hub.get(session_id).records)

    @app.websocket("/sessions/{session_id}/stream")
    async def stream(websocket: WebSocket, session_id: str) -> None:
        await websocket.accept()
        try:
            q, snapshot = hub.subscribe(session_id)
        except NoSuchSession:
            await websocket.close(code=4404)
            return
        closed = anyio.Event()

        async def receiver() -> None:
            # Client messages are ignored; this loop exists to observe the
            # disconnect, which starlette only reports through receive().
            try:
                while True:
                    await websocket.receive_text()
            except (WebSocketDisconnect, RuntimeError):
                closed.set()

        try:
            async with anyio.create_task_group() as tg:
                tg.start_soon(receiver)
                await websocket.send_json(snapshot.to_payload())
                while not closed.is_set():
                    try:
                        delta = await anyio.to_thread.run_sync(
                            lambda: q.get(timeout=0.2), abandon_on_cancel=True
                        )
                    except queue.Empty:
                        continue
                    await websocket.send_json(delta.to_payload())
                tg.cancel_scope.cancel()
        except WebSocketDisconnect:
            pass
        finally:
            hub.unsubscribe(session_id, q)

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
