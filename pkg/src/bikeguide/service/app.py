"""HTTP surface over sessions.

Timers are poll-driven: every request against a session first fires any
deadlines that already passed, stamped at the exact deadline. A client
polling at any cadence therefore sees dialogue-action-2 messages
timestamped at +timer1 (and repeats at +timer2 steps), never at the
poll time.
"""

from __future__ import annotations

import asyncio
import json
import uuid
from fractions import Fraction
from pathlib import Path
from typing import Dict, Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles

from ..dialogue.agents import AgentConfig, BehaviourTemplate
from ..world.bundled import bundled_map_names, load_bundled_map
from .clock import SystemClock
from .protocol import (
    ClientEvent,
    EventResponse,
    MessagesResponse,
    SessionCreateRequest,
    SessionCreateResponse,
)
from .session import Session


def _map_payload(spec) -> dict:
    return {
        "name": spec.name,
        "base": spec.base,
        "landmarks": [
            {"id": lm.id, "type": lm.type, "color": lm.color,
             "x": lm.x, "y": lm.y, "district": lm.district}
            for lm in spec.landmarks
        ],
        "roads": [[a, b] for a, b in spec.roads],
        "bikes": [{"id": b.id, "location": b.location} for b in spec.bikes],
        "reports": [{"bike": r.bike, "district": r.district}
                    for r in spec.reports],
        "visibility": [[lm, bike] for lm, bike in spec.visibility],
    }


def create_app(clock=None, frontend_dir: Optional[str] = None,
               extra_maps: Optional[Dict] = None,
               agent_defaults: Optional[dict] = None) -> FastAPI:
    """Build the service; pass a VirtualClock to control time in tests.

    extra_maps (name -> MapSpec) shadow bundled maps of the same name;
    agent_defaults may carry template knobs (timer1, timer2, repeat,
    visited_variant, ack_on_pickup) and look_back / look_ahead applied
    to every session.
    """
    clock = clock or SystemClock()
    extra_maps = dict(extra_maps or {})
    defaults = dict(agent_defaults or {})
    template_keys = ("timer1", "timer2", "repeat",
                     "visited_variant", "ack_on_pickup")
    template = BehaviourTemplate(
        **{k: defaults[k] for k in template_keys if k in defaults})
    app = FastAPI(title="bikeguide session service")
    sessions: Dict[str, Session] = {}

    def _map_names():
        return sorted(set(bundled_map_names()) | set(extra_maps))

    def _load_map(name: str):
        if name in extra_maps:
            return extra_maps[name]
        return load_bundled_map(name)

    def _session(sid: str) -> Session:
        try:
            return sessions[sid]
        except KeyError:
            raise HTTPException(status_code=404,
                                detail=f"no session {sid}") from None

    @app.get("/api/maps")
    def list_maps():
        out = []
        for name in _map_names():
            spec = _load_map(name)
            out.append({"name": name, "landmarks": len(spec.landmarks),
                        "bikes": len(spec.bikes), "base": spec.base})
        return {"maps": out}

    @app.get("/api/maps/{name}")
    def get_map(name: str):
        try:
            return _map_payload(_load_map(name))
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None

    @app.post("/api/sessions", response_model=SessionCreateResponse)
    def create_session(request: SessionCreateRequest):
        try:
            spec = _load_map(request.map)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        config = AgentConfig(
            kind=request.agent, delta=Fraction(request.delta),
            look_back=defaults.get("look_back", 2),
            look_ahead=defaults.get("look_ahead", 2),
            template=template)
        sid = uuid.uuid4().hex[:12]
        session = Session(sid, spec, config, clock)
        sessions[sid] = session
        messages = session.start()
        return SessionCreateResponse(
            session_id=sid, map=spec.name, agent=config.kind,
            base=spec.base, messages=messages)

    @app.post("/api/sessions/{sid}/events", response_model=EventResponse)
    def submit_event(sid: str, event: ClientEvent):
        session = _session(sid)
        accepted, reason, messages = session.handle_event(event)
        return EventResponse(accepted=accepted, reason=reason,
                             messages=messages)

    @app.get("/api/sessions/{sid}/messages", response_model=MessagesResponse)
    def poll_messages(sid: str, after: int = -1):
        session = _session(sid)
        session.tick()
        return MessagesResponse(messages=session.messages_after(after),
                                done=session.done)

    @app.get("/api/sessions/{sid}/log", response_class=PlainTextResponse)
    def get_log(sid: str):
        return _session(sid).export_log()

    @app.get("/api/sessions/{sid}/stream")
    async def stream_messages(sid: str, after: int = -1):
        session = _session(sid)

        async def generate():
            cursor = after
            while True:
                session.tick()
                for message in session.messages_after(cursor):
                    cursor = message.seq
                    payload = json.dumps(message.model_dump(exclude_none=True))
                    yield f"data: {payload}\n\n"
                if session.done:
                    yield "event: end\ndata: {}\n\n"
                    return
                await asyncio.sleep(0.25)

        return StreamingResponse(generate(), media_type="text/event-stream")

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=frontend_dir, html=True),
                  name="frontend")

    return app
