"""Real-time session service: HTTP app, session state, replay."""

from .app import create_app
from .clock import SystemClock, VirtualClock
from .protocol import (
    ClientEvent,
    EventResponse,
    MapDelta,
    MessagesResponse,
    ServerMessage,
    SessionCreateRequest,
    SessionCreateResponse,
    UtterancePayload,
)
from .export import ExportError, episode_log
from .replay import LogFormatError, ReplayReport, parse_log, replay_log
from .session import LOG_FORMAT, LOG_VERSION, Session, SessionError

__all__ = [
    "create_app",
    "ExportError",
    "episode_log",
    "SystemClock",
    "VirtualClock",
    "ClientEvent",
    "EventResponse",
    "MapDelta",
    "MessagesResponse",
    "ServerMessage",
    "SessionCreateRequest",
    "SessionCreateResponse",
    "UtterancePayload",
    "LogFormatError",
    "ReplayReport",
    "parse_log",
    "replay_log",
    "LOG_FORMAT",
    "LOG_VERSION",
    "Session",
    "SessionError",
]
