"""Wire types for live sessions.

Server messages carry a per-session sequence number that increases by
exactly one per message, so clients can poll with `after` cursors and
replays can assert nothing was lost or reordered.
"""

from __future__ import annotations

from typing import List, Literal, Optional

from pydantic import BaseModel, Field, model_validator


class UtterancePayload(BaseModel):
    kind: str
    text: str
    subject: Optional[str] = None


class MapDelta(BaseModel):
    location: str
    collected: List[str]
    done: bool


class ServerMessage(BaseModel):
    seq: int = Field(ge=0)
    timestamp: float
    type: Literal["utterance", "map-delta", "session-end"]
    utterance: Optional[UtterancePayload] = None
    delta: Optional[MapDelta] = None

    @model_validator(mode="after")
    def _payload_matches_type(self):
        if self.type == "utterance" and self.utterance is None:
            raise ValueError("utterance message without utterance payload")
        if self.type == "map-delta" and self.delta is None:
            raise ValueError("map-delta message without delta payload")
        return self


class ClientEvent(BaseModel):
    type: Literal["session-start", "move-to", "pickup", "heartbeat"]
    landmark: Optional[str] = None
    bike: Optional[str] = None

    @model_validator(mode="after")
    def _fields_match_type(self):
        if self.type == "move-to" and not self.landmark:
            raise ValueError("move-to event needs a landmark")
        return self


class SessionCreateRequest(BaseModel):
    map: str  # bundled map name
    agent: Literal["responsive", "predictive"] = "responsive"
    delta: int = 1  # predictive cost transform weight


class SessionCreateResponse(BaseModel):
    session_id: str
    map: str
    agent: str
    base: str
    messages: List[ServerMessage]


class EventResponse(BaseModel):
    accepted: bool
    reason: Optional[str] = None
    messages: List[ServerMessage]


class MessagesResponse(BaseModel):
    messages: List[ServerMessage]
    done: bool
