"""One live session: engine + agent + timers + append-only log.

Timers are evaluated lazily against the injected clock: every request
(event, poll, tick) first fires any deadlines that have passed, stamped
with the exact deadline time rather than the observation time. That
keeps dialogue-action-2 at precisely +timer1, and repeats at +timer2
intervals, regardless of polling jitter.
"""

from __future__ import annotations

import json
import threading
from typing import List, Optional, Tuple

from .. import domain
from ..ambiguity import AmbiguityIndex
from ..dialogue.agents import AgentConfig, build_agent
from ..dialogue.utterances import TemplateSet, Utterance, load_templates
from ..execution.engine import EpisodeEngine
from ..world.compile import compile_map
from ..world.mapdoc import serialize_map
from ..world.model import MapSpec
from .protocol import (
    ClientEvent,
    MapDelta,
    ServerMessage,
    UtterancePayload,
)

LOG_FORMAT = "bikeguide-log"
LOG_VERSION = 1


class SessionError(RuntimeError):
    pass


class Session:
    """Thread-safe state machine behind one session id."""

    def __init__(self, session_id: str, spec: MapSpec,
                 agent_config: AgentConfig, clock,
                 templates: Optional[TemplateSet] = None):
        self.id = session_id
        self.spec = spec
        self.agent_config = agent_config
        self._clock = clock
        self._lock = threading.RLock()

        self._compiled = compile_map(spec)
        self._index = AmbiguityIndex(spec, self._compiled.problem.actions)
        self._agent = build_agent(agent_config, spec, self._index,
                                  templates=templates or load_templates())
        self._engine = EpisodeEngine(
            self._compiled.problem, self._compiled.sensing,
            self._compiled.initial_belief_for(),
            cost_fn=self._agent.planning_cost_fn())

        self._messages: List[ServerMessage] = []
        self._records: List[dict] = []
        self._stage: Optional[str] = None  # None | "timer1" | "timer2"
        self._deadline: Optional[float] = None
        self._epoch: Optional[float] = None
        self._started = False
        self._ended = False

        self._records.append({
            "kind": "meta",
            "format": LOG_FORMAT,
            "version": LOG_VERSION,
            "session": session_id,
            "map_name": spec.name,
            "map": serialize_map(spec),
            "agent": {"kind": agent_config.kind,
                      "delta": str(agent_config.delta)},
            "timers": {"timer1": self._agent.template.timer1,
                       "timer2": self._agent.template.timer2,
                       "repeat": self._agent.template.repeat},
        })

    # --- public API (each method takes the lock) ---

    @property
    def done(self) -> bool:
        with self._lock:
            return self._ended

    def start(self) -> List[ServerMessage]:
        with self._lock:
            if self._started:
                raise SessionError("session already started")
            self._started = True
            # log times are seconds since start, so a live log replays
            # under a virtual clock without rebasing
            self._epoch = self._clock.now()
            now = 0.0
            mark = len(self._messages)
            observations = self._engine.begin()
            self._log_observations(now, observations)
            self._emit_delta(now)
            self._emit_dialogue_1(now)
            return self._messages[mark:]

    def handle_event(self, event: ClientEvent
                     ) -> Tuple[bool, Optional[str], List[ServerMessage]]:
        """Apply one client event; returns (accepted, reason, new msgs)."""
        with self._lock:
            self._require_started()
            now = self._now()
            mark = len(self._messages)
            self._fire_due_timers(now)
            if event.type == "heartbeat":
                return True, None, self._messages[mark:]
            if event.type == "session-start":
                return False, "session already started", self._messages[mark:]
            if self._ended:
                return False, "session is over", self._messages[mark:]

            action, reason = self._resolve_action(event)
            self._records.append({
                "kind": "client", "t": now,
                "event": event.model_dump(exclude_none=True),
                "accepted": action is not None,
                **({"reason": reason} if reason else {}),
            })
            if action is None:
                # wrong way: no state advance, fresh patience window
                self._emit_utterances(now, (self._agent.wrong_way_ack(),))
                self._arm_timer1(now)
                return False, reason, self._messages[mark:]

            result = self._engine.apply_user_action(action)
            self._log_observations(now, result.observations)
            if result.replanned:
                self._records.append({"kind": "replan", "t": now})
            self._emit_utterances(now, self._agent.acknowledge(result))
            self._emit_delta(now)
            if result.done:
                self._end_session(now)
            else:
                self._emit_dialogue_1(now)
            return True, None, self._messages[mark:]

    def tick(self) -> List[ServerMessage]:
        """Fire any expired timers; called from polls or a driver loop."""
        with self._lock:
            self._require_started()
            mark = len(self._messages)
            self._fire_due_timers(self._now())
            return self._messages[mark:]

    def messages_after(self, after: int) -> List[ServerMessage]:
        with self._lock:
            return [m for m in self._messages if m.seq > after]

    def export_log(self) -> str:
        with self._lock:
            lines = [json.dumps(r, sort_keys=True) for r in self._records]
            return "\n".join(lines) + "\n"

    # --- internals (lock already held) ---

    def _require_started(self) -> None:
        if not self._started:
            raise SessionError("session not started")

    def _now(self) -> float:
        return self._clock.now() - self._epoch

    def _next_seq(self) -> int:
        return len(self._messages)

    def _emit(self, message: ServerMessage) -> None:
        self._messages.append(message)
        record = {"kind": "server", "t": message.timestamp,
                  "seq": message.seq, "type": message.type}
        if message.utterance is not None:
            record["utterance"] = message.utterance.model_dump()
        if message.delta is not None:
            record["delta"] = message.delta.model_dump()
        self._records.append(record)

    def _emit_utterances(self, t: float,
                         utterances: Tuple[Utterance, ...]) -> None:
        for u in utterances:
            self._emit(ServerMessage(
                seq=self._next_seq(), timestamp=t, type="utterance",
                utterance=UtterancePayload(kind=u.kind, text=u.text,
                                           subject=u.subject)))

    def _emit_delta(self, t: float) -> None:
        belief = self._engine.belief()
        self._emit(ServerMessage(
            seq=self._next_seq(), timestamp=t, type="map-delta",
            delta=MapDelta(location=belief.location,
                           collected=sorted(belief.collected),
                           done=self._engine.goal_reached())))

    def _emit_dialogue_1(self, t: float) -> None:
        self._emit_utterances(t, self._agent.dialogue_action_1(self._engine))
        self._arm_timer1(t)

    def _arm_timer1(self, t: float) -> None:
        self._stage = "timer1"
        self._deadline = t + self._agent.template.timer1

    def _log_observations(self, t: float, observations) -> None:
        if not observations:
            return
        self._records.append({
            "kind": "sensing", "t": t,
            "observations": [[str(fluent), bool(value)]
                             for fluent, value in observations],
        })

    def _fire_due_timers(self, now: float) -> None:
        while self._stage is not None and self._deadline is not None \
                and self._deadline <= now and not self._ended:
            at = self._deadline
            utterances = self._agent.dialogue_action_2(self._engine)
            if not utterances:
                self._stage = None
                self._deadline = None
                return
            self._emit_utterances(at, utterances)
            if self._agent.template.repeat:
                self._stage = "timer2"
                self._deadline = at + self._agent.template.timer2
            else:
                self._stage = None
                self._deadline = None

    def _end_session(self, t: float) -> None:
        self._ended = True
        self._stage = None
        self._deadline = None
        self._emit(ServerMessage(seq=self._next_seq(), timestamp=t,
                                 type="session-end"))
        self._records.append({
            "kind": "end", "t": t,
            "steps": len(self._engine.history()),
            "replans": self._engine.replans,
        })

    def _resolve_action(self, event: ClientEvent):
        """Map a client event to a ground action, or (None, why-not)."""
        here = self._engine.belief().location
        if event.type == "move-to":
            try:
                action = self._compiled.move(here, event.landmark)
            except KeyError:
                return None, f"no road from {here} to {event.landmark}"
            return action, None
        # pickup: the bike must actually be here
        true_state = self._engine.true_state()
        present = sorted(
            b.id for b in self.spec.bikes
            if domain.bike_at(b.id, here) in true_state)
        if event.bike is not None:
            if event.bike not in present:
                return None, f"bike {event.bike} is not at {here}"
            chosen = event.bike
        elif present:
            chosen = present[0]
        else:
            return None, f"no bike at {here}"
        for a in self._compiled.problem.actions:
            if domain.is_pickup(a) and a.params == (chosen, here):
                return a, None
        return None, f"no pickup action for {chosen} at {here}"
