"""One simulated episode on a logical clock.

The driver walks the behaviour template: dialogue action 1, an optional
hesitation window ending in dialogue action 2, then the user's action.
Every utterance, action, observation, and replan lands in the trace
with its logical timestamp.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .. import domain
from ..ambiguity import AmbiguityIndex
from ..dialogue.agents import action_ref
from ..dialogue.utterances import Utterance, UtteranceKind
from ..execution.engine import EpisodeEngine, StepResult
from .user import SimulatedUser


@dataclass(frozen=True)
class TraceEvent:
    time: float
    kind: str  # begin | utterance | action | sensing | replan | end
    data: Dict

    def to_dict(self) -> Dict:
        return {"time": self.time, "kind": self.kind, **self.data}


@dataclass
class EpisodeTrace:
    map_name: str
    agent_kind: str
    seed: int
    events: List[TraceEvent] = field(default_factory=list)

    def utterances(self, kind: Optional[str] = None) -> List[TraceEvent]:
        out = [e for e in self.events if e.kind == "utterance"]
        if kind is not None:
            out = [e for e in out if e.data["utterance_kind"] == kind]
        return out

    def actions(self) -> List[TraceEvent]:
        return [e for e in self.events if e.kind == "action"]


class EpisodeOverrunError(RuntimeError):
    """The episode exceeded the step budget without reaching the goal."""


def _log_utterances(trace: EpisodeTrace, time: float, slot: str,
                    utterances: Tuple[Utterance, ...]) -> None:
    for u in utterances:
        trace.events.append(TraceEvent(time, "utterance", {
            "slot": slot,
            "utterance_kind": u.kind,
            "text": u.text,
            "subject": u.subject,
        }))


def run_episode(engine: EpisodeEngine, agent, user: SimulatedUser,
                index: AmbiguityIndex, map_name: str, seed: int,
                max_steps: int = 600) -> EpisodeTrace:
    """Drive the engine with the agent and simulated user until the goal."""
    trace = EpisodeTrace(map_name=map_name, agent_kind=agent.kind, seed=seed)
    clock = 0.0
    observations = engine.begin()
    trace.events.append(TraceEvent(clock, "begin", {
        "map": map_name,
        "agent": agent.kind,
        "seed": seed,
        "location": engine.belief().location,
    }))
    for fluent, value in observations:
        trace.events.append(TraceEvent(clock, "sensing", {
            "fluent": str(fluent), "value": value}))

    steps = 0
    while not engine.goal_reached():
        if steps >= max_steps:
            raise EpisodeOverrunError(
                f"{map_name}: no goal after {max_steps} steps")
        steps += 1

        pending = engine.pending()
        da1 = agent.dialogue_action_1(engine)
        _log_utterances(trace, clock, "da1", da1)

        ambiguous = domain.is_move(pending) \
            and index.similar_count(pending) >= 1
        narrowed = False
        if user.hesitates(ambiguous):
            clock += agent.template.timer1
            da2 = agent.dialogue_action_2(engine)
            _log_utterances(trace, clock, "da2", da2)
            narrowed = any(u.kind == UtteranceKind.ELABORATION for u in da2)

        if ambiguous and not narrowed:
            compatible = [pending] + sorted(
                index.similar_set(pending), key=lambda a: a.sort_key)
        else:
            compatible = [pending]
        action, complied = user.choose_action(
            compatible, engine.applicable_user_actions())

        clock += user.config.act_delay
        result: StepResult = engine.apply_user_action(action)
        trace.events.append(TraceEvent(clock, "action", {
            "action": action_ref(action),
            "move": domain.is_move(action),
            "pickup": domain.is_pickup(action),
            "complied": complied,
            "deviated": result.deviated,
            "similar_count": index.similar_count(action)
            if domain.is_move(action) else 0,
        }))
        for fluent, value in result.observations:
            trace.events.append(TraceEvent(clock, "sensing", {
                "fluent": str(fluent), "value": value}))
        if result.replanned:
            trace.events.append(TraceEvent(clock, "replan", {
                "after": action_ref(action)}))
        _log_utterances(trace, clock, "ack", agent.acknowledge(result))

    trace.events.append(TraceEvent(clock, "end", {
        "goal_reached": True,
        "steps": steps,
        "replans": engine.replans,
    }))
    return trace
