"""Re-derive a session's utterances from its exported log.

The log embeds everything a session needs (map text, agent config,
timers), so replay rebuilds the session under a virtual clock, feeds
the client events at their logged times, ticks at each logged server
timestamp, and diffs the regenerated server messages against the log.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from ..dialogue.agents import AgentConfig, BehaviourTemplate
from ..world.mapdoc import parse_map
from .clock import VirtualClock
from .protocol import ClientEvent
from .session import LOG_FORMAT, LOG_VERSION, Session


class LogFormatError(ValueError):
    pass


@dataclass
class ReplayReport:
    matched: bool
    expected: List[dict] = field(default_factory=list)
    actual: List[dict] = field(default_factory=list)
    diffs: List[str] = field(default_factory=list)

    def summary(self) -> str:
        if self.matched:
            return (f"replay matched: {len(self.actual)} server messages "
                    f"reproduced exactly")
        lines = [f"replay mismatch: {len(self.diffs)} differences"]
        lines.extend(self.diffs[:20])
        if len(self.diffs) > 20:
            lines.append(f"... and {len(self.diffs) - 20} more")
        return "\n".join(lines)


def parse_log(text: str) -> List[dict]:
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise LogFormatError(f"line {lineno}: {exc}") from None
    if not records:
        raise LogFormatError("empty log")
    meta = records[0]
    if meta.get("kind") != "meta" or meta.get("format") != LOG_FORMAT:
        raise LogFormatError("first record must be the meta record")
    if meta.get("version") != LOG_VERSION:
        raise LogFormatError(f"unsupported log version {meta.get('version')}")
    return records


def _message_view(message_dict: dict) -> dict:
    """The comparable projection of a server record or message."""
    view = {"seq": message_dict["seq"], "t": message_dict["t"],
            "type": message_dict["type"]}
    if "utterance" in message_dict and message_dict["utterance"] is not None:
        u = message_dict["utterance"]
        view["utterance"] = {"kind": u["kind"], "text": u["text"],
                             "subject": u.get("subject")}
    if "delta" in message_dict and message_dict["delta"] is not None:
        view["delta"] = message_dict["delta"]
    return view


def replay_log(text: str) -> ReplayReport:
    records = parse_log(text)
    meta = records[0]
    spec = parse_map(meta["map"])
    timers = meta["timers"]
    config = AgentConfig(
        kind=meta["agent"]["kind"],
        delta=Fraction(meta["agent"]["delta"]),
        template=BehaviourTemplate(timer1=timers["timer1"],
                                   timer2=timers["timer2"],
                                   repeat=timers["repeat"]))

    clock = VirtualClock(0.0)
    session = Session(meta["session"], spec, config, clock)
    session.start()

    expected = [_message_view(r) for r in records if r["kind"] == "server"]
    for record in records[1:]:
        if record["kind"] == "server":
            if record["t"] > clock.now():
                clock.set_time(record["t"])
            session.tick()
        elif record["kind"] == "client":
            if record["t"] > clock.now():
                clock.set_time(record["t"])
            session.handle_event(ClientEvent(**record["event"]))

    actual = []
    for message in session.messages_after(-1):
        dumped = message.model_dump(exclude_none=True)
        dumped["t"] = dumped.pop("timestamp")
        actual.append(_message_view(dumped))

    diffs = []
    for i in range(max(len(expected), len(actual))):
        want = expected[i] if i < len(expected) else None
        got = actual[i] if i < len(actual) else None
        if want != got:
            diffs.append(f"message {i}: logged={want!r} replayed={got!r}")
    return ReplayReport(matched=not diffs, expected=expected,
                        actual=actual, diffs=diffs)
