from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from bikeguide.dialogue.agents import (PREDICTIVE, RESPONSIVE, AgentConfig,
                                       BehaviourTemplate)
from bikeguide.dialogue.utterances import UtteranceKind
from bikeguide.service.app import create_app
from bikeguide.service.clock import SystemClock, VirtualClock
from bikeguide.service.export import ExportError, episode_log
from bikeguide.service.replay import LogFormatError, parse_log, replay_log
from bikeguide.service.session import Session, SessionError
from bikeguide.service.protocol import ClientEvent
from bikeguide.sim.batch import _EpisodeRunner
from bikeguide.sim.user import UserConfig
from bikeguide.world.mapdoc import parse_map, serialize_map

from .test_dialogue import DUO_MAP


@pytest.fixture(scope="module")
def duo_spec():
    return parse_map(DUO_MAP)


def new_session(spec, kind=RESPONSIVE, template=None, start=True):
    clock = VirtualClock()
    config = AgentConfig(kind=kind) if template is None \
        else AgentConfig(kind=kind, template=template)
    session = Session("s1", spec, config, clock)
    if start:
        session.start()
    return session, clock


def event_for_subject(subject):
    name, _, rest = subject.partition("(")
    params = rest[:-1].split(",")
    if name == "move":
        return ClientEvent(type="move-to", landmark=params[1])
    return ClientEvent(type="pickup", bike=params[0])


def last_instruction(messages):
    for message in reversed(messages):
        if message.type == "utterance" \
                and message.utterance.kind == UtteranceKind.INSTRUCTION:
            return message
    raise AssertionError("no instruction in sight")


def drive_to_goal(session, clock, step_gap=1.0):
    messages = list(session.messages_after(-1))
    while not session.done:
        assert len(messages) < 400
        clock.advance(step_gap)
        event = event_for_subject(last_instruction(messages).utterance.subject)
        accepted, reason, fresh = session.handle_event(event)
        assert accepted, reason
        messages.extend(fresh)
    return messages


# --- clocks ---


def test_virtual_clock_only_moves_forward():
    clock = VirtualClock(5.0)
    assert clock.now() == 5.0
    assert clock.advance(1.5) == 6.5
    assert clock.set_time(8.0) == 8.0
    with pytest.raises(ValueError):
        clock.advance(-0.1)
    with pytest.raises(ValueError):
        clock.set_time(7.9)


def test_system_clock_is_monotonic():
    clock = SystemClock()
    assert clock.now() <= clock.now()


# --- timers ---


def test_patience_timer_fires_at_exactly_timer1(duo_spec):
    session, clock = new_session(duo_spec)
    clock.advance(1.9)
    assert session.tick() == []
    clock.advance(0.1)
    (message,) = session.tick()
    assert message.type == "utterance"
    assert message.utterance.kind == UtteranceKind.ELABORATION
    assert message.timestamp == 2.0


def test_timer_repeats_on_the_second_interval(duo_spec):
    session, clock = new_session(duo_spec)
    times = []
    for t in (2.0, 6.9, 7.0, 11.5, 12.0):
        clock.set_time(t)
        times.extend(m.timestamp for m in session.tick())
    assert times == [2.0, 7.0, 12.0]


def test_late_polls_stamp_the_deadline_not_the_poll(duo_spec):
    session, clock = new_session(duo_spec)
    clock.set_time(9.3)  # slept through two deadlines
    stamps = [m.timestamp for m in session.tick()]
    assert stamps == [2.0, 7.0]


def test_repeat_can_be_disabled(duo_spec):
    session, clock = new_session(
        duo_spec, template=BehaviourTemplate(repeat=False))
    clock.set_time(30.0)
    stamps = [m.timestamp for m in session.tick()]
    assert stamps == [2.0]


def test_events_flush_due_timers_first(duo_spec):
    session, clock = new_session(duo_spec)
    clock.set_time(12.0)
    instruction = last_instruction(session.messages_after(-1))
    accepted, _, messages = session.handle_event(
        event_for_subject(instruction.utterance.subject))
    assert accepted
    stamps = [m.timestamp for m in messages if m.type == "utterance"
              and m.utterance.kind == UtteranceKind.ELABORATION]
    assert stamps[:3] == [2.0, 7.0, 12.0]
    assert all(m.timestamp == 12.0 for m in messages[3:])


def test_action_rearms_the_patience_window(duo_spec):
    session, clock = new_session(duo_spec)
    clock.set_time(1.0)
    instruction = last_instruction(session.messages_after(-1))
    session.handle_event(
        event_for_subject(instruction.utterance.subject))
    clock.set_time(2.9)  # old deadline long gone, new one is 3.0
    assert session.tick() == []
    clock.set_time(3.0)
    fresh = session.tick()
    assert fresh and fresh[0].timestamp == 3.0


# --- session lifecycle and event handling ---


def test_start_emits_state_then_first_instruction(duo_spec):
    session, _ = new_session(duo_spec, start=False)
    messages = session.start()
    assert messages[0].type == "map-delta"
    assert messages[0].delta.location == "L1"
    assert not messages[0].delta.done
    assert last_instruction(messages).utterance.subject.startswith("move(L1,")


def test_lifecycle_guards(duo_spec):
    session, _ = new_session(duo_spec, start=False)
    with pytest.raises(SessionError):
        session.tick()
    with pytest.raises(SessionError):
        session.handle_event(ClientEvent(type="heartbeat"))
    session.start()
    with pytest.raises(SessionError):
        session.start()


def test_illegal_move_is_corrected_without_state_change(duo_spec):
    session, _ = new_session(duo_spec)
    accepted, reason, messages = session.handle_event(
        ClientEvent(type="move-to", landmark="L5"))
    assert not accepted
    assert "no road" in reason
    kinds = [m.utterance.kind for m in messages if m.type == "utterance"]
    assert kinds == [UtteranceKind.ACKNOWLEDGEMENT]
    deltas = [m for m in session.messages_after(-1) if m.type == "map-delta"]
    assert deltas[-1].delta.location == "L1"


def test_pickup_without_a_bike_is_rejected(duo_spec):
    session, _ = new_session(duo_spec)
    accepted, reason, _ = session.handle_event(ClientEvent(type="pickup"))
    assert not accepted and "no bike at L1" in reason
    accepted, reason, _ = session.handle_event(
        ClientEvent(type="pickup", bike="b1"))
    assert not accepted and "not at L1" in reason


def test_unnamed_pickup_takes_the_bike_present(duo_spec):
    session, clock = new_session(duo_spec)
    for landmark in ("L2", "L4", "L5"):
        clock.advance(1.0)
        accepted, reason, _ = session.handle_event(
            ClientEvent(type="move-to", landmark=landmark))
        assert accepted, reason
    clock.advance(1.0)
    accepted, reason, messages = session.handle_event(
        ClientEvent(type="pickup"))
    assert accepted, reason
    kinds = [m.utterance.kind for m in messages if m.type == "utterance"]
    assert UtteranceKind.ACKNOWLEDGEMENT in kinds
    deltas = [m for m in messages if m.type == "map-delta"]
    assert deltas[-1].delta.collected == ["b1"]


def test_heartbeat_only_flushes_timers(duo_spec):
    session, clock = new_session(duo_spec)
    before = len(session.messages_after(-1))
    accepted, reason, messages = session.handle_event(
        ClientEvent(type="heartbeat"))
    assert accepted and reason is None and messages == []
    assert len(session.messages_after(-1)) == before
    clock.set_time(2.0)
    _, _, messages = session.handle_event(ClientEvent(type="heartbeat"))
    assert [m.timestamp for m in messages] == [2.0]


def test_full_session_reaches_the_goal(duo_spec):
    session, clock = new_session(duo_spec)
    messages = drive_to_goal(session, clock)
    assert session.done
    assert messages[-1].type == "session-end"
    seqs = [m.seq for m in session.messages_after(-1)]
    assert seqs == list(range(len(seqs)))
    final_delta = [m for m in messages if m.type == "map-delta"][-1]
    assert final_delta.delta.done
    assert final_delta.delta.location == "L1"
    assert final_delta.delta.collected == ["b1"]


def test_events_after_the_end_are_rejected(duo_spec):
    session, clock = new_session(duo_spec)
    drive_to_goal(session, clock)
    accepted, reason, _ = session.handle_event(
        ClientEvent(type="move-to", landmark="L2"))
    assert not accepted and "over" in reason


def test_messages_after_cursor(duo_spec):
    session, clock = new_session(duo_spec)
    drive_to_goal(session, clock)
    everything = session.messages_after(-1)
    tail = session.messages_after(4)
    assert [m.seq for m in tail] == [m.seq for m in everything if m.seq > 4]


# --- log export and replay ---


def test_log_is_ndjson_with_meta_first(duo_spec):
    session, clock = new_session(duo_spec)
    drive_to_goal(session, clock)
    text = session.export_log()
    records = [json.loads(line) for line in text.strip().splitlines()]
    meta = records[0]
    assert meta["kind"] == "meta"
    assert meta["format"] == "bikeguide-log"
    assert meta["version"] == 1
    assert serialize_map(parse_map(meta["map"])) == serialize_map(duo_spec)
    kinds = {r["kind"] for r in records}
    assert {"meta", "server", "client", "sensing", "end"} <= kinds
    assert records[-1]["kind"] == "end"
    # optimistic detour through L4, then the bike, then home
    assert records[-1]["steps"] == 7


def test_replay_reproduces_a_live_session(duo_spec):
    session, clock = new_session(duo_spec, kind=PREDICTIVE)
    clock.set_time(7.5)  # let a couple of timers fire mid-session
    session.tick()
    drive_to_goal(session, clock, step_gap=2.5)
    report = replay_log(session.export_log())
    assert report.matched, report.summary()
    assert "reproduced exactly" in report.summary()


def test_replay_flags_a_tampered_log(duo_spec):
    session, clock = new_session(duo_spec)
    drive_to_goal(session, clock)
    text = session.export_log().replace("Go to the", "Run to the", 1)
    report = replay_log(text)
    assert not report.matched
    assert report.diffs
    assert "mismatch" in report.summary()


def test_log_parsing_diagnostics():
    with pytest.raises(LogFormatError, match="empty"):
        parse_log("")
    with pytest.raises(LogFormatError, match="meta"):
        parse_log('{"kind": "server"}\n')
    with pytest.raises(LogFormatError, match="line 1"):
        parse_log("not json\n")
    with pytest.raises(LogFormatError, match="version"):
        parse_log('{"kind": "meta", "format": "bikeguide-log", '
                  '"version": 99}\n')


def test_simulated_episodes_export_to_replayable_logs(duo_spec):
    # a batch trace and a live session share one log dialect
    for kind in (RESPONSIVE, PREDICTIVE):
        config = AgentConfig(kind=kind)
        runner = _EpisodeRunner(duo_spec, config, UserConfig(gamma=1.0))
        for episode in range(3):
            trace = runner.run(episode, master_seed=11)
            text = episode_log(duo_spec, config, trace)
            report = replay_log(text)
            assert report.matched, report.summary()
            logged = [json.loads(line) for line in text.strip().splitlines()]
            spoken = [r["utterance"]["text"] for r in logged
                      if r["kind"] == "server" and "utterance" in r]
            heard = [e.data["text"] for e in trace.utterances()]
            assert spoken == heard


def test_export_rejects_impossible_traces(duo_spec):
    config = AgentConfig(kind=RESPONSIVE)
    runner = _EpisodeRunner(duo_spec, config, UserConfig(gamma=1.0))
    trace = runner.run(0, master_seed=11)
    trace.actions()[0].data["action"] = "move(L1,L5)"  # teleport
    with pytest.raises(ExportError, match="rejected"):
        episode_log(duo_spec, config, trace)


# --- HTTP surface ---


@pytest.fixture()
def client(duo_spec):
    app = create_app(clock=VirtualClock(), extra_maps={"duo": duo_spec})
    with TestClient(app) as client:
        yield client


def test_map_listing_and_payload(client):
    names = [m["name"] for m in client.get("/api/maps").json()["maps"]]
    assert names == sorted(names)
    assert {"duo", "riverside", "harbour", "hillside", "oldtown"} <= set(names)
    payload = client.get("/api/maps/duo").json()
    assert payload["base"] == "L1"
    assert {lm["id"] for lm in payload["landmarks"]} == {
        "L1", "L2", "L3", "L4", "L5"}
    assert ["L4", "b1"] in payload["visibility"]
    assert client.get("/api/maps/atlantis").status_code == 404


def test_http_session_runs_to_completion(client):
    created = client.post("/api/sessions", json={
        "map": "duo", "agent": "predictive", "delta": 1}).json()
    sid = created["session_id"]
    assert created["base"] == "L1"
    messages = created["messages"]
    assert any(m["type"] == "utterance"
               and m["utterance"]["kind"] == UtteranceKind.PRE_TARGET
               for m in messages)
    for _ in range(60):
        subject = next(
            m["utterance"]["subject"] for m in reversed(messages)
            if m["type"] == "utterance"
            and m["utterance"]["kind"] == UtteranceKind.INSTRUCTION)
        event = event_for_subject(subject)
        body = event.model_dump(exclude_none=True)
        reply = client.post(f"/api/sessions/{sid}/events", json=body).json()
        assert reply["accepted"], reply["reason"]
        messages.extend(reply["messages"])
        if messages[-1]["type"] == "session-end":
            break
    poll = client.get(f"/api/sessions/{sid}/messages").json()
    assert poll["done"]
    assert [m["seq"] for m in poll["messages"]] == \
        list(range(len(poll["messages"])))
    log_text = client.get(f"/api/sessions/{sid}/log").text
    assert replay_log(log_text).matched


def test_http_rejects_unknown_resources(client):
    assert client.post("/api/sessions", json={"map": "nowhere"}) \
        .status_code == 404
    assert client.post("/api/sessions/zzz/events",
                       json={"type": "heartbeat"}).status_code == 404
    assert client.get("/api/sessions/zzz/messages").status_code == 404
    bad = client.post("/api/sessions", json={"map": "duo", "agent": "bossy"})
    assert bad.status_code == 422


def test_http_rejects_malformed_events(client):
    created = client.post("/api/sessions", json={"map": "duo"}).json()
    sid = created["session_id"]
    reply = client.post(f"/api/sessions/{sid}/events",
                        json={"type": "move-to"})
    assert reply.status_code == 422
    reply = client.post(f"/api/sessions/{sid}/events",
                        json={"type": "move-to", "landmark": "L5"})
    assert reply.status_code == 200
    assert not reply.json()["accepted"]


def test_log_times_are_relative_to_session_start(duo_spec):
    # a live clock has been running long before the session exists;
    # stamps must still count from start so the log replays as-is
    clock = VirtualClock(5000.0)
    session = Session("s1", duo_spec, AgentConfig(kind=RESPONSIVE), clock)
    session.start()
    assert [m.timestamp for m in session.messages_after(-1)] == [0.0, 0.0]
    clock.advance(1.0)
    messages = list(session.messages_after(-1))
    while not session.done:
        event = event_for_subject(
            last_instruction(messages).utterance.subject)
        _, _, messages = session.handle_event(event)
        clock.advance(1.0)
    log = session.export_log()
    stamps = [r["t"] for r in parse_log(log) if r["kind"] != "meta"]
    assert max(stamps) < 60.0
    assert replay_log(log).matched
