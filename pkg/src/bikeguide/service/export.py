"""Export a simulated episode in the session log format.

A batch episode and a live session share the same dialogue logic and
the same timer arithmetic, so an episode trace can be turned into a
session log by re-driving its recorded actions through a Session on a
virtual clock at the recorded times. The result is accepted by the
same replay tooling as a live export.
"""

from __future__ import annotations

from ..dialogue.agents import AgentConfig
from ..world.model import MapSpec
from .clock import VirtualClock
from .protocol import ClientEvent
from .session import Session


class ExportError(RuntimeError):
    pass


def _event_for(ref: str) -> ClientEvent:
    name, _, rest = ref.partition("(")
    params = rest[:-1].split(",") if rest else []
    if name == "move":
        return ClientEvent(type="move-to", landmark=params[1])
    if name == "pickup":
        return ClientEvent(type="pickup", bike=params[0])
    raise ExportError(f"trace contains a non-executable action: {ref}")


def episode_log(spec: MapSpec, agent_config: AgentConfig, trace) -> str:
    """Render an episode trace as a session log document."""
    clock = VirtualClock()
    session_id = f"sim-{trace.map_name}-{trace.agent_kind}-{trace.seed}"
    session = Session(session_id, spec, agent_config, clock)
    session.start()
    for event in trace.actions():
        # timers due before this action fire on their own inside
        # handle_event, stamped at their exact deadlines
        clock.set_time(event.time)
        accepted, reason, _ = session.handle_event(_event_for(event.data["action"]))
        if not accepted:
            raise ExportError(
                f"trace action rejected at t={event.time}: {reason}")
    if not session.done:
        raise ExportError("trace ended before the goal was reached")
    return session.export_log()
