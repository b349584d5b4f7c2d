"""The two instruction-giving agents.

The responsive agent reacts to hesitation with elaborations and
after-the-fact justifications. The predictive agent additionally plans
under the ambiguity-transformed cost model, announces upcoming targets
before instructions, and may hand initiative to the user when a visible
bike is one step away. Inefficiency is always judged under the plain
cost model regardless of how the plan was produced.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

from .. import domain
from ..ambiguity import AmbiguityCostConfig, AmbiguityIndex
from ..execution.belief import BeliefState
from ..execution.engine import EpisodeEngine, StepResult
from ..world.model import MapSpec
from .inefficiency import InefficiencyConfig, detect_local_inefficiency
from .targets import KNOWLEDGE, TargetDescriptor, extract_target
from .utterances import TemplateSet, Utterance, load_templates

RESPONSIVE = "responsive"
PREDICTIVE = "predictive"

_ORDINALS = ("first", "second", "third", "fourth", "fifth", "sixth",
             "seventh", "eighth", "ninth", "tenth")


def _ordinal(n: int) -> str:
    if 1 <= n <= len(_ORDINALS):
        return _ORDINALS[n - 1]
    return f"{n}th"


def action_ref(action) -> str:
    """Compact machine-readable action reference for logs and subjects."""
    return f"{action.name}({','.join(action.params)})"


@dataclass(frozen=True)
class BehaviourTemplate:
    """Timing and variant switches shared by both agents."""

    timer1: float = 2.0
    timer2: float = 5.0
    repeat: bool = True
    visited_variant: bool = True
    ack_on_pickup: bool = True

    def __post_init__(self):
        if self.timer1 <= 0 or self.timer2 <= 0:
            raise ValueError("timers must be strictly positive")


@dataclass(frozen=True)
class AgentConfig:
    kind: str = RESPONSIVE
    delta: Fraction = Fraction(1)  # predictive cost transform weight
    look_back: int = 2
    look_ahead: int = 2
    template: BehaviourTemplate = field(default_factory=BehaviourTemplate)

    def __post_init__(self):
        if self.kind not in (RESPONSIVE, PREDICTIVE):
            raise ValueError(f"unknown agent kind {self.kind!r}")
        object.__setattr__(self, "delta", Fraction(self.delta))


class TargetNamer:
    """Renders target descriptors using reported districts.

    Bikes without a district report fall back to their position in the
    map's bike list ("the third bike").
    """

    def __init__(self, spec: MapSpec):
        self._labels = {}
        for idx, bike in enumerate(spec.bikes, start=1):
            report = spec.report_for(bike.id)
            if report is not None:
                self._labels[bike.id] = report.district.capitalize()
            else:
                self._labels[bike.id] = _ordinal(idx)

    def bike_label(self, bike_id: str) -> str:
        return self._labels[bike_id]

    def render(self, templates: TemplateSet, target: TargetDescriptor,
               pre: bool) -> Utterance:
        prefix = "pretarget" if pre else "target"
        if target.kind == KNOWLEDGE:
            return templates.render(f"{prefix}.knowledge",
                                    subject=target.subject,
                                    label=self.bike_label(target.bike))
        if target.bike is not None:
            return templates.render(f"{prefix}.position.pickup",
                                    subject=target.subject,
                                    label=self.bike_label(target.bike))
        return templates.render(f"{prefix}.position.base",
                                subject=target.subject)


def ku_shortcut(spec: MapSpec, belief: BeliefState,
                pending) -> Optional[str]:
    """Bike id grabbable in one user step with user-only knowledge.

    True when a bike visible from the current landmark sits on an
    adjacent landmark, is uncollected, is not yet pinned down by the
    agent, and the pending instruction is not already heading there.
    """
    loc = belief.location
    for bike_id in sorted(spec.visible_bikes_from(loc)):
        if bike_id in belief.collected:
            continue
        if belief.located(bike_id) is not None:
            continue
        true_loc = spec.bike(bike_id).location
        if true_loc not in spec.neighbors(loc):
            continue
        if pending is not None and domain.is_move(pending) \
                and domain.move_dst(pending) == true_loc:
            continue
        return bike_id
    return None


_NO_TARGET_YET = object()


class ResponsiveAgent:
    """Behaviour description of the reactive instruction giver."""

    kind = RESPONSIVE

    def __init__(self, spec: MapSpec, index: AmbiguityIndex,
                 templates: Optional[TemplateSet] = None,
                 config: Optional[AgentConfig] = None,
                 shared_cache: Optional[dict] = None):
        self.config = config or AgentConfig(kind=self.kind)
        if self.config.kind != self.kind:
            raise ValueError(
                f"config is for a {self.config.kind} agent, not {self.kind}")
        self._spec = spec
        self._index = index
        self._templates = templates or load_templates()
        self._namer = TargetNamer(spec)
        self.inefficiency_config = InefficiencyConfig(
            look_back=self.config.look_back,
            look_ahead=self.config.look_ahead,
            cost_fn=None)
        cache = shared_cache if shared_cache is not None else {}
        self._ineff_flags = cache.setdefault("inefficiency_flags", {})
        self._ineff_segments = cache.setdefault("inefficiency_segments", {})

    @property
    def template(self) -> BehaviourTemplate:
        return self.config.template

    def planning_cost_fn(self):
        """Cost model handed to the episode engine (None = base costs)."""
        return None

    # --- dialogue actions ---

    def dialogue_action_1(self, engine: EpisodeEngine) -> Tuple[Utterance, ...]:
        pending = engine.pending()
        if pending is None:
            return ()
        return (self._instruction(pending, engine),)

    def dialogue_action_2(self, engine: EpisodeEngine) -> Tuple[Utterance, ...]:
        pending = engine.pending()
        if pending is None:
            return ()
        if self._is_ambiguous(pending):
            return (self._elaboration(pending),)
        out = []
        if self._locally_inefficient(engine):
            out.append(self._templates.render("inefficiency.responsive"))
        target = self._current_target(engine)
        if target is not None:
            out.append(self._namer.render(self._templates, target, pre=False))
        return tuple(out)

    def acknowledge(self, result: StepResult) -> Tuple[Utterance, ...]:
        out = []
        if domain.is_pickup(result.action) and self.template.ack_on_pickup:
            out.append(self._templates.render(
                "ack.pickup", subject=action_ref(result.action)))
        if result.done:
            out.append(self._templates.render("ack.done"))
        return tuple(out)

    def wrong_way_ack(self) -> Utterance:
        """Corrective line for a rejected user event."""
        return self._templates.render("ack.wrong_way")

    # --- shared helpers ---

    def _instruction(self, action, engine: EpisodeEngine) -> Utterance:
        if domain.is_move(action):
            dst = domain.move_dst(action)
            landmark = self._spec.landmark(dst)
            visited = self.template.visited_variant \
                and dst in engine.visited()
            name = "instruction.move.visited" if visited \
                else "instruction.move"
            return self._templates.render(
                name, subject=action_ref(action),
                type=landmark.type.capitalize())
        if domain.is_pickup(action):
            return self._templates.render(
                "instruction.pickup", subject=action_ref(action))
        raise LookupError(f"no instruction template for {action.name!r}")

    def _is_ambiguous(self, action) -> bool:
        return domain.is_move(action) and self._index.similar_count(action) >= 1

    def _elaboration(self, action) -> Utterance:
        landmark = self._spec.landmark(domain.move_dst(action))
        return self._templates.render(
            "elaboration.color", subject=action_ref(action),
            color=landmark.color.capitalize())

    def _current_target(self, engine: EpisodeEngine) -> Optional[TargetDescriptor]:
        epoch = engine.plan_epoch()
        if epoch is None or not engine.intention():
            return None
        return extract_target(engine.intention(), engine.belief(),
                              epoch.problem.goal)

    def _locally_inefficient(self, engine: EpisodeEngine) -> bool:
        epoch = engine.plan_epoch()
        if epoch is None:
            return False
        key = (epoch.belief_key, len(epoch.executed))
        if key not in self._ineff_flags:
            flag, _ = detect_local_inefficiency(
                epoch.executed, epoch.intention, self.inefficiency_config,
                epoch.problem, seg_cache=self._ineff_segments,
                cache_key=epoch.belief_key)
            self._ineff_flags[key] = flag
        return self._ineff_flags[key]


class PredictiveAgent(ResponsiveAgent):
    """Adds pre-announced targets, explicable planning, and initiative."""

    kind = PREDICTIVE

    def __init__(self, spec: MapSpec, index: AmbiguityIndex,
                 templates: Optional[TemplateSet] = None,
                 config: Optional[AgentConfig] = None,
                 shared_cache: Optional[dict] = None):
        super().__init__(spec, index, templates,
                         config or AgentConfig(kind=PREDICTIVE),
                         shared_cache)
        self.cost_config = AmbiguityCostConfig(delta=self.config.delta)
        self._plan_cost_fn = index.cost_fn(self.cost_config)
        self._last_target = _NO_TARGET_YET  # per-episode memory

    def planning_cost_fn(self):
        return self._plan_cost_fn

    def dialogue_action_1(self, engine: EpisodeEngine) -> Tuple[Utterance, ...]:
        pending = engine.pending()
        if pending is None:
            return ()
        target = self._current_target(engine)
        key = target.key if target is not None else None
        out = []
        if target is not None and key != self._last_target:
            out.append(self._namer.render(self._templates, target, pre=True))
        self._last_target = key
        out.append(self._instruction(pending, engine))
        return tuple(out)

    def dialogue_action_2(self, engine: EpisodeEngine) -> Tuple[Utterance, ...]:
        pending = engine.pending()
        if pending is None:
            return ()
        if self._is_ambiguous(pending):
            return (self._elaboration(pending),)
        out = []
        visible = ku_shortcut(self._spec, engine.belief(), pending)
        if visible is not None:
            out.append(self._templates.render(
                "initiative.offer", subject=f"bike:{visible}"))
        elif self._locally_inefficient(engine):
            out.append(self._templates.render("inefficiency.predictive"))
        target = self._current_target(engine)
        if target is not None:
            out.append(self._namer.render(self._templates, target, pre=False))
        return tuple(out)


def build_agent(config: AgentConfig, spec: MapSpec, index: AmbiguityIndex,
                templates: Optional[TemplateSet] = None,
                shared_cache: Optional[dict] = None):
    """Fresh agent instance for one episode or session."""
    cls = PredictiveAgent if config.kind == PREDICTIVE else ResponsiveAgent
    return cls(spec, index, templates=templates, config=config,
               shared_cache=shared_cache)
