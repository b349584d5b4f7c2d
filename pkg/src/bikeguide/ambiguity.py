"""Ambiguous-instruction machinery: the similar relation, the cost
transform, and the inexplicability score used to compare plans.

Two moves are similar when they leave the same landmark and their
level-1 instructions render identically, i.e. the destinations share a
type ("Go to the House" fits both). Ambiguity is a static property of
the map, so the whole relation is precomputed once per compiled map.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Tuple

from . import domain
from .planning.model import GroundAction, Plan
from .world.model import MapSpec

DELTA_PRESETS = (Fraction(1), Fraction(2), Fraction(3))


@dataclass(frozen=True)
class AmbiguityCostConfig:
    delta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "delta", Fraction(self.delta))
        if self.delta <= 0:
            raise ValueError(f"delta must be positive, got {self.delta}")


class AmbiguityIndex:
    """Precomputed similar sets for every move action of one map."""

    def __init__(self, spec: MapSpec, actions: Iterable[GroundAction]):
        self._spec = spec
        self._similar: Dict[GroundAction, FrozenSet[GroundAction]] = {}
        moves = [a for a in actions if domain.is_move(a)]
        by_src: Dict[str, list] = {}
        for a in moves:
            by_src.setdefault(domain.move_src(a), []).append(a)
        for a in moves:
            dst_type = spec.landmark(domain.move_dst(a)).type
            self._similar[a] = frozenset(
                b for b in by_src[domain.move_src(a)]
                if b != a and spec.landmark(domain.move_dst(b)).type == dst_type)

    def similar_set(self, action: GroundAction) -> FrozenSet[GroundAction]:
        """{b : similar(action, b)}; empty for non-move actions."""
        return self._similar.get(action, frozenset())

    def similar_count(self, action: GroundAction) -> int:
        return len(self.similar_set(action))

    def is_ambiguous(self, action: GroundAction) -> bool:
        return bool(self.similar_set(action))

    def transform_cost(self, action: GroundAction,
                       config: AmbiguityCostConfig) -> Fraction:
        """cost'(a) = delta * |similar set| + cost(a)."""
        return config.delta * self.similar_count(action) + action.cost

    def cost_fn(self, config: AmbiguityCostConfig):
        """Cost model for search(); closes over the static similar sets."""
        def transformed(action: GroundAction) -> Fraction:
            return self.transform_cost(action, config)
        return transformed

    def inexplicability(self, plan) -> int:
        """U: the number of ambiguous instructions the plan would issue.

        Accepts a Plan or a bare sequence of actions.
        """
        actions = getattr(plan, "actions", plan)
        return sum(1 for a in actions if self.is_ambiguous(a))

    def less_explicable(self, p0, p1) -> bool:
        """p0 <_E p1: p0 needs strictly more explanations than p1."""
        return self.inexplicability(p0) > self.inexplicability(p1)

    def audit(self) -> str:
        """Readable dump of every nonempty similar set, for map debugging."""
        lines = []
        for a in sorted(self._similar, key=lambda x: x.sort_key):
            sims = self._similar[a]
            if not sims:
                continue
            rendered = ", ".join(
                f"{domain.MOVE}({domain.move_src(b)},{domain.move_dst(b)})"
                for b in sorted(sims, key=lambda x: x.sort_key))
            lines.append(
                f"{domain.MOVE}({domain.move_src(a)},{domain.move_dst(a)})"
                f" ~ {{{rendered}}}")
        return "\n".join(lines) + ("\n" if lines else "")
