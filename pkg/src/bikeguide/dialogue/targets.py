"""Target extraction: the step a plan is currently working toward.

A target is the earliest step in the remaining plan that either gains
knowledge (arrives somewhere that resolves a bike's candidate set, in
either direction) or achieves a goal fluent no later step deletes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .. import domain
from ..execution.belief import BeliefState
from ..planning.model import GroundAction

KNOWLEDGE = "KnowledgeGain"
POSITION = "SubgoalAchievement"


@dataclass(frozen=True)
class TargetDescriptor:
    kind: str  # KNOWLEDGE or POSITION
    subject: str  # "bike:<id>" | "holding:<id>" | "at:<landmark>"
    step: int  # index into the remaining plan
    bike: Optional[str] = None

    @property
    def key(self) -> Tuple[str, str]:
        """Identity for change detection, ignoring the step index."""
        return (self.kind, self.subject)


def extract_target(intention: Sequence[GroundAction],
                   belief: BeliefState,
                   goal: frozenset) -> Optional[TargetDescriptor]:
    """Earliest knowledge-gain or durable-subgoal step, or None.

    Knowledge wins over a subgoal achieved at the same step. Steps after
    the first hit never matter, so candidate pruning along the walk does
    not need simulating.
    """
    unlocated = sorted(b for b, cands in belief.candidates.items()
                       if len(cands) >= 2)
    steps = tuple(intention)
    for i, action in enumerate(steps):
        if domain.is_move(action):
            dst = domain.move_dst(action)
            hits = [b for b in unlocated
                    if dst in belief.candidates[b]]
            if hits:
                return TargetDescriptor(kind=KNOWLEDGE,
                                        subject=f"bike:{hits[0]}",
                                        step=i, bike=hits[0])
        achieved = action.add & goal
        for fluent in sorted(achieved):
            deleted_later = any(fluent in later.delete
                                for later in steps[i + 1:])
            if deleted_later:
                continue
            if fluent.name == domain.HOLDING:
                bike = fluent.args[0]
                return TargetDescriptor(kind=POSITION,
                                        subject=f"holding:{bike}",
                                        step=i, bike=bike)
            return TargetDescriptor(kind=POSITION,
                                    subject=f"at:{fluent.args[0]}",
                                    step=i)
    return None
