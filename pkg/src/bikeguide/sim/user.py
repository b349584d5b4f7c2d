"""The simulated listener.

Compliance is per instruction: with probability gamma the user executes
an action compatible with what was said (uniform over the instruction's
similar set when it is ambiguous and no elaboration narrowed it down),
otherwise they deviate uniformly over the remaining applicable actions.
Hesitation decides whether the behaviour template's second dialogue
action fires before the user moves.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from ..planning.model import GroundAction


@dataclass(frozen=True)
class UserConfig:
    gamma: float = 0.95  # compliance probability per instruction
    hesitate_ambiguous: float = 1.0
    hesitate_otherwise: float = 0.5
    act_delay: float = 1.0  # logical seconds from decision to action

    def __post_init__(self):
        for name in ("gamma", "hesitate_ambiguous", "hesitate_otherwise"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be a probability, got {v}")
        if self.act_delay <= 0:
            raise ValueError("act_delay must be positive")


def episode_seed(master_seed: int, tag: str, index: int) -> int:
    """Stable per-episode seed, independent of execution order."""
    digest = hashlib.sha256(
        f"{master_seed}:{tag}:{index}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class SimulatedUser:
    """Draws hesitation, compliance, and action choices from one RNG."""

    def __init__(self, config: UserConfig, seed: int):
        self.config = config
        self._rng = random.Random(seed)

    def hesitates(self, ambiguous: bool) -> bool:
        p = (self.config.hesitate_ambiguous if ambiguous
             else self.config.hesitate_otherwise)
        return self._rng.random() < p

    def choose_action(
        self,
        compatible: Sequence[GroundAction],
        applicable: Sequence[GroundAction],
    ) -> Tuple[GroundAction, bool]:
        """Pick the next action; returns (action, complied).

        `compatible` holds every action matching the instruction as the
        user heard it. A deviation draws from the applicable actions
        outside that set; with nowhere else to go the user complies.
        """
        compatible = sorted(compatible, key=lambda a: a.sort_key)
        if not compatible:
            raise ValueError("instruction with no compatible actions")
        others = sorted((a for a in applicable if a not in set(compatible)),
                        key=lambda a: a.sort_key)
        if others and self._rng.random() >= self.config.gamma:
            return self._rng.choice(others), False
        return self._rng.choice(compatible), True
