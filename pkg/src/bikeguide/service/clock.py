"""Injectable time sources so timer logic is testable to the second."""

from __future__ import annotations

import time


class SystemClock:
    """Monotonic wall time for live sessions."""

    def now(self) -> float:
        return time.monotonic()


class VirtualClock:
    """Manually driven time for tests and replay."""

    def __init__(self, start: float = 0.0):
        self._now = float(start)

    def now(self) -> float:
        return self._now

    def advance(self, dt: float) -> float:
        if dt < 0:
            raise ValueError("time only moves forward")
        self._now += dt
        return self._now

    def set_time(self, t: float) -> float:
        if t < self._now:
            raise ValueError("time only moves forward")
        self._now = float(t)
        return self._now
