"""Wall-clock abstraction so collection runs can be replayed at any speed."""

from __future__ import annotations

import time
from datetime import datetime, timedelta, timezone
from typing import Protocol, runtime_checkable


@runtime_checkable
class Clock(Protocol):
    """Minimal clock surface used by monitors and the station fleet."""

    def now(self) -> datetime:
        """Current station-local time as an aware datetime."""
        ...

    def elapsed_s(self) -> float:
        """Seconds since this clock was started."""
        ...

    def sleep(self, seconds: float) -> None:
        ...


class RealClock:
    """System clock; ``tz`` fixes the local offset stamped onto events."""

    def __init__(self, tz: timezone = timezone.utc):
        self.tz = tz
        self._t0 = time.monotonic()

    def now(self) -> datetime:
        return datetime.now(self.tz)

    def elapsed_s(self) -> float:
        return time.monotonic() - self._t0

    def sleep(self, seconds: float) -> None:
        time.sleep(seconds)


class SimClock:
    """Deterministic clock: ``sleep`` advances simulated time instantly.

    Each monitor owns one instance, so per-station timelines do not depend
    on how many stations run concurrently.
    """

    def __init__(self, start: datetime):
        if start.tzinfo is None:
            raise ValueError("SimClock start must be timezone-aware")
        self.start = start
        self._elapsed = 0.0

    def now(self) -> datetime:
        return self.start + timedelta(seconds=self._elapsed)

    def elapsed_s(self) -> float:
        return self._elapsed

    def sleep(self, seconds: float) -> None:
        if seconds < 0:
            raise ValueError("cannot sleep a negative duration")
        self._elapsed += seconds
