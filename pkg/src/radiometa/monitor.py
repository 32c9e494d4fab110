"""Poll station streams for encoder metadata and turn payloads into events.

Each station monitor owns its clock and state, so results are identical no
matter how many stations run concurrently. A wake-up happens every poll
interval; it is counted as blackout-skipped, excluded (empty payload,
blacklist term, or duplicate of the last accepted payload), or accepted.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterable, Protocol

from . import icy
from .clock import Clock
from .models import EventRecord, StationRecord

DEFAULT_BLACKLIST = (
    "advert",
    "advertisement",
    "commercial",
    "unknown",
    "blackout",
    "jingle",
    "station id",
)

DEFAULT_POLL_INTERVAL_S = 30.0


@dataclass(frozen=True)
class MonitorConfig:
    events_per_station: int = 100
    poll_interval_s: float = DEFAULT_POLL_INTERVAL_S
    blacklist: tuple[str, ...] = DEFAULT_BLACKLIST
    blackout_half_width_min: int = 5
    station_sample_size: int = 10_000
    rng_seed: int = 0
    # Safety valve for endless sources; None means no cap.
    max_polls: int | None = None

    def __post_init__(self):
        if self.events_per_station < 1:
            raise ValueError("events_per_station must be >= 1")
        if self.poll_interval_s < 1:
            raise ValueError("poll_interval_s must be >= 1")
        if not 0 <= self.blackout_half_width_min <= 15:
            raise ValueError("blackout_half_width_min must be within [0, 15]")
        for term in self.blacklist:
            if term != term.lower():
                raise ValueError(f"blacklist terms must be lowercase: {term!r}")

    @staticmethod
    def from_dict(obj: dict) -> "MonitorConfig":
        known = {f for f in MonitorConfig.__dataclass_fields__}
        kwargs = {k: v for k, v in obj.items() if k in known}
        if "blacklist" in kwargs:
            kwargs["blacklist"] = tuple(kwargs["blacklist"])
        return MonitorConfig(**kwargs)


def split_description(description: str) -> tuple[str | None, str | None]:
    """Split "Artist - Title" on the first separator; None/None when absent.

    Separators are tried in order: spaced en dash, spaced em dash, spaced
    hyphen. Only the first occurrence of the first matching separator splits,
    so "AC/DC - Back in Black - Live" keeps the suffix with the title.
    """
    for sep in (" – ", " — ", " - "):
        left, found, right = description.partition(sep)
        if found:
            return left.strip(), right.strip()
    return None, None


@dataclass(frozen=True)
class Exclusion:
    excluded: bool
    reason: str | None = None


def is_excluded(description: str, blacklist: Iterable[str] = DEFAULT_BLACKLIST) -> Exclusion:
    """Check a payload against the empty/advertising rules (terms lowercase)."""
    if not description.strip():
        return Exclusion(True, "empty")
    folded = description.casefold()
    for term in blacklist:
        if term in folded:
            return Exclusion(True, f"blacklist:{term}")
    return Exclusion(False)


def in_blackout_window(t: datetime, half_width_min: int = 5) -> bool:
    """True when the local minute-of-hour falls in a window around :00 or :30."""
    if not 0 <= half_width_min <= 15:
        raise ValueError("half_width_min must be within [0, 15]")
    w = half_width_min
    m = t.minute
    return m >= 60 - w or m < w or 30 - w <= m < 30 + w


def sample_stations(
    all_stations: list[StationRecord], n: int, seed: int
) -> list[StationRecord]:
    """Uniform sample without replacement; deterministic for a fixed seed."""
    if n > len(all_stations):
        raise ValueError(f"cannot sample {n} stations from {len(all_stations)}")
    return random.Random(seed).sample(all_stations, n)


# --- poll sources


class SourceUnreachable(ConnectionError):
    """The station could not be reached after the fixed retry policy."""


class SourceExhausted(Exception):
    """A scripted source ran out of entries (end of a non-looping script)."""


class PollSource(Protocol):
    def poll(self, now: datetime, elapsed_s: float) -> str | None:
        """One payload per poll: text, "" for an empty frame, None for no title."""
        ...


class ScriptedSource:
    """In-memory source that replays a fixed payload sequence, then exhausts."""

    def __init__(self, payloads: Iterable[str | None]):
        self._payloads = list(payloads)
        self._i = 0

    def poll(self, now: datetime, elapsed_s: float) -> str | None:
        if self._i >= len(self._payloads):
            raise SourceExhausted
        payload = self._payloads[self._i]
        self._i += 1
        return payload


class HttpPollSource:
    """Polls GET /stations/{id}/now and decodes the metadata frame.

    The monitor's elapsed seconds ride along as ``?t=`` so a fleet driven by
    an accelerated clock serves every monitor its own script position.
    Transport failures retry up to the fixed attempt budget, then raise
    :class:`SourceUnreachable`.
    """

    ATTEMPTS = 3

    def __init__(self, base_url: str, station_id: str, timeout_s: float = 10.0):
        import requests

        self.url = f"{base_url.rstrip('/')}/stations/{station_id}/now"
        self.timeout_s = timeout_s
        self._session = requests.Session()

    def poll(self, now: datetime, elapsed_s: float) -> str | None:
        import requests

        last_error: Exception | None = None
        for _ in range(self.ATTEMPTS):
            try:
                resp = self._session.get(
                    self.url, params={"t": f"{elapsed_s:.3f}"}, timeout=self.timeout_s
                )
                if resp.status_code == 404:
                    raise SourceUnreachable(f"unknown station at {self.url}")
                resp.raise_for_status()
                return icy.parse_metadata_block(resp.content)
            except (requests.RequestException, icy.IcyFrameError) as exc:
                last_error = exc
        raise SourceUnreachable(str(last_error))


# --- monitoring loop


@dataclass
class PollReport:
    polls: int = 0
    accepted: int = 0
    blackout_skipped: int = 0
    excluded: dict[str, int] = field(default_factory=dict)

    def count_exclusion(self, reason: str) -> None:
        bucket = reason.split(":", 1)[0]
        self.excluded[bucket] = self.excluded.get(bucket, 0) + 1

    @property
    def excluded_total(self) -> int:
        return sum(self.excluded.values())

    def reconciles(self) -> bool:
        return self.accepted + self.excluded_total + self.blackout_skipped == self.polls


@dataclass
class MonitorResult:
    station_id: str
    events: list[EventRecord]
    report: PollReport
    unreachable: bool = False


def monitor_station(
    station: StationRecord,
    source: PollSource,
    config: MonitorConfig,
    clock: Clock,
) -> MonitorResult:
    """Collect up to ``events_per_station`` accepted events from one station.

    Wakes every ``poll_interval_s``: inside a blackout window no request is
    made; otherwise the payload is excluded (empty, blacklist, or identical
    to the immediately preceding accepted payload) or accepted with the
    clock's current local time. Stops at the quota, when the source is
    exhausted, or when polling fails after the retry budget (the station is
    then marked unreachable and partial results are returned).
    """
    events: list[EventRecord] = []
    report = PollReport()
    last_accepted: str | None = None
    unreachable = False

    while len(events) < config.events_per_station:
        if config.max_polls is not None and report.polls >= config.max_polls:
            break
        now = clock.now()
        report.polls += 1
        if in_blackout_window(now, config.blackout_half_width_min):
            report.blackout_skipped += 1
            clock.sleep(config.poll_interval_s)
            continue
        try:
            payload = source.poll(now, clock.elapsed_s())
        except SourceExhausted:
            report.polls -= 1  # never performed
            break
        except SourceUnreachable:
            report.polls -= 1
            unreachable = True
            break

        description = payload or ""
        check = is_excluded(description, config.blacklist)
        if check.excluded:
            report.count_exclusion(check.reason or "excluded")
        elif description == last_accepted:
            report.count_exclusion("duplicate")
        else:
            events.append(
                EventRecord(
                    event_id=f"ev-{station.station_id}-{len(events):05d}",
                    station_id=station.station_id,
                    time_at_station=now,
                    description=description,
                )
            )
            report.accepted += 1
            last_accepted = description
        clock.sleep(config.poll_interval_s)

    return MonitorResult(
        station_id=station.station_id,
        events=events,
        report=report,
        unreachable=unreachable,
    )
