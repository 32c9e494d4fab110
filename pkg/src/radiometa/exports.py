"""CSV export with provenance-aware column sets, plus shareable URL state.

Every column carries the provenance of its source. The public-domain set
drops columns derived from commercial music libraries (the per-track audio
descriptors and popularity); openly licensed sources and our own computed
values stay exportable.
"""

from __future__ import annotations

import base64
import binascii
import csv
import io
import json
from dataclasses import dataclass
from typing import Callable, Sequence

from .store import EventFilter, JoinedEvent

SHARE_VERSION_PREFIX = "v1."

# Provenance classes for export policy.
OPEN = "open"  # station directory, map data, stream encoder, open libraries, own scores
COMMERCIAL = "commercial"  # commercial-library audio descriptors


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return "; ".join(str(v) for v in value)
    return str(value)


@dataclass(frozen=True)
class Column:
    name: str
    provenance: str
    getter: Callable[[JoinedEvent], object]


def _form_text(row: JoinedEvent) -> str:
    form = row.station.form
    if form.kind == "webcast":
        return "webcast"
    return f"simulcast ({form.band.value} {form.frequency})"


def _members_text(row: JoinedEvent) -> str:
    if row.artist is None or not row.artist.members:
        return ""
    return "; ".join(m.name for m in row.artist.members)


def _key_mode_text(row: JoinedEvent) -> str:
    if row.track is None or row.track.key_mode is None:
        return ""
    return f"{row.track.key_mode.tonic} {row.track.key_mode.mode}"


COLUMNS: tuple[Column, ...] = (
    Column("event_id", OPEN, lambda r: r.event.event_id),
    Column("station_id", OPEN, lambda r: r.event.station_id),
    Column("time_at_station", OPEN, lambda r: r.event.time_at_station.isoformat()),
    Column("description", OPEN, lambda r: r.event.description),
    Column("reliability", OPEN, lambda r: r.event.reliability),
    Column("station_name", OPEN, lambda r: r.station.name),
    Column("station_form", OPEN, _form_text),
    Column("station_formats", OPEN, lambda r: r.station.formats),
    Column("station_genres", OPEN, lambda r: r.station.genres),
    Column("station_website", OPEN, lambda r: r.station.website),
    Column("city", OPEN, lambda r: r.location.city),
    Column("country", OPEN, lambda r: r.location.country),
    Column("country_code", OPEN, lambda r: r.location.country_code),
    Column("continent", OPEN, lambda r: r.location.continent.value),
    Column("longitude", OPEN, lambda r: r.location.coordinates[0]),
    Column("latitude", OPEN, lambda r: r.location.coordinates[1]),
    Column("population", OPEN, lambda r: r.location.population),
    Column("country_gdp", OPEN, lambda r: r.location.country_gdp),
    Column("artist_name", OPEN, lambda r: r.artist.name if r.artist else None),
    Column("artist_type", OPEN, lambda r: r.artist.artist_type.kind if r.artist else None),
    Column("artist_gender", OPEN, lambda r: r.artist.gender if r.artist else None),
    Column("artist_country", OPEN, lambda r: r.artist.country if r.artist else None),
    Column("artist_genres", OPEN, lambda r: r.artist.genres if r.artist else None),
    Column("artist_instruments", OPEN, lambda r: r.artist.instruments if r.artist else None),
    Column("artist_members", OPEN, _members_text),
    Column("track_title", OPEN, lambda r: r.track.title if r.track else None),
    Column("duration_s", OPEN, lambda r: r.track.duration_s if r.track else None),
    Column("year_released", OPEN, lambda r: r.track.year_released if r.track else None),
    Column("key_mode", OPEN, _key_mode_text),
    Column("language", OPEN, lambda r: r.track.language if r.track else None),
    Column("popularity", COMMERCIAL, lambda r: r.track.popularity if r.track else None),
    Column(
        "danceability",
        COMMERCIAL,
        lambda r: r.track.features.danceability if r.track and r.track.features else None,
    ),
    Column(
        "speechiness",
        COMMERCIAL,
        lambda r: r.track.features.speechiness if r.track and r.track.features else None,
    ),
    Column(
        "acousticness",
        COMMERCIAL,
        lambda r: r.track.features.acousticness if r.track and r.track.features else None,
    ),
    Column(
        "liveness",
        COMMERCIAL,
        lambda r: r.track.features.liveness if r.track and r.track.features else None,
    ),
    Column(
        "instrumentalness",
        COMMERCIAL,
        lambda r: r.track.features.instrumentalness if r.track and r.track.features else None,
    ),
    Column(
        "valence",
        COMMERCIAL,
        lambda r: r.track.features.valence if r.track and r.track.features else None,
    ),
    Column(
        "arousal",
        COMMERCIAL,
        lambda r: r.track.features.arousal if r.track and r.track.features else None,
    ),
)


def columns_for(column_set: str) -> tuple[Column, ...]:
    if column_set == "full":
        return COLUMNS
    if column_set == "public_domain":
        return tuple(c for c in COLUMNS if c.provenance == OPEN)
    raise ValueError(f"unknown column set {column_set!r}")


def export_csv(rows: Sequence[JoinedEvent], column_set: str = "full") -> bytes:
    """UTF-8 CSV with RFC 4180 quoting; header from the column dictionary."""
    cols = columns_for(column_set)
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
    writer.writerow([c.name for c in cols])
    for row in rows:
        writer.writerow([_fmt(c.getter(row)) for c in cols])
    return buf.getvalue().encode("utf-8")


def parse_csv(data: bytes) -> tuple[list[str], list[dict[str, str]]]:
    """Read an exported CSV back into (header, row dicts of cell text)."""
    reader = csv.reader(io.StringIO(data.decode("utf-8")))
    rows = list(reader)
    if not rows:
        return [], []
    header = rows[0]
    return header, [dict(zip(header, r)) for r in rows[1:]]


# --- shareable search state


@dataclass(frozen=True)
class ShareState:
    filter: EventFilter = EventFilter()
    selected_event_ids: tuple[str, ...] = ()
    panel_layout: str = "default"
    language: str = "en"

    def to_dict(self) -> dict:
        return {
            "filter": self.filter.to_dict(),
            "selected_event_ids": list(self.selected_event_ids),
            "panel_layout": self.panel_layout,
            "language": self.language,
        }

    @staticmethod
    def from_dict(obj: dict) -> "ShareState":
        return ShareState(
            filter=EventFilter.from_dict(obj.get("filter", {})),
            selected_event_ids=tuple(obj.get("selected_event_ids", ())),
            panel_layout=obj.get("panel_layout", "default"),
            language=obj.get("language", "en"),
        )


class ShareDecodeError(ValueError):
    """Unknown version or corrupt payload; decoding never yields partial state."""


def encode_share_url(state: ShareState) -> str:
    """Version prefix plus URL-safe base64 of the canonical state JSON."""
    canonical = json.dumps(
        state.to_dict(), ensure_ascii=False, sort_keys=True, separators=(",", ":")
    )
    return SHARE_VERSION_PREFIX + base64.urlsafe_b64encode(
        canonical.encode("utf-8")
    ).decode("ascii")


def decode_share_url(code: str) -> ShareState:
    if not code.startswith(SHARE_VERSION_PREFIX):
        raise ShareDecodeError(f"unknown share-state version in {code[:8]!r}")
    payload = code[len(SHARE_VERSION_PREFIX):]
    try:
        raw = base64.urlsafe_b64decode(payload.encode("ascii"))
        obj = json.loads(raw.decode("utf-8"))
        state = ShareState.from_dict(obj)
        state.filter.validate()
    except (binascii.Error, UnicodeError, ValueError, KeyError, TypeError) as exc:
        raise ShareDecodeError(f"corrupt share-state payload: {exc}") from exc
    return state
