"""Partitioned corpus store: location, station, event, artist, track.

Rows live in memory for querying and are mirrored to an embedded sqlite
file (WAL journal) for durability; pass ``path=None`` for an ephemeral
store. The interchange format is a directory of newline-delimited JSON
files plus an index manifest, written deterministically so export/import
round-trips are bit-identical.
"""

from __future__ import annotations

import hashlib
import json
import sqlite3
import threading
from bisect import insort
from dataclasses import dataclass, field, replace
from datetime import datetime
from pathlib import Path

from .clock import Clock, RealClock
from .models import (
    ArtistRecord,
    Band,
    EventRecord,
    LocationRecord,
    Record,
    ReviewStatus,
    StationForm,
    StationRecord,
    TrackRecord,
    TABLE_NAMES,
    record_from_dict,
    record_id,
    record_to_dict,
    table_for,
    validate_record,
)

MANIFEST_NAME = "manifest.json"
CORPUS_FORMAT = "radiometa-corpus"
RELIABLE_THRESHOLD = 0.90


class ValidationError(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class IntegrityError(ValueError):
    """A record references an id that is not in the corpus."""


class NotFoundError(KeyError):
    pass


class UndefinedReliabilityError(ValueError):
    """Station reliability is undefined without at least one matched event."""


@dataclass(frozen=True)
class EventFilter:
    country: str | None = None
    city: str | None = None
    station_id: str | None = None
    text_query: str | None = None
    min_reliability: float | None = None
    date_range: tuple[datetime, datetime] | None = None
    genre: str | None = None
    artist_country: str | None = None

    def validate(self) -> None:
        if self.date_range is not None:
            start, end = self.date_range
            if start > end:
                raise ValueError("date_range start must not exceed end")

    def to_dict(self) -> dict:
        return {
            "country": self.country,
            "city": self.city,
            "station_id": self.station_id,
            "text_query": self.text_query,
            "min_reliability": self.min_reliability,
            "date_range": None
            if self.date_range is None
            else [self.date_range[0].isoformat(), self.date_range[1].isoformat()],
            "genre": self.genre,
            "artist_country": self.artist_country,
        }

    @staticmethod
    def from_dict(obj: dict) -> "EventFilter":
        dr = obj.get("date_range")
        return EventFilter(
            country=obj.get("country"),
            city=obj.get("city"),
            station_id=obj.get("station_id"),
            text_query=obj.get("text_query"),
            min_reliability=obj.get("min_reliability"),
            date_range=None
            if dr is None
            else (datetime.fromisoformat(dr[0]), datetime.fromisoformat(dr[1])),
            genre=obj.get("genre"),
            artist_country=obj.get("artist_country"),
        )


@dataclass(frozen=True)
class JoinedEvent:
    event: EventRecord
    station: StationRecord
    location: LocationRecord
    artist: ArtistRecord | None
    track: TrackRecord | None


@dataclass(frozen=True)
class CorpusView:
    """Immutable closed subset of the corpus (all references resolve inside)."""

    locations: dict[str, LocationRecord]
    stations: dict[str, StationRecord]
    events: dict[str, EventRecord]
    artists: dict[str, ArtistRecord]
    tracks: dict[str, TrackRecord]


@dataclass
class ReviewEdit:
    at: datetime
    station_id: str
    fields_changed: dict[str, tuple[str, str]] = field(default_factory=dict)


def _event_sort_key(event: EventRecord) -> tuple[float, str]:
    # Most recent first means the UTC instant of local time + offset.
    return (-event.time_at_station.timestamp(), event.event_id)


def _matches(flt: EventFilter, row: JoinedEvent) -> bool:
    ev, st, loc = row.event, row.station, row.location
    if flt.station_id is not None and ev.station_id != flt.station_id:
        return False
    if flt.country is not None and loc.country != flt.country:
        return False
    if flt.city is not None and loc.city != flt.city:
        return False
    if flt.min_reliability is not None:
        if ev.reliability is None or ev.reliability < flt.min_reliability:
            return False
    if flt.date_range is not None:
        start, end = flt.date_range
        if not start <= ev.time_at_station <= end:
            return False
    if flt.text_query is not None:
        q = flt.text_query.casefold()
        hay = [ev.description]
        if row.artist is not None:
            hay.append(row.artist.name)
        if row.track is not None:
            hay.append(row.track.title)
        if not any(q in h.casefold() for h in hay):
            return False
    if flt.genre is not None:
        g = flt.genre.casefold()
        pool = [x.casefold() for x in st.genres]
        if row.artist is not None:
            pool.extend(x.casefold() for x in row.artist.genres)
        if g not in pool:
            return False
    if flt.artist_country is not None:
        if row.artist is None or row.artist.country != flt.artist_country:
            return False
    return True


class CorpusStore:
    """Single serialized writer over the five tables, snapshot readers."""

    def __init__(self, path: str | Path | None = None, clock: Clock | None = None):
        self._lock = threading.RLock()
        self._clock = clock or RealClock()
        self.locations: dict[str, LocationRecord] = {}
        self.stations: dict[str, StationRecord] = {}
        self.events: dict[str, EventRecord] = {}
        self.artists: dict[str, ArtistRecord] = {}
        self.tracks: dict[str, TrackRecord] = {}
        self._events_by_station: dict[str, list[tuple[tuple[float, str], str]]] = {}
        self._stations_by_location: dict[str, set[str]] = {}
        self.review_history: list[ReviewEdit] = []
        self._db: sqlite3.Connection | None = None
        if path is not None:
            self._open_db(Path(path))

    # --- persistence plumbing

    def _open_db(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        db = sqlite3.connect(path, check_same_thread=False)
        db.execute("PRAGMA journal_mode=WAL")
        db.execute("PRAGMA synchronous=NORMAL")
        for table in TABLE_NAMES:
            db.execute(
                f"CREATE TABLE IF NOT EXISTS {table} (id TEXT PRIMARY KEY, data TEXT NOT NULL)"
            )
        db.execute(
            "CREATE TABLE IF NOT EXISTS review_history ("
            "seq INTEGER PRIMARY KEY AUTOINCREMENT, at TEXT, station_id TEXT, changes TEXT)"
        )
        db.commit()
        self._db = db
        for table in TABLE_NAMES:
            for (data,) in db.execute(f"SELECT data FROM {table}"):
                record = record_from_dict(table, json.loads(data))
                self._apply(record)
        for at, station_id, changes in db.execute(
            "SELECT at, station_id, changes FROM review_history ORDER BY seq"
        ):
            self.review_history.append(
                ReviewEdit(
                    at=datetime.fromisoformat(at),
                    station_id=station_id,
                    fields_changed={
                        k: (v[0], v[1]) for k, v in json.loads(changes).items()
                    },
                )
            )

    def close(self) -> None:
        with self._lock:
            if self._db is not None:
                self._db.close()
                self._db = None

    def __enter__(self) -> "CorpusStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _persist(self, record: Record) -> None:
        if self._db is None:
            return
        payload = json.dumps(record_to_dict(record), ensure_ascii=False, sort_keys=True)
        self._db.execute(
            f"INSERT OR REPLACE INTO {table_for(record)} (id, data) VALUES (?, ?)",
            (record_id(record), payload),
        )
        self._db.commit()

    # --- table maintenance

    def _table(self, name: str) -> dict:
        return getattr(self, name)

    def _check_references(self, record: Record) -> None:
        if isinstance(record, StationRecord):
            if record.location_id not in self.locations:
                raise IntegrityError(f"station references missing location {record.location_id!r}")
        elif isinstance(record, EventRecord):
            if record.station_id not in self.stations:
                raise IntegrityError(f"event references missing station {record.station_id!r}")
            if record.artist_id is not None and record.artist_id not in self.artists:
                raise IntegrityError(f"event references missing artist {record.artist_id!r}")
            if record.track_id is not None and record.track_id not in self.tracks:
                raise IntegrityError(f"event references missing track {record.track_id!r}")

    def _apply(self, record: Record) -> None:
        table = self._table(table_for(record))
        rid = record_id(record)
        previous = table.get(rid)
        table[rid] = record
        if isinstance(record, EventRecord):
            index = self._events_by_station.setdefault(record.station_id, [])
            if previous is not None:
                old = (_event_sort_key(previous), rid)
                prev_index = self._events_by_station.get(previous.station_id, [])
                if old in prev_index:
                    prev_index.remove(old)
            insort(index, (_event_sort_key(record), rid))
        elif isinstance(record, StationRecord):
            if previous is not None and previous.location_id != record.location_id:
                self._stations_by_location.get(previous.location_id, set()).discard(rid)
            self._stations_by_location.setdefault(record.location_id, set()).add(rid)

    def upsert(self, record: Record) -> str:
        """Insert or replace one validated record; returns its id."""
        violations = validate_record(record)
        if violations:
            raise ValidationError(violations)
        with self._lock:
            self._check_references(record)
            self._apply(record)
            self._persist(record)
        return record_id(record)

    def upsert_many(self, records) -> int:
        count = 0
        with self._lock:
            for record in records:
                self.upsert(record)
                count += 1
        return count

    # --- reads

    def get_event(self, event_id: str) -> EventRecord:
        try:
            return self.events[event_id]
        except KeyError:
            raise NotFoundError(f"unknown event {event_id!r}") from None

    def get_station(self, station_id: str) -> StationRecord:
        try:
            return self.stations[station_id]
        except KeyError:
            raise NotFoundError(f"unknown station {station_id!r}") from None

    def join_event(self, event: EventRecord) -> JoinedEvent:
        station = self.stations[event.station_id]
        return JoinedEvent(
            event=event,
            station=station,
            location=self.locations[station.location_id],
            artist=self.artists.get(event.artist_id) if event.artist_id else None,
            track=self.tracks.get(event.track_id) if event.track_id else None,
        )

    def iter_joined(self) -> list[JoinedEvent]:
        with self._lock:
            return [self.join_event(e) for e in self.events.values()]

    def query_events(
        self, flt: EventFilter = EventFilter(), limit: int = 1000
    ) -> list[JoinedEvent]:
        """Joined rows matching every present clause, most recent first.

        Recency is the UTC instant of the local timestamp; ties break on
        event_id so pagination is deterministic.
        """
        if limit < 1:
            raise ValueError("limit must be >= 1")
        flt.validate()
        with self._lock:
            if flt.station_id is not None:
                index = self._events_by_station.get(flt.station_id, [])
                ordered = [self.events[eid] for _, eid in index]
            else:
                ordered = sorted(self.events.values(), key=_event_sort_key)
            out: list[JoinedEvent] = []
            for event in ordered:
                row = self.join_event(event)
                if _matches(flt, row):
                    out.append(row)
                    if len(out) == limit:
                        break
            return out

    def reliable_subset(self, threshold: float = RELIABLE_THRESHOLD) -> CorpusView:
        """Events at or above the threshold plus the closure of referenced rows."""
        with self._lock:
            events = {
                eid: e
                for eid, e in self.events.items()
                if e.reliability is not None and e.reliability >= threshold
            }
            stations: dict[str, StationRecord] = {}
            locations: dict[str, LocationRecord] = {}
            artists: dict[str, ArtistRecord] = {}
            tracks: dict[str, TrackRecord] = {}
            for e in events.values():
                station = self.stations[e.station_id]
                stations[station.station_id] = station
                locations[station.location_id] = self.locations[station.location_id]
                if e.artist_id is not None:
                    artists[e.artist_id] = self.artists[e.artist_id]
                if e.track_id is not None:
                    tracks[e.track_id] = self.tracks[e.track_id]
            return CorpusView(
                locations=locations,
                stations=stations,
                events=events,
                artists=artists,
                tracks=tracks,
            )

    # --- review operations

    _EDITABLE_STATION = ("name", "website", "formats", "genres", "form")
    _EDITABLE_LOCATION = ("city", "country")

    def review_station(self, station_id: str, edits: dict) -> StationRecord:
        """Apply review edits, flip the station to reviewed, log the change.

        An empty edit set still marks the station reviewed: review can
        confirm the record was already correct. City/country edits land on
        the station's location row (shared by co-located stations).
        """
        with self._lock:
            station = self.get_station(station_id)
            unknown = set(edits) - set(self._EDITABLE_STATION) - set(self._EDITABLE_LOCATION)
            if unknown:
                raise ValueError(f"not reviewable fields: {sorted(unknown)}")
            changes: dict[str, tuple[str, str]] = {}
            station_updates = {}
            for key in self._EDITABLE_STATION:
                if key not in edits:
                    continue
                value = edits[key]
                if key in ("formats", "genres"):
                    value = tuple(value)
                if key == "form":
                    value = _coerce_form(value)
                old = getattr(station, key)
                if value != old:
                    changes[key] = (_printable(old), _printable(value))
                    station_updates[key] = value
            location = self.locations[station.location_id]
            location_updates = {}
            for key in self._EDITABLE_LOCATION:
                if key not in edits:
                    continue
                value = edits[key]
                old = getattr(location, key)
                if value != old:
                    changes[key] = (_printable(old), _printable(value))
                    location_updates[key] = value
            if location_updates:
                self.upsert(replace(location, **location_updates))
            updated = replace(
                station, review_status=ReviewStatus.REVIEWED, **station_updates
            )
            self.upsert(updated)
            edit = ReviewEdit(
                at=self._clock.now(), station_id=station_id, fields_changed=changes
            )
            self.review_history.append(edit)
            if self._db is not None:
                self._db.execute(
                    "INSERT INTO review_history (at, station_id, changes) VALUES (?, ?, ?)",
                    (
                        edit.at.isoformat(),
                        station_id,
                        json.dumps(
                            {k: list(v) for k, v in changes.items()}, ensure_ascii=False
                        ),
                    ),
                )
                self._db.commit()
            return updated

    def compute_station_reliability(
        self, station_id: str, threshold: float = RELIABLE_THRESHOLD
    ) -> float:
        """Fraction of the station's matched events at or above the threshold.

        Stored on the station, which also marks it reviewed (the fraction is
        the closing step of a station review). Raises when no event of the
        station has completed a match attempt.
        """
        with self._lock:
            station = self.get_station(station_id)
            matched = [
                e
                for _, eid in self._events_by_station.get(station_id, [])
                if (e := self.events[eid]).reliability is not None
            ]
            if not matched:
                raise UndefinedReliabilityError(
                    f"station {station_id!r} has no matched events"
                )
            pct = sum(1 for e in matched if e.reliability >= threshold) / len(matched)
            self.upsert(
                replace(
                    station, reliability_pct=pct, review_status=ReviewStatus.REVIEWED
                )
            )
            return pct

    # --- interchange format

    def export_dir(self, path: str | Path) -> Path:
        """Write the corpus as one NDJSON file per table plus a manifest.

        Rows are sorted by id and serialized canonically, so identical
        corpus content always produces identical bytes.
        """
        out = Path(path)
        out.mkdir(parents=True, exist_ok=True)
        manifest_tables = {}
        with self._lock:
            for table in TABLE_NAMES:
                rows = self._table(table)
                lines = [
                    json.dumps(
                        record_to_dict(rows[rid]),
                        ensure_ascii=False,
                        sort_keys=True,
                        separators=(",", ":"),
                    )
                    for rid in sorted(rows)
                ]
                blob = ("\n".join(lines) + "\n" if lines else "").encode("utf-8")
                (out / f"{table}.ndjson").write_bytes(blob)
                manifest_tables[table] = {
                    "file": f"{table}.ndjson",
                    "rows": len(lines),
                    "sha256": hashlib.sha256(blob).hexdigest(),
                }
        manifest = {"format": CORPUS_FORMAT, "version": 1, "tables": manifest_tables}
        (out / MANIFEST_NAME).write_bytes(
            (json.dumps(manifest, ensure_ascii=False, sort_keys=True, indent=2) + "\n").encode(
                "utf-8"
            )
        )
        return out

    def import_dir(self, path: str | Path) -> int:
        """Load a corpus directory produced by :meth:`export_dir`."""
        src = Path(path)
        manifest = json.loads((src / MANIFEST_NAME).read_text(encoding="utf-8"))
        if manifest.get("format") != CORPUS_FORMAT:
            raise ValueError(f"not a corpus directory: {src}")
        count = 0
        with self._lock:
            # Referenced tables load before their referrers.
            for table in ("locations", "stations", "artists", "tracks", "events"):
                entry = manifest["tables"][table]
                blob = (src / entry["file"]).read_bytes()
                digest = hashlib.sha256(blob).hexdigest()
                if digest != entry["sha256"]:
                    raise ValueError(f"checksum mismatch for table {table}")
                for line in blob.decode("utf-8").splitlines():
                    if line.strip():
                        self.upsert(record_from_dict(table, json.loads(line)))
                        count += 1
        return count


def _coerce_form(value) -> StationForm:
    if isinstance(value, StationForm):
        return value
    if isinstance(value, dict):
        return StationForm(
            kind=value["kind"],
            band=Band(value["band"]) if value.get("band") else None,
            frequency=value.get("frequency"),
        )
    raise ValueError(f"cannot interpret station form {value!r}")


def _printable(value) -> str:
    if isinstance(value, StationForm):
        if value.kind == "webcast":
            return "webcast"
        return f"simulcast ({value.band.value} {value.frequency})"
    if isinstance(value, tuple):
        return ", ".join(str(v) for v in value)
    return str(value)


def view_to_store(view: CorpusView) -> CorpusStore:
    """Materialize a view as an ephemeral store (handy for exports)."""
    store = CorpusStore()
    for table in ("locations", "stations", "artists", "tracks", "events"):
        for record in getattr(view, table).values():
            store.upsert(record)
    return store
