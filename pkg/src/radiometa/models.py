"""Five-table record model: location, station, event, artist, track.

Records are plain frozen dataclasses with typed optionals (never sentinel
strings). The canonical interchange format is UTF-8 JSON with snake_case
field names, produced by :func:`record_to_dict` / :func:`record_from_dict`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from importlib import resources

__all__ = [
    "Continent",
    "ReviewStatus",
    "Band",
    "StationForm",
    "ArtistType",
    "Member",
    "KeyMode",
    "AudioFeatures",
    "LocationRecord",
    "StationRecord",
    "EventRecord",
    "ArtistRecord",
    "TrackRecord",
    "Record",
    "DurationParseError",
    "continent_for_country",
    "parse_duration",
    "validate_record",
    "record_to_dict",
    "record_from_dict",
    "TABLE_NAMES",
]

YEAR_FLOOR = 1850
YEAR_CEILING = datetime.now().year


class Continent(str, Enum):
    AFRICA = "Africa"
    ASIA = "Asia"
    EUROPE = "Europe"
    NORTH_AMERICA = "NorthAmerica"
    OCEANIA = "Oceania"
    SOUTH_AMERICA = "SouthAmerica"


class ReviewStatus(str, Enum):
    UNREVIEWED = "unreviewed"
    REVIEWED = "reviewed"


class Band(str, Enum):
    FM = "FM"
    AM = "AM"


@dataclass(frozen=True)
class StationForm:
    """Webcast (internet-only) or simulcast on a terrestrial frequency.

    ``frequency`` is in MHz for FM and kHz for AM.
    """

    kind: str  # "webcast" | "simulcast"
    band: Band | None = None
    frequency: float | None = None

    @staticmethod
    def webcast() -> "StationForm":
        return StationForm(kind="webcast")

    @staticmethod
    def simulcast(band: Band, frequency: float) -> "StationForm":
        return StationForm(kind="simulcast", band=band, frequency=frequency)


@dataclass(frozen=True)
class ArtistType:
    kind: str  # "musical_artist" | "group" | "other"
    detail: str | None = None


@dataclass(frozen=True)
class Member:
    name: str
    gender: str | None = None
    ethnicity: str | None = None


@dataclass(frozen=True)
class KeyMode:
    tonic: str
    mode: str  # "major" | "minor"


@dataclass(frozen=True)
class AudioFeatures:
    danceability: float
    speechiness: float
    acousticness: float
    liveness: float
    instrumentalness: float
    valence: float
    arousal: float

    def as_tuple(self) -> tuple[float, ...]:
        return (
            self.danceability,
            self.speechiness,
            self.acousticness,
            self.liveness,
            self.instrumentalness,
            self.valence,
            self.arousal,
        )


@dataclass(frozen=True)
class LocationRecord:
    location_id: str
    city: str
    country: str
    country_code: str  # ISO-3166 alpha-2
    continent: Continent
    coordinates: tuple[float, float]  # (longitude, latitude) degrees
    population: int | None = None
    country_gdp: float | None = None


@dataclass(frozen=True)
class StationRecord:
    station_id: str
    name: str
    location_id: str
    form: StationForm
    formats: tuple[str, ...] = ()
    genres: tuple[str, ...] = ()
    website: str | None = None
    review_status: ReviewStatus = ReviewStatus.UNREVIEWED
    reliability_pct: float | None = None


@dataclass(frozen=True)
class EventRecord:
    event_id: str
    station_id: str
    time_at_station: datetime  # aware local time (explicit UTC offset)
    description: str
    reliability: float | None = None
    artist_id: str | None = None
    track_id: str | None = None


@dataclass(frozen=True)
class ArtistRecord:
    artist_id: str
    name: str
    artist_type: ArtistType
    gender: str | None = None
    country: str | None = None
    genres: tuple[str, ...] = ()
    instruments: tuple[str, ...] = ()
    members: tuple[Member, ...] | None = None


@dataclass(frozen=True)
class TrackRecord:
    track_id: str
    title: str
    duration_s: float | None = None
    year_released: int | None = None
    key_mode: KeyMode | None = None
    language: str | None = None
    features: AudioFeatures | None = None
    popularity: float | None = None
    listen_urls: tuple[str, ...] = ()  # streaming links shown by the listen panel


Record = LocationRecord | StationRecord | EventRecord | ArtistRecord | TrackRecord

TABLE_NAMES = ("locations", "stations", "events", "artists", "tracks")

_TABLE_FOR_TYPE = {
    LocationRecord: "locations",
    StationRecord: "stations",
    EventRecord: "events",
    ArtistRecord: "artists",
    TrackRecord: "tracks",
}


def table_for(record: Record) -> str:
    return _TABLE_FOR_TYPE[type(record)]


def record_id(record: Record) -> str:
    return getattr(record, table_for(record).rstrip("s") + "_id")


# --- country -> continent lookup (frozen snapshot shipped with the package)

_CONTINENTS: dict[str, Continent] | None = None


def _continent_table() -> dict[str, Continent]:
    global _CONTINENTS
    if _CONTINENTS is None:
        raw = resources.files("radiometa.data").joinpath("country_continents.json")
        data = json.loads(raw.read_text(encoding="utf-8"))
        _CONTINENTS = {code: Continent(name) for code, name in data.items()}
    return _CONTINENTS


def continent_for_country(country_code: str) -> Continent | None:
    """Continent for an ISO-3166 alpha-2 code, or None when unknown."""
    return _continent_table().get(country_code.upper())


# --- validation


def validate_record(record: Record) -> list[str]:
    """Return all invariant violations for one record; empty list means valid.

    Validation never raises: every check appends a message naming the field
    and the rule. Referential integrity is checked by the datastore, which
    can see the other tables.
    """
    if isinstance(record, LocationRecord):
        return _validate_location(record)
    if isinstance(record, StationRecord):
        return _validate_station(record)
    if isinstance(record, EventRecord):
        return _validate_event(record)
    if isinstance(record, ArtistRecord):
        return _validate_artist(record)
    if isinstance(record, TrackRecord):
        return _validate_track(record)
    return [f"unknown record type {type(record).__name__}"]


def _validate_location(rec: LocationRecord) -> list[str]:
    out: list[str] = []
    lon, lat = rec.coordinates
    if not -180.0 <= lon <= 180.0:
        out.append(f"coordinates: longitude {lon} outside [-180, 180]")
    if not -90.0 <= lat <= 90.0:
        out.append(f"coordinates: latitude {lat} outside [-90, 90]")
    expected = continent_for_country(rec.country_code)
    if expected is None:
        out.append(f"country_code: {rec.country_code!r} not in the continent table")
    elif expected is not rec.continent:
        out.append(
            f"continent: {rec.continent.value} inconsistent with country_code "
            f"{rec.country_code} (expected {expected.value})"
        )
    if rec.population is not None and rec.population < 0:
        out.append(f"population: {rec.population} is negative")
    if rec.country_gdp is not None and rec.country_gdp < 0:
        out.append(f"country_gdp: {rec.country_gdp} is negative")
    return out


def _validate_station(rec: StationRecord) -> list[str]:
    out: list[str] = []
    form = rec.form
    if form.kind == "webcast":
        if form.frequency is not None or form.band is not None:
            out.append("form: webcast must not carry a band or frequency")
    elif form.kind == "simulcast":
        if form.band is None:
            out.append("form: simulcast requires a band (FM or AM)")
        if form.frequency is None or form.frequency <= 0:
            out.append(f"form: simulcast requires a positive frequency, got {form.frequency}")
    else:
        out.append(f"form: unknown kind {form.kind!r}")
    if rec.reliability_pct is not None:
        if rec.review_status is not ReviewStatus.REVIEWED:
            out.append("reliability_pct: present but review_status is not reviewed")
        if not 0.0 <= rec.reliability_pct <= 1.0:
            out.append(f"reliability_pct: {rec.reliability_pct} outside [0, 1]")
    return out


def _validate_event(rec: EventRecord) -> list[str]:
    out: list[str] = []
    if not rec.description.strip():
        out.append("description: must be nonempty (empty payloads are excluded at collection)")
    if rec.time_at_station.tzinfo is None:
        out.append("time_at_station: must carry an explicit UTC offset")
    if rec.reliability is not None and not 0.0 <= rec.reliability <= 1.0:
        out.append(f"reliability: {rec.reliability} outside [0, 1]")
    return out


def _validate_artist(rec: ArtistRecord) -> list[str]:
    out: list[str] = []
    if rec.artist_type.kind not in ("musical_artist", "group", "other"):
        out.append(f"artist_type: unknown kind {rec.artist_type.kind!r}")
    if rec.members and rec.artist_type.kind != "group":
        out.append("members: nonempty members require artist_type group")
    return out


def _validate_track(rec: TrackRecord) -> list[str]:
    out: list[str] = []
    if rec.duration_s is not None and rec.duration_s <= 0:
        out.append(f"duration_s: {rec.duration_s} must be > 0 when present")
    if rec.year_released is not None and not YEAR_FLOOR <= rec.year_released <= YEAR_CEILING:
        out.append(
            f"year_released: {rec.year_released} outside [{YEAR_FLOOR}, {YEAR_CEILING}]"
        )
    if rec.key_mode is not None and rec.key_mode.mode not in ("major", "minor"):
        out.append(f"key_mode: mode {rec.key_mode.mode!r} must be major or minor")
    if rec.popularity is not None and not 0.0 <= rec.popularity <= 100.0:
        out.append(f"popularity: {rec.popularity} outside [0, 100]")
    if rec.features is not None:
        for name, value in zip(
            ("danceability", "speechiness", "acousticness", "liveness",
             "instrumentalness", "valence", "arousal"),
            rec.features.as_tuple(),
        ):
            if not 0.0 <= value <= 1.0:
                out.append(f"features.{name}: {value} outside [0, 1]")
    return out


# --- duration parsing


class DurationParseError(ValueError):
    pass


_DURATION_RE = re.compile(r"^(?:(\d+):)?(\d{1,2}):(\d{1,2})$")


def parse_duration(text: str) -> int:
    """Parse "MM:SS" or "H:MM:SS" into whole seconds."""
    m = _DURATION_RE.match(text.strip())
    if not m:
        raise DurationParseError(f"not an MM:SS or H:MM:SS duration: {text!r}")
    hours = int(m.group(1)) if m.group(1) else 0
    minutes, seconds = int(m.group(2)), int(m.group(3))
    if seconds > 59:
        raise DurationParseError(f"seconds field {m.group(3)!r} exceeds 59 in {text!r}")
    if m.group(1) and minutes > 59:
        raise DurationParseError(f"minutes field {m.group(2)!r} exceeds 59 in {text!r}")
    return hours * 3600 + minutes * 60 + seconds


# --- JSON interchange


def record_to_dict(record: Record) -> dict:
    """Canonical JSON object for a record (snake_case, typed optionals as null)."""
    if isinstance(record, LocationRecord):
        return {
            "location_id": record.location_id,
            "city": record.city,
            "country": record.country,
            "country_code": record.country_code,
            "continent": record.continent.value,
            "coordinates": [record.coordinates[0], record.coordinates[1]],
            "population": record.population,
            "country_gdp": record.country_gdp,
        }
    if isinstance(record, StationRecord):
        form: dict = {"kind": record.form.kind}
        if record.form.kind == "simulcast":
            form["band"] = record.form.band.value if record.form.band else None
            form["frequency"] = record.form.frequency
        return {
            "station_id": record.station_id,
            "name": record.name,
            "location_id": record.location_id,
            "form": form,
            "formats": list(record.formats),
            "genres": list(record.genres),
            "website": record.website,
            "review_status": record.review_status.value,
            "reliability_pct": record.reliability_pct,
        }
    if isinstance(record, EventRecord):
        return {
            "event_id": record.event_id,
            "station_id": record.station_id,
            "time_at_station": record.time_at_station.isoformat(),
            "description": record.description,
            "reliability": record.reliability,
            "artist_id": record.artist_id,
            "track_id": record.track_id,
        }
    if isinstance(record, ArtistRecord):
        atype: dict = {"kind": record.artist_type.kind}
        if record.artist_type.detail is not None:
            atype["detail"] = record.artist_type.detail
        return {
            "artist_id": record.artist_id,
            "name": record.name,
            "artist_type": atype,
            "gender": record.gender,
            "country": record.country,
            "genres": list(record.genres),
            "instruments": list(record.instruments),
            "members": None
            if record.members is None
            else [
                {"name": m.name, "gender": m.gender, "ethnicity": m.ethnicity}
                for m in record.members
            ],
        }
    if isinstance(record, TrackRecord):
        return {
            "track_id": record.track_id,
            "title": record.title,
            "duration_s": record.duration_s,
            "year_released": record.year_released,
            "key_mode": None
            if record.key_mode is None
            else {"tonic": record.key_mode.tonic, "mode": record.key_mode.mode},
            "language": record.language,
            "features": None
            if record.features is None
            else {
                "danceability": record.features.danceability,
                "speechiness": record.features.speechiness,
                "acousticness": record.features.acousticness,
                "liveness": record.features.liveness,
                "instrumentalness": record.features.instrumentalness,
                "valence": record.features.valence,
                "arousal": record.features.arousal,
            },
            "popularity": record.popularity,
            "listen_urls": list(record.listen_urls),
        }
    raise TypeError(f"not a table record: {type(record).__name__}")


def record_from_dict(table: str, obj: dict) -> Record:
    """Inverse of :func:`record_to_dict` for one of the five table names."""
    if table == "locations":
        return LocationRecord(
            location_id=obj["location_id"],
            city=obj["city"],
            country=obj["country"],
            country_code=obj["country_code"],
            continent=Continent(obj["continent"]),
            coordinates=(float(obj["coordinates"][0]), float(obj["coordinates"][1])),
            population=obj.get("population"),
            country_gdp=obj.get("country_gdp"),
        )
    if table == "stations":
        f = obj["form"]
        form = StationForm(
            kind=f["kind"],
            band=Band(f["band"]) if f.get("band") else None,
            frequency=f.get("frequency"),
        )
        return StationRecord(
            station_id=obj["station_id"],
            name=obj["name"],
            location_id=obj["location_id"],
            form=form,
            formats=tuple(obj.get("formats", ())),
            genres=tuple(obj.get("genres", ())),
            website=obj.get("website"),
            review_status=ReviewStatus(obj.get("review_status", "unreviewed")),
            reliability_pct=obj.get("reliability_pct"),
        )
    if table == "events":
        return EventRecord(
            event_id=obj["event_id"],
            station_id=obj["station_id"],
            time_at_station=datetime.fromisoformat(obj["time_at_station"]),
            description=obj["description"],
            reliability=obj.get("reliability"),
            artist_id=obj.get("artist_id"),
            track_id=obj.get("track_id"),
        )
    if table == "artists":
        at = obj["artist_type"]
        members = obj.get("members")
        return ArtistRecord(
            artist_id=obj["artist_id"],
            name=obj["name"],
            artist_type=ArtistType(kind=at["kind"], detail=at.get("detail")),
            gender=obj.get("gender"),
            country=obj.get("country"),
            genres=tuple(obj.get("genres", ())),
            instruments=tuple(obj.get("instruments", ())),
            members=None
            if members is None
            else tuple(
                Member(name=m["name"], gender=m.get("gender"), ethnicity=m.get("ethnicity"))
                for m in members
            ),
        )
    if table == "tracks":
        km = obj.get("key_mode")
        ft = obj.get("features")
        return TrackRecord(
            track_id=obj["track_id"],
            title=obj["title"],
            duration_s=obj.get("duration_s"),
            year_released=obj.get("year_released"),
            key_mode=None if km is None else KeyMode(tonic=km["tonic"], mode=km["mode"]),
            language=obj.get("language"),
            features=None
            if ft is None
            else AudioFeatures(
                danceability=ft["danceability"],
                speechiness=ft["speechiness"],
                acousticness=ft["acousticness"],
                liveness=ft["liveness"],
                instrumentalness=ft["instrumentalness"],
                valence=ft["valence"],
                arousal=ft["arousal"],
            ),
            popularity=obj.get("popularity"),
            listen_urls=tuple(obj.get("listen_urls", ())),
        )
    raise KeyError(f"unknown table {table!r}")
