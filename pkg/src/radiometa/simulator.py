"""Deterministic scripted radio fleet served over HTTP.

Each station replays a timeline of payload entries; the ``/stations/{id}/now``
endpoint answers with one metadata frame for the current script position.
Requests may carry ``?t=<seconds>`` so monitors driven by accelerated clocks
get their own deterministic position; without it the server's injected clock
decides. ``offline`` entries abort the connection to imitate a dead station.
"""

from __future__ import annotations

import json
import random
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from . import icy
from .clock import Clock, RealClock
from .models import (
    Continent,
    LocationRecord,
    StationForm,
    Band,
    StationRecord,
    record_to_dict,
)

PAYLOAD_KINDS = ("title", "advert", "blank", "offline")


@dataclass(frozen=True)
class ScriptEntry:
    start_offset_s: float
    kind: str  # one of PAYLOAD_KINDS
    text: str = ""


@dataclass(frozen=True)
class ScenarioScript:
    station_id: str
    timeline: tuple[ScriptEntry, ...]
    loop: bool = False
    total_duration_s: float | None = None  # loop period; defaults past the last entry

    def __post_init__(self):
        if not self.timeline:
            raise ValueError("timeline must be nonempty")
        offsets = [e.start_offset_s for e in self.timeline]
        if offsets[0] != 0:
            raise ValueError("first timeline entry must start at offset 0")
        if any(b <= a for a, b in zip(offsets, offsets[1:])):
            raise ValueError("timeline offsets must be strictly increasing")
        for e in self.timeline:
            if e.kind not in PAYLOAD_KINDS:
                raise ValueError(f"unknown payload kind {e.kind!r}")
        if self.total_duration_s is not None and self.total_duration_s <= offsets[-1]:
            raise ValueError("total_duration_s must exceed the last entry offset")

    @property
    def period_s(self) -> float:
        if self.total_duration_s is not None:
            return self.total_duration_s
        return self.timeline[-1].start_offset_s + 30.0


def payload_at(script: ScenarioScript, t_s: float) -> ScriptEntry:
    """Entry active at ``t_s`` seconds: modular when looping, clamped otherwise."""
    if t_s < 0:
        raise ValueError("t_s must be >= 0")
    t = t_s % script.period_s if script.loop else t_s
    active = script.timeline[0]
    for entry in script.timeline:
        if entry.start_offset_s <= t:
            active = entry
        else:
            break
    return active


def script_to_dict(script: ScenarioScript) -> dict:
    return {
        "station_id": script.station_id,
        "loop": script.loop,
        "total_duration_s": script.total_duration_s,
        "timeline": [
            {"t": e.start_offset_s, "kind": e.kind, "text": e.text}
            for e in script.timeline
        ],
    }


def script_from_dict(obj: dict) -> ScenarioScript:
    return ScenarioScript(
        station_id=obj["station_id"],
        timeline=tuple(
            ScriptEntry(start_offset_s=e["t"], kind=e["kind"], text=e.get("text", ""))
            for e in obj["timeline"]
        ),
        loop=obj.get("loop", False),
        total_duration_s=obj.get("total_duration_s"),
    )


class FleetServer:
    """HTTP fleet for a set of scripts, with an optional station directory.

    ``GET /stations/{id}/now[?t=..]`` returns a raw metadata frame;
    ``GET /stations`` lists fixture location/station records when provided.
    """

    def __init__(
        self,
        scripts: list[ScenarioScript],
        clock: Clock | None = None,
        records: dict | None = None,
        port: int = 0,
    ):
        ids = [s.station_id for s in scripts]
        if len(set(ids)) != len(ids):
            raise ValueError("station ids must be unique")
        self.scripts = {s.station_id: s for s in scripts}
        self.clock = clock or RealClock()
        self.records = records
        fleet = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, fmt, *args):  # keep test output quiet
                pass

            def do_GET(self):
                parsed = urlparse(self.path)
                parts = [p for p in parsed.path.split("/") if p]
                if parts == ["stations"]:
                    self._send_directory()
                    return
                if len(parts) == 3 and parts[0] == "stations" and parts[2] == "now":
                    self._send_now(parts[1], parsed.query)
                    return
                self.send_error(404)

            def _send_directory(self):
                if fleet.records is None:
                    self.send_error(404, "no station directory configured")
                    return
                body = json.dumps(fleet.records).encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "application/json; charset=utf-8")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def _send_now(self, station_id: str, query: str):
                script = fleet.scripts.get(station_id)
                if script is None:
                    self.send_error(404, f"unknown station {station_id}")
                    return
                params = parse_qs(query)
                t = float(params["t"][0]) if "t" in params else fleet.clock.elapsed_s()
                entry = payload_at(script, t)
                if entry.kind == "offline":
                    # Drop the connection without a response, like a dead host.
                    self.close_connection = True
                    self.connection.close()
                    return
                if entry.kind == "blank":
                    body = b"\x00"
                else:
                    body = icy.encode_metadata_block(entry.text)
                self.send_response(200)
                self.send_header("Content-Type", "application/octet-stream")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

        self._server = ThreadingHTTPServer(("127.0.0.1", port), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "FleetServer":
        if not self._thread.is_alive():
            self._thread.start()
        return self

    def close(self) -> None:
        self._server.shutdown()
        self._server.server_close()

    def __enter__(self) -> "FleetServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.close()


def serve_fleet(
    scripts: list[ScenarioScript],
    clock: Clock | None = None,
    records: dict | None = None,
    port: int = 0,
) -> FleetServer:
    """Start a fleet server and return its running handle."""
    return FleetServer(scripts, clock=clock, records=records, port=port).start()


class LibraryServer:
    """Fixture music library over HTTP: GET /search?q=.. -> candidate JSON."""

    def __init__(self, search_backend, port: int = 0):
        from .matching import candidate_to_dict

        backend = search_backend

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, fmt, *args):
                pass

            def do_GET(self):
                parsed = urlparse(self.path)
                if parsed.path != "/search":
                    self.send_error(404)
                    return
                params = parse_qs(parsed.query)
                query = params.get("q", [""])[0]
                body = json.dumps(
                    [candidate_to_dict(c) for c in backend.search(query)]
                ).encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "application/json; charset=utf-8")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

        self._server = ThreadingHTTPServer(("127.0.0.1", port), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "LibraryServer":
        if not self._thread.is_alive():
            self._thread.start()
        return self

    def close(self) -> None:
        self._server.shutdown()
        self._server.server_close()

    def __enter__(self) -> "LibraryServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.close()


# --- scenario generation

_ARTIST_POOL = (
    "Aisha Retno",
    "Café Nova",
    "Los Páramos",
    "Nadia Villanueva",
    "The Harbour Lights",
    "Björn Selig",
    "Mirah Tan",
    "Côte Sauvage",
    "Anggraini",
    "Stellan Morré",
)

_AD_TEXTS = (
    "ADVERTISEMENT BREAK",
    "Commercial Break - back soon",
    "Station ID jingle",
    "UNKNOWN",
)

_CITIES = (
    ("Johor Bahru", "Malaysia", "MY", (103.6545, 1.4783)),
    ("Jakarta", "Indonesia", "ID", (106.8456, -6.2088)),
    ("Lagos", "Nigeria", "NG", (3.3792, 6.5244)),
    ("São Paulo", "Brazil", "BR", (-46.6333, -23.5505)),
    ("Reykjavík", "Iceland", "IS", (-21.8277, 64.1283)),
    ("El Paso", "United States", "US", (-106.4850, 31.7619)),
    ("Auckland", "New Zealand", "NZ", (174.7633, -36.8485)),
    ("Tbilisi", "Georgia", "GE", (44.7833, 41.7167)),
)

_GENRE_POOL = (
    "pop", "Indonesian pop", "pop-rock", "alternative rock", "dangdut",
    "koplo", "jazz", "news talk", "top 40", "classical",
)


def _blackout_aligned(offset_s: float, half_width_min: int = 5) -> bool:
    minute = int(offset_s // 60) % 60
    w = half_width_min
    return minute >= 60 - w or minute < w or 30 - w <= minute < 30 + w


def generate_script(
    station_id: str,
    entries: int,
    rng: random.Random,
    ad_fraction: float = 0.2,
    loop: bool = True,
) -> ScenarioScript:
    """Random timeline with advertising clustered near :00/:30 offsets.

    Entry kinds are drawn so that roughly ``ad_fraction`` of entries are
    ads or blanks, with a strong bias toward offsets inside the blackout
    windows (assuming monitoring starts on an hour boundary).
    """
    # Windows cover a third of each hour; solve the two probabilities so the
    # expected ad share matches ad_fraction with a 10x in-window bias.
    p_out = 3 * ad_fraction / 13
    p_in = 10 * p_out
    timeline: list[ScriptEntry] = []
    offset = 0.0
    titles_used: list[str] = []
    for i in range(entries):
        in_window = _blackout_aligned(offset)
        is_ad = rng.random() < (p_in if in_window else p_out)
        if is_ad:
            if rng.random() < 1 / 3:
                timeline.append(ScriptEntry(offset, "blank"))
            else:
                timeline.append(ScriptEntry(offset, "advert", rng.choice(_AD_TEXTS)))
        else:
            if titles_used and rng.random() < 0.08:
                text = rng.choice(titles_used)  # non-consecutive repeat
            else:
                artist = rng.choice(_ARTIST_POOL)
                text = f"{artist} – Song {station_id[-2:]}{i:03d}"
                titles_used.append(text)
            timeline.append(ScriptEntry(offset, "title", text))
        offset += rng.choice((90, 120, 150, 180, 210, 240))
    return ScenarioScript(
        station_id=station_id,
        timeline=tuple(timeline),
        loop=loop,
        total_duration_s=offset,
    )


def generate_fixture_records(n_stations: int, rng: random.Random) -> dict:
    """Locations and stations for a generated fleet, as interchange JSON."""
    locations = []
    stations = []
    for city, country, code, coords in _CITIES:
        locations.append(
            LocationRecord(
                location_id=f"loc-{code.lower()}",
                city=city,
                country=country,
                country_code=code,
                continent=Continent(_continent_of(code)),
                coordinates=coords,
                population=rng.randrange(100_000, 20_000_000),
                country_gdp=float(rng.randrange(10, 2_000)) * 1e9,
            )
        )
    for i in range(n_stations):
        loc = locations[i % len(locations)]
        simulcast = i % 3 == 0
        stations.append(
            StationRecord(
                station_id=f"st-{i:03d}",
                name=f"Signal {i:03d} {loc.city}",
                location_id=loc.location_id,
                form=StationForm.simulcast(Band.FM, round(87.5 + i * 0.4, 1))
                if simulcast
                else StationForm.webcast(),
                formats=("Adult Contemporary",) if i % 2 == 0 else ("Top 40",),
                genres=tuple(rng.sample(_GENRE_POOL, 2)),
                website=f"http://signal{i:03d}.example",
            )
        )
    return {
        "locations": [record_to_dict(r) for r in locations],
        "stations": [record_to_dict(r) for r in stations],
    }


def _continent_of(code: str) -> str:
    from .models import continent_for_country

    continent = continent_for_country(code)
    assert continent is not None
    return continent.value


def generate_library_fixture(scripts: list[ScenarioScript], rng: random.Random) -> list[dict]:
    """Candidate entries covering every scripted title, with enrichment blobs."""
    from .monitor import split_description

    seen: dict[tuple[str, str], dict] = {}
    for script in scripts:
        for entry in script.timeline:
            if entry.kind != "title":
                continue
            artist, title = split_description(entry.text)
            if artist is None or title is None:
                artist, title = "Various", entry.text
            key = (artist, title)
            if key in seen:
                continue
            year = rng.randrange(1968, 2023)
            seen[key] = {
                "library": "fixture",
                "candidate_artist": artist,
                "candidate_title": title,
                "release_date": f"{year}-{rng.randrange(1, 13):02d}-{rng.randrange(1, 29):02d}",
                "payload": {
                    "artist": {
                        "name": artist,
                        "type": "musical_artist",
                        "gender": rng.choice(("female", "male", None)),
                        "country": rng.choice(
                            ("Malaysia", "Indonesia", "Brazil", "Iceland", "USA", "Nigeria")
                        ),
                        "genres": rng.sample(_GENRE_POOL, 2),
                        "instruments": rng.sample(
                            ("piano", "voice", "guitar", "drums", "synth"), 2
                        ),
                    },
                    "track": {
                        "title": title,
                        "duration_s": rng.randrange(120, 420),
                        "year_released": year,
                        "key_mode": {
                            "tonic": rng.choice(("C", "D", "E", "F", "G", "A", "B")),
                            "mode": rng.choice(("major", "minor")),
                        },
                        "language": rng.choice(("Malay", "Indonesian", "English", "French")),
                        "features": {
                            "danceability": round(rng.random(), 3),
                            "speechiness": round(rng.random(), 3),
                            "acousticness": round(rng.random(), 3),
                            "liveness": round(rng.random(), 3),
                            "instrumentalness": round(rng.random(), 3),
                            "valence": round(rng.random(), 3),
                            "arousal": round(rng.random(), 3),
                        },
                        "popularity": round(rng.random() * 100, 1),
                        "listen_urls": [
                            f"https://play.example/{artist.replace(' ', '-')}/{title.replace(' ', '-')}"
                        ],
                    },
                },
            }
    return list(seen.values())
