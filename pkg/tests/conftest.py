import random
import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from radiometa.models import (
    ArtistRecord,
    ArtistType,
    AudioFeatures,
    Band,
    Continent,
    EventRecord,
    KeyMode,
    LocationRecord,
    StationForm,
    StationRecord,
    TrackRecord,
)
from radiometa.store import CorpusStore

TZ_MY = timezone(timedelta(hours=8))

COUNTRIES = [
    ("Malaysia", "MY", Continent.ASIA, (103.6545, 1.4783), "Johor Bahru"),
    ("Indonesia", "ID", Continent.ASIA, (106.8456, -6.2088), "Jakarta"),
    ("Brazil", "BR", Continent.SOUTH_AMERICA, (-46.6333, -23.5505), "São Paulo"),
    ("Iceland", "IS", Continent.EUROPE, (-21.8277, 64.1283), "Reykjavík"),
    ("Nigeria", "NG", Continent.AFRICA, (3.3792, 6.5244), "Lagos"),
    ("New Zealand", "NZ", Continent.OCEANIA, (174.7633, -36.8485), "Auckland"),
    ("United States", "US", Continent.NORTH_AMERICA, (-106.4850, 31.7619), "El Paso"),
]

GENRES = ["pop", "rock", "jazz", "dangdut", "koplo", "news talk", "classical"]
LANGUAGES = ["Malay", "Indonesian", "English", "French", None]


def table2_location() -> LocationRecord:
    return LocationRecord(
        location_id="loc-jb",
        city="Johor Bahru",
        country="Malaysia",
        country_code="MY",
        continent=Continent.ASIA,
        coordinates=(103.6545, 1.4783),
        population=1_711_191,
        country_gdp=863e9,
    )


def table2_station() -> StationRecord:
    return StationRecord(
        station_id="st-bestfm",
        name="Best FM",
        location_id="loc-jb",
        form=StationForm.simulcast(Band.FM, 104.1),
        formats=("Adult Contemporary",),
        genres=("pop", "Indonesian pop"),
        website="http://www.bestfm.com.my",
    )


def table2_event(reliability: float | None = 1.0, **overrides) -> EventRecord:
    fields = dict(
        event_id="ev-bestfm-0",
        station_id="st-bestfm",
        time_at_station=datetime(2022, 12, 28, 9, 37, tzinfo=TZ_MY),
        description="Aisha Retno – Sutera",
        reliability=reliability,
    )
    fields.update(overrides)
    return EventRecord(**fields)


def table2_artist() -> ArtistRecord:
    return ArtistRecord(
        artist_id="ar-aisha",
        name="Aisha Retno",
        artist_type=ArtistType(kind="musical_artist"),
        gender="female",
        country="Malaysia",
        genres=("pop",),
        instruments=("piano", "voice"),
    )


def table2_track() -> TrackRecord:
    return TrackRecord(
        track_id="tr-sutera",
        title="Sutera",
        duration_s=198,
        year_released=2022,
        key_mode=KeyMode(tonic="C", mode="minor"),
        language="Malay",
        features=AudioFeatures(0.62, 0.05, 0.31, 0.12, 0.0, 0.48, 0.52),
        popularity=55.0,
        listen_urls=("https://play.example/aisha-retno/sutera",),
    )


@pytest.fixture
def table2_store() -> CorpusStore:
    store = CorpusStore()
    store.upsert(table2_location())
    store.upsert(table2_station())
    store.upsert(table2_artist())
    store.upsert(table2_track())
    store.upsert(table2_event(artist_id="ar-aisha", track_id="tr-sutera"))
    return store


def build_random_corpus(
    rng: random.Random,
    n_events: int,
    n_stations: int = 12,
    matched_fraction: float = 0.8,
) -> CorpusStore:
    """Synthetic corpus with varied countries, reliabilities, and enrichment."""
    store = CorpusStore()
    locations = []
    for i, (country, code, continent, (lon, lat), city) in enumerate(COUNTRIES):
        loc = LocationRecord(
            location_id=f"loc-{i}",
            city=city,
            country=country,
            country_code=code,
            continent=continent,
            coordinates=(lon + rng.uniform(-2, 2), lat + rng.uniform(-2, 2)),
            population=rng.randrange(1000, 10_000_000),
        )
        locations.append(loc)
        store.upsert(loc)
    stations = []
    for i in range(n_stations):
        loc = locations[i % len(locations)]
        st = StationRecord(
            station_id=f"st-{i:03d}",
            name=f"Station {i:03d}",
            location_id=loc.location_id,
            form=StationForm.webcast()
            if i % 2
            else StationForm.simulcast(Band.FM, 88.0 + i),
            formats=("Top 40",),
            genres=tuple(rng.sample(GENRES, 2)),
            website=f"http://st{i}.example",
        )
        stations.append(st)
        store.upsert(st)
    artists = []
    tracks = []
    for i in range(max(4, n_events // 12)):
        country, *_ = COUNTRIES[rng.randrange(len(COUNTRIES))]
        artist = ArtistRecord(
            artist_id=f"ar-{i:04d}",
            name=f"Artist {i:04d}",
            artist_type=ArtistType(kind="group" if i % 5 == 0 else "musical_artist"),
            country=country,
            genres=tuple(rng.sample(GENRES, 2)),
            members=None,
        )
        track = TrackRecord(
            track_id=f"tr-{i:04d}",
            title=f"Track {i:04d}",
            duration_s=rng.randrange(90, 500),
            year_released=rng.randrange(1955, 2023),
            language=rng.choice(LANGUAGES),
            features=AudioFeatures(*(round(rng.random(), 4) for _ in range(7))),
            popularity=round(rng.random() * 100, 2),
        )
        artists.append(artist)
        tracks.append(track)
        store.upsert(artist)
        store.upsert(track)
    base = datetime(2022, 10, 1, tzinfo=timezone.utc)
    for i in range(n_events):
        st = stations[rng.randrange(len(stations))]
        offset_tz = timezone(timedelta(hours=rng.randrange(-11, 13)))
        when = (base + timedelta(minutes=rng.randrange(0, 200_000))).astimezone(offset_tz)
        matched = rng.random() < matched_fraction
        artist = artists[rng.randrange(len(artists))] if matched else None
        track = tracks[rng.randrange(len(tracks))] if matched else None
        store.upsert(
            EventRecord(
                event_id=f"ev-{i:06d}",
                station_id=st.station_id,
                time_at_station=when,
                description=f"Artist {i % 37:04d} – Track {i % 53:04d}",
                reliability=round(rng.random(), 4) if matched else None,
                artist_id=artist.artist_id if artist else None,
                track_id=track.track_id if track else None,
            )
        )
    return store
