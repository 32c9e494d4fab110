import dataclasses
import random
from datetime import datetime, timedelta, timezone

import pytest

from radiometa.clock import SimClock
from radiometa.models import ReviewStatus, StationForm, Band
from radiometa.store import (
    CorpusStore,
    EventFilter,
    IntegrityError,
    NotFoundError,
    UndefinedReliabilityError,
    ValidationError,
    view_to_store,
)

from conftest import (
    build_random_corpus,
    table2_event,
    table2_location,
    table2_station,
)


def brute_force_query(store, flt, limit=None):
    """Scan + filter + sort oracle, written independently of query_events."""
    rows = []
    for event in store.events.values():
        station = store.stations[event.station_id]
        location = store.locations[station.location_id]
        artist = store.artists.get(event.artist_id) if event.artist_id else None
        track = store.tracks.get(event.track_id) if event.track_id else None
        if flt.station_id is not None and event.station_id != flt.station_id:
            continue
        if flt.country is not None and location.country != flt.country:
            continue
        if flt.city is not None and location.city != flt.city:
            continue
        if flt.min_reliability is not None and (
            event.reliability is None or event.reliability < flt.min_reliability
        ):
            continue
        if flt.date_range is not None:
            start, end = flt.date_range
            if not (start <= event.time_at_station <= end):
                continue
        if flt.text_query is not None:
            q = flt.text_query.casefold()
            candidates = [event.description.casefold()]
            if artist:
                candidates.append(artist.name.casefold())
            if track:
                candidates.append(track.title.casefold())
            if not any(q in c for c in candidates):
                continue
        if flt.genre is not None:
            g = flt.genre.casefold()
            pool = [x.casefold() for x in station.genres]
            if artist:
                pool += [x.casefold() for x in artist.genres]
            if g not in pool:
                continue
        if flt.artist_country is not None:
            if artist is None or artist.country != flt.artist_country:
                continue
        rows.append(event)
    rows.sort(key=lambda e: (-e.time_at_station.timestamp(), e.event_id))
    if limit is not None:
        rows = rows[:limit]
    return [e.event_id for e in rows]


class TestUpsert:
    def test_linked_insert_and_join(self, table2_store):
        rows = table2_store.query_events(EventFilter())
        assert len(rows) == 1
        row = rows[0]
        assert row.station.name == "Best FM"
        assert row.location.city == "Johor Bahru"
        assert row.artist.name == "Aisha Retno"
        assert row.track.title == "Sutera"

    def test_idempotent(self):
        store = CorpusStore()
        store.upsert(table2_location())
        store.upsert(table2_station())
        store.upsert(table2_event())
        before = dict(store.events)
        store.upsert(table2_event())
        assert store.events == before
        assert len(store.query_events(EventFilter())) == 1

    def test_dangling_station_reference(self):
        store = CorpusStore()
        with pytest.raises(IntegrityError, match="st-bestfm"):
            store.upsert(table2_event())

    def test_dangling_artist_reference(self):
        store = CorpusStore()
        store.upsert(table2_location())
        store.upsert(table2_station())
        with pytest.raises(IntegrityError, match="ar-missing"):
            store.upsert(table2_event(artist_id="ar-missing"))

    def test_invalid_record_rejected(self):
        store = CorpusStore()
        bad = dataclasses.replace(table2_location(), coordinates=(0.0, 95.0))
        with pytest.raises(ValidationError):
            store.upsert(bad)


class TestQueryEvents:
    def test_country_filter_matches_oracle(self):
        store = build_random_corpus(random.Random(0), 400)
        flt = EventFilter(country="Indonesia")
        got = [r.event.event_id for r in store.query_events(flt, limit=1000)]
        assert got == brute_force_query(store, flt, 1000)
        assert got  # non-vacuous

    def test_empty_filter_returns_all_newest_first(self):
        store = build_random_corpus(random.Random(1), 600)
        rows = store.query_events(EventFilter(), limit=1000)
        assert len(rows) == 600
        ids = [r.event.event_id for r in rows]
        assert ids == brute_force_query(store, EventFilter())
        times = [r.event.time_at_station.timestamp() for r in rows]
        assert times == sorted(times, reverse=True)

    def test_min_reliability_boundary(self):
        store = build_random_corpus(random.Random(2), 300)
        flt = EventFilter(min_reliability=0.90)
        got = store.query_events(flt, limit=1000)
        assert [r.event.event_id for r in got] == brute_force_query(store, flt, 1000)
        for row in got:
            assert row.event.reliability >= 0.90

    def test_limit_cap(self):
        store = build_random_corpus(random.Random(3), 1200)
        rows = store.query_events(EventFilter(), limit=1000)
        assert len(rows) == 1000
        assert [r.event.event_id for r in rows] == brute_force_query(
            store, EventFilter(), 1000
        )

    def test_random_filters_match_oracle(self):
        rng = random.Random(4)
        store = build_random_corpus(rng, 500)
        base = datetime(2022, 10, 1, tzinfo=timezone.utc)
        filters = [
            EventFilter(city="Jakarta"),
            EventFilter(station_id="st-003"),
            EventFilter(text_query="track 00"),
            EventFilter(genre="dangdut"),
            EventFilter(artist_country="Brazil"),
            EventFilter(date_range=(base, base + timedelta(days=30))),
            EventFilter(country="Malaysia", min_reliability=0.5),
            EventFilter(text_query="Artist", min_reliability=0.25, country="Iceland"),
        ]
        for flt in filters:
            got = [r.event.event_id for r in store.query_events(flt, limit=100_000)]
            assert got == brute_force_query(store, flt), flt

    def test_bad_date_range_rejected(self):
        base = datetime(2022, 10, 1, tzinfo=timezone.utc)
        with pytest.raises(ValueError):
            CorpusStore().query_events(
                EventFilter(date_range=(base, base - timedelta(days=1)))
            )

    def test_limit_must_be_positive(self):
        with pytest.raises(ValueError):
            CorpusStore().query_events(EventFilter(), limit=0)


class TestReliableSubset:
    def build(self, reliabilities):
        store = CorpusStore()
        store.upsert(table2_location())
        store.upsert(table2_station())
        for i, rel in enumerate(reliabilities):
            store.upsert(
                table2_event(
                    event_id=f"ev-{i}",
                    reliability=rel,
                    time_at_station=datetime(2022, 12, 28, 9, 37, tzinfo=timezone.utc)
                    + timedelta(minutes=i),
                )
            )
        return store

    def test_known_reliabilities(self):
        store = self.build([0.95, 0.90, 0.89])
        view = store.reliable_subset(0.90)
        assert set(view.events) == {"ev-0", "ev-1"}

    def test_zero_threshold_keeps_all_matched(self):
        store = self.build([0.0, 0.5, None, 1.0])
        view = store.reliable_subset(0.0)
        assert set(view.events) == {"ev-0", "ev-1", "ev-3"}

    def test_full_threshold_keeps_exact_only(self):
        store = self.build([1.0, 0.9999, 0.5])
        view = store.reliable_subset(1.0)
        assert set(view.events) == {"ev-0"}

    def test_monotone_in_threshold(self):
        store = build_random_corpus(random.Random(5), 300)
        for t1, t2 in [(0.0, 0.5), (0.5, 0.9), (0.9, 1.0)]:
            wide = set(store.reliable_subset(t1).events)
            narrow = set(store.reliable_subset(t2).events)
            assert narrow <= wide

    def test_closure_resolves_internally(self):
        store = build_random_corpus(random.Random(6), 400)
        view = store.reliable_subset(0.7)
        for event in view.events.values():
            assert event.station_id in view.stations
            station = view.stations[event.station_id]
            assert station.location_id in view.locations
            if event.artist_id is not None:
                assert event.artist_id in view.artists
            if event.track_id is not None:
                assert event.track_id in view.tracks

    def test_view_to_store_round_trip(self):
        store = build_random_corpus(random.Random(7), 200)
        view = store.reliable_subset(0.9)
        sub = view_to_store(view)
        assert set(sub.events) == set(view.events)


class TestReviewStation:
    def test_name_fix_flips_status(self, table2_store):
        updated = table2_store.review_station("st-bestfm", {"name": "Best FM"})
        assert updated.review_status is ReviewStatus.REVIEWED
        assert updated.name == "Best FM"

    def test_empty_edits_still_review(self, table2_store):
        updated = table2_store.review_station("st-bestfm", {})
        assert updated.review_status is ReviewStatus.REVIEWED
        assert len(table2_store.review_history) == 1

    def test_genre_extension(self, table2_store):
        updated = table2_store.review_station(
            "st-bestfm", {"genres": ["pop", "Indonesian pop", "Malay pop"]}
        )
        assert updated.genres == ("pop", "Indonesian pop", "Malay pop")

    def test_city_edit_lands_on_location(self, table2_store):
        table2_store.review_station("st-bestfm", {"city": "Johor Bahru City"})
        assert table2_store.locations["loc-jb"].city == "Johor Bahru City"

    def test_form_edit(self, table2_store):
        updated = table2_store.review_station(
            "st-bestfm", {"form": {"kind": "simulcast", "band": "AM", "frequency": 1040}}
        )
        assert updated.form == StationForm.simulcast(Band.AM, 1040)

    def test_history_records_old_and_new(self, table2_store):
        table2_store.review_station("st-bestfm", {"name": "BEST FM"})
        entry = table2_store.review_history[-1]
        assert entry.station_id == "st-bestfm"
        assert entry.fields_changed["name"] == ("Best FM", "BEST FM")

    def test_unknown_station(self, table2_store):
        with pytest.raises(NotFoundError):
            table2_store.review_station("st-none", {})

    def test_unknown_field_rejected(self, table2_store):
        with pytest.raises(ValueError, match="reliability_pct"):
            table2_store.review_station("st-bestfm", {"reliability_pct": 1.0})


class TestStationReliability:
    def test_counting(self):
        store = CorpusStore()
        store.upsert(table2_location())
        store.upsert(table2_station())
        rels = [1.0] * 9 + [0.2]
        for i, rel in enumerate(rels):
            store.upsert(table2_event(event_id=f"ev-{i}", reliability=rel))
        pct = store.compute_station_reliability("st-bestfm", 0.90)
        assert pct == 0.9
        assert store.stations["st-bestfm"].reliability_pct == 0.9
        assert store.stations["st-bestfm"].review_status is ReviewStatus.REVIEWED

    def test_all_reliable(self, table2_store):
        assert table2_store.compute_station_reliability("st-bestfm") == 1.0

    def test_no_matched_events_is_error(self):
        store = CorpusStore()
        store.upsert(table2_location())
        store.upsert(table2_station())
        store.upsert(table2_event(reliability=None))
        with pytest.raises(UndefinedReliabilityError):
            store.compute_station_reliability("st-bestfm")


class TestPersistence:
    def test_sqlite_survives_reopen(self, tmp_path):
        db = tmp_path / "corpus.db"
        store = CorpusStore(db)
        store.upsert(table2_location())
        store.upsert(table2_station())
        store.upsert(table2_event())
        store.review_station("st-bestfm", {"name": "Best FM!"})
        store.close()

        again = CorpusStore(db)
        assert again.stations["st-bestfm"].name == "Best FM!"
        assert len(again.events) == 1
        assert len(again.review_history) == 1
        again.close()

    def test_export_import_bit_identical(self, tmp_path):
        store = build_random_corpus(random.Random(8), 250)
        first = tmp_path / "dump1"
        store.export_dir(first)

        clone = CorpusStore()
        clone.import_dir(first)
        second = tmp_path / "dump2"
        clone.export_dir(second)

        for name in sorted(p.name for p in first.iterdir()):
            assert (first / name).read_bytes() == (second / name).read_bytes(), name

    def test_import_rejects_checksum_mismatch(self, tmp_path):
        store = build_random_corpus(random.Random(9), 50)
        dump = tmp_path / "dump"
        store.export_dir(dump)
        target = dump / "events.ndjson"
        target.write_bytes(target.read_bytes() + b"\n")
        with pytest.raises(ValueError, match="checksum"):
            CorpusStore().import_dir(dump)

    def test_import_rejects_foreign_directory(self, tmp_path):
        (tmp_path / "manifest.json").write_text('{"format": "other"}')
        with pytest.raises(ValueError, match="not a corpus"):
            CorpusStore().import_dir(tmp_path)


class TestReviewClock:
    def test_injected_clock_stamps_history(self):
        start = datetime(2024, 3, 1, 12, 0, tzinfo=timezone.utc)
        store = CorpusStore(clock=SimClock(start))
        store.upsert(table2_location())
        store.upsert(table2_station())
        store.review_station("st-bestfm", {})
        assert store.review_history[0].at == start
