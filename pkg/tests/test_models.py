import dataclasses
from datetime import datetime, timedelta, timezone

import pytest

from radiometa.models import (
    ArtistRecord,
    ArtistType,
    AudioFeatures,
    Continent,
    DurationParseError,
    Member,
    ReviewStatus,
    StationForm,
    TrackRecord,
    continent_for_country,
    parse_duration,
    record_from_dict,
    record_to_dict,
    validate_record,
)

from conftest import (
    table2_artist,
    table2_event,
    table2_location,
    table2_station,
    table2_track,
)


class TestValidateRecord:
    def test_table2_records_valid(self):
        for record in (
            table2_location(),
            table2_station(),
            table2_event(),
            table2_artist(),
            table2_track(),
        ):
            assert validate_record(record) == []

    def test_webcast_with_frequency(self):
        station = dataclasses.replace(
            table2_station(), form=StationForm(kind="webcast", frequency=104.1)
        )
        violations = validate_record(station)
        assert len(violations) == 1
        assert "form" in violations[0]

    def test_latitude_out_of_range(self):
        loc = dataclasses.replace(table2_location(), coordinates=(103.0, 91.0))
        violations = validate_record(loc)
        assert len(violations) == 1
        assert "latitude" in violations[0]

    def test_longitude_out_of_range(self):
        loc = dataclasses.replace(table2_location(), coordinates=(-180.5, 0.0))
        assert any("longitude" in v for v in validate_record(loc))

    def test_continent_mismatch(self):
        loc = dataclasses.replace(table2_location(), continent=Continent.EUROPE)
        assert any("continent" in v for v in validate_record(loc))

    def test_unknown_country_code(self):
        loc = dataclasses.replace(table2_location(), country_code="ZZ")
        assert any("country_code" in v for v in validate_record(loc))

    def test_simulcast_needs_positive_frequency(self):
        station = dataclasses.replace(
            table2_station(), form=StationForm(kind="simulcast", frequency=None)
        )
        violations = validate_record(station)
        assert any("frequency" in v for v in violations)
        assert any("band" in v for v in violations)

    def test_reliability_pct_requires_reviewed(self):
        station = dataclasses.replace(table2_station(), reliability_pct=0.9)
        assert any("review_status" in v for v in validate_record(station))
        reviewed = dataclasses.replace(
            station, review_status=ReviewStatus.REVIEWED
        )
        assert validate_record(reviewed) == []

    def test_empty_description(self):
        assert any("description" in v for v in validate_record(table2_event(description="  ")))

    def test_reliability_range(self):
        assert any("reliability" in v for v in validate_record(table2_event(reliability=1.5)))

    def test_members_only_for_groups(self):
        solo = dataclasses.replace(
            table2_artist(), members=(Member(name="A"),)
        )
        assert any("members" in v for v in validate_record(solo))
        group = ArtistRecord(
            artist_id="ar-g",
            name="The Group",
            artist_type=ArtistType(kind="group"),
            members=(Member(name="A"), Member(name="B", gender="male")),
        )
        assert validate_record(group) == []

    def test_track_bounds(self):
        bad = dataclasses.replace(table2_track(), duration_s=0, year_released=1700)
        violations = validate_record(bad)
        assert any("duration_s" in v for v in violations)
        assert any("year_released" in v for v in violations)

    def test_features_within_unit_interval(self):
        bad = dataclasses.replace(
            table2_track(),
            features=AudioFeatures(1.2, 0.1, 0.1, 0.1, 0.1, 0.1, -0.2),
        )
        violations = validate_record(bad)
        assert any("danceability" in v for v in violations)
        assert any("arousal" in v for v in violations)

    def test_validation_is_deterministic(self):
        bad = dataclasses.replace(table2_location(), coordinates=(200.0, 95.0))
        assert validate_record(bad) == validate_record(bad)


class TestContinentTable:
    @pytest.mark.parametrize(
        "code,continent",
        [
            ("MY", Continent.ASIA),
            ("ID", Continent.ASIA),
            ("RU", Continent.EUROPE),
            ("TR", Continent.ASIA),
            ("US", Continent.NORTH_AMERICA),
            ("MX", Continent.NORTH_AMERICA),
            ("BR", Continent.SOUTH_AMERICA),
            ("NG", Continent.AFRICA),
            ("NZ", Continent.OCEANIA),
            ("IS", Continent.EUROPE),
        ],
    )
    def test_known_codes(self, code, continent):
        assert continent_for_country(code) is continent

    def test_unknown_code(self):
        assert continent_for_country("ZZ") is None

    def test_case_insensitive(self):
        assert continent_for_country("my") is Continent.ASIA


class TestParseDuration:
    def test_table2_duration(self):
        assert parse_duration("03:18") == 198

    def test_zero(self):
        assert parse_duration("00:00") == 0

    def test_with_hours(self):
        # 3600 + 2*60 + 3
        assert parse_duration("1:02:03") == 3723

    @pytest.mark.parametrize("bad", ["", "3:", ":18", "03:60", "1:60:00", "abc", "1:2:3:4"])
    def test_malformed(self, bad):
        with pytest.raises(DurationParseError):
            parse_duration(bad)

    def test_error_names_token(self):
        with pytest.raises(DurationParseError, match="60"):
            parse_duration("03:60")


class TestJsonRoundTrip:
    def test_all_tables_round_trip(self):
        cases = [
            ("locations", table2_location()),
            ("stations", table2_station()),
            ("events", table2_event()),
            ("artists", table2_artist()),
            ("tracks", table2_track()),
        ]
        for table, record in cases:
            obj = record_to_dict(record)
            assert record_from_dict(table, obj) == record

    def test_group_members_round_trip(self):
        group = ArtistRecord(
            artist_id="ar-g",
            name="Duo",
            artist_type=ArtistType(kind="group"),
            members=(Member(name="A", gender="female", ethnicity="x"), Member(name="B")),
        )
        assert record_from_dict("artists", record_to_dict(group)) == group

    def test_optional_track_fields_round_trip(self):
        bare = TrackRecord(track_id="t", title="Minimal")
        assert record_from_dict("tracks", record_to_dict(bare)) == bare

    def test_timestamp_offset_survives(self):
        event = table2_event(
            time_at_station=datetime(2022, 12, 28, 9, 37, tzinfo=timezone(timedelta(hours=8)))
        )
        back = record_from_dict("events", record_to_dict(event))
        assert back.time_at_station.utcoffset() == timedelta(hours=8)
