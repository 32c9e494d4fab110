import random

import pytest
from fastapi.testclient import TestClient

from radiometa.exports import ShareState, encode_share_url, parse_csv
from radiometa.service import create_app
from radiometa.store import EventFilter

from conftest import build_random_corpus


@pytest.fixture(scope="module")
def corpus():
    return build_random_corpus(random.Random(32), 400)


@pytest.fixture(scope="module")
def client(corpus):
    return TestClient(create_app(corpus))


class TestStations:
    def test_pagination_walks_everything(self, client, corpus):
        seen = []
        cursor = None
        while True:
            params = {"limit": 5}
            if cursor:
                params["cursor"] = cursor
            page = client.get("/v1/stations", params=params).json()
            seen.extend(item["station"]["station_id"] for item in page["items"])
            cursor = page["next_cursor"]
            if cursor is None:
                break
        assert seen == sorted(corpus.stations)

    def test_country_filter(self, client, corpus):
        page = client.get("/v1/stations", params={"country": "Indonesia"}).json()
        for item in page["items"]:
            assert item["location"]["country"] == "Indonesia"

    def test_bad_cursor(self, client):
        resp = client.get("/v1/stations", params={"cursor": "garbage!"})
        assert resp.status_code == 400


class TestEvents:
    def test_matches_store_query(self, client, corpus):
        resp = client.get("/v1/events", params={"country": "Brazil", "limit": 50})
        assert resp.status_code == 200
        body = resp.json()
        expected = corpus.query_events(EventFilter(country="Brazil"), limit=50)
        assert [item["event"]["event_id"] for item in body["items"]] == [
            r.event.event_id for r in expected
        ]

    def test_rows_are_joined(self, client):
        item = client.get("/v1/events", params={"limit": 1}).json()["items"][0]
        assert {"event", "station", "location", "artist", "track"} <= set(item)

    def test_cursor_pagination(self, client, corpus):
        first = client.get("/v1/events", params={"limit": 30}).json()
        second = client.get(
            "/v1/events", params={"limit": 30, "cursor": first["next_cursor"]}
        ).json()
        all_expected = corpus.query_events(EventFilter(), limit=60)
        got = [i["event"]["event_id"] for i in first["items"] + second["items"]]
        assert got == [r.event.event_id for r in all_expected]

    def test_since_until(self, client, corpus):
        resp = client.get(
            "/v1/events",
            params={
                "since": "2022-10-01T00:00:00+00:00",
                "until": "2022-10-20T00:00:00+00:00",
                "limit": 10_000,
            },
        )
        ids = {i["event"]["event_id"] for i in resp.json()["items"]}
        from datetime import datetime, timezone

        flt = EventFilter(
            date_range=(
                datetime(2022, 10, 1, tzinfo=timezone.utc),
                datetime(2022, 10, 20, tzinfo=timezone.utc),
            )
        )
        assert ids == {r.event.event_id for r in corpus.query_events(flt, limit=10_000)}

    def test_naive_timestamp_rejected(self, client):
        resp = client.get(
            "/v1/events",
            params={"since": "2022-10-01T00:00:00", "until": "2022-10-02T00:00:00"},
        )
        assert resp.status_code == 400

    def test_detail_sections(self, client, corpus):
        event_id = next(
            e.event_id for e in corpus.events.values() if e.artist_id is not None
        )
        detail = client.get(f"/v1/events/{event_id}").json()
        assert {"station", "event", "artist", "track", "listen_links", "links"} <= set(detail)
        assert detail["station"]["location"]["city"]
        assert detail["links"]["station_website"].startswith("http")

    def test_detail_unmatched_event(self, client, corpus):
        event_id = next(
            (e.event_id for e in corpus.events.values() if e.artist_id is None), None
        )
        assert event_id is not None
        detail = client.get(f"/v1/events/{event_id}").json()
        assert detail["artist"] is None and detail["track"] is None

    def test_unknown_event_404(self, client):
        assert client.get("/v1/events/ev-none").status_code == 404


class TestAggEndpoints:
    def test_hexbin_conservation(self, client, corpus):
        for res in (2.0, 6.0):
            body = client.get("/v1/agg/hexbin", params={"res": res}).json()
            assert sum(b["station_count"] for b in body["bins"]) == len(corpus.stations)

    def test_map_selected_flag(self, client, corpus):
        some_event = next(iter(corpus.events))
        body = client.get(
            "/v1/agg/map", params={"radius": 0.0, "selected": some_event}
        ).json()
        assert sum(1 for d in body["dots"] if d["contains_selected"]) == 1

    def test_bar_counts(self, client, corpus):
        body = client.get("/v1/agg/bar", params={"by": "country", "k": 3}).json()
        assert len(body["bars"]) <= 3
        assert body["bars"] == sorted(
            body["bars"], key=lambda b: (-b["count"], b["label"])
        )

    def test_bar_unknown_field(self, client):
        assert client.get("/v1/agg/bar", params={"by": "nope"}).status_code == 400

    def test_histogram(self, client):
        body = client.get(
            "/v1/agg/hist", params={"field": "year_released", "bins": 6}
        ).json()
        assert len(body["bins"]) == 6

    def test_scatter_arousal_valence(self, client):
        body = client.get(
            "/v1/agg/scatter", params={"x": "arousal", "y": "valence"}
        ).json()
        assert body["points"]
        for point in body["points"]:
            assert 0.0 <= point["x"] <= 1.0 and 0.0 <= point["y"] <= 1.0

    def test_pca_shape(self, client):
        body = client.get("/v1/agg/pca").json()
        assert body["feature_fields"] == [
            "danceability",
            "speechiness",
            "acousticness",
            "liveness",
            "instrumentalness",
        ]
        assert len(body["components"]) == 2
        assert len(body["components"][0]) == 5
        assert body["explained_variance"][0] >= body["explained_variance"][1]
        assert body["points"]

    def test_pca_insufficient_data(self, client):
        resp = client.get("/v1/agg/pca", params={"q": "no-such-description"})
        assert resp.status_code == 409

    def test_agg_respects_filters(self, client, corpus):
        body = client.get("/v1/agg/bar", params={"by": "country", "country": "Iceland"}).json()
        assert all(b["label"] == "Iceland" for b in body["bars"])


class TestExportEndpoint:
    def test_csv_full(self, client, corpus):
        resp = client.get("/v1/export/csv", params={"scope": "full"})
        assert resp.status_code == 200
        assert resp.headers["content-type"].startswith("text/csv")
        header, rows = parse_csv(resp.content)
        assert len(rows) == len(corpus.events)

    def test_csv_reliable_counts(self, client, corpus):
        resp = client.get("/v1/export/csv", params={"scope": "reliable"})
        _, rows = parse_csv(resp.content)
        expected = sum(
            1
            for e in corpus.events.values()
            if e.reliability is not None and e.reliability >= 0.90
        )
        assert len(rows) == expected

    def test_csv_public_domain(self, client):
        resp = client.get("/v1/export/csv", params={"scope": "public-domain"})
        header, _ = parse_csv(resp.content)
        assert "danceability" not in header and "description" in header

    def test_unknown_scope(self, client):
        assert client.get("/v1/export/csv", params={"scope": "all"}).status_code == 400


class TestShareEndpoints:
    def test_post_then_get_round_trip(self, client):
        state = ShareState(
            filter=EventFilter(country="Indonesia", min_reliability=0.9),
            selected_event_ids=("ev-000001",),
            panel_layout="wide",
            language="id",
        )
        code = client.post("/v1/share", json=state.to_dict()).json()["code"]
        assert code == encode_share_url(state)
        decoded = client.get("/v1/share", params={"code": code}).json()
        assert decoded == state.to_dict()

    def test_bad_code_rejected(self, client):
        assert client.get("/v1/share", params={"code": "zzz"}).status_code == 400

    def test_bad_state_rejected(self, client):
        resp = client.post(
            "/v1/share", json={"filter": {"date_range": ["2022-01-02", "bogus"]}}
        )
        assert resp.status_code == 400

    def test_share_reproduces_query(self, client, corpus):
        state = ShareState(filter=EventFilter(country="Brazil"))
        code = client.post("/v1/share", json=state.to_dict()).json()["code"]
        decoded = client.get("/v1/share", params={"code": code}).json()
        resp = client.get(
            "/v1/events", params={"country": decoded["filter"]["country"], "limit": 10_000}
        )
        expected = corpus.query_events(EventFilter(country="Brazil"), limit=10_000)
        assert [i["event"]["event_id"] for i in resp.json()["items"]] == [
            r.event.event_id for r in expected
        ]


class TestReviewEndpoint:
    def test_review_post(self, corpus):
        client = TestClient(create_app(corpus))
        station_id = sorted(corpus.stations)[0]
        resp = client.post(
            f"/v1/stations/{station_id}/review", json={"name": "Renamed FM"}
        )
        assert resp.status_code == 200
        assert resp.json()["station"]["name"] == "Renamed FM"
        assert resp.json()["station"]["review_status"] == "reviewed"

    def test_review_unknown_station(self, client):
        assert client.post("/v1/stations/nope/review", json={}).status_code == 404

    def test_review_bad_field(self, client):
        station_id = "st-000"
        resp = client.post(f"/v1/stations/{station_id}/review", json={"nope": 1})
        assert resp.status_code == 400
