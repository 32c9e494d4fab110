"""Versioned JSON API backing the exploration dashboard.

Handlers are stateless reads over the corpus store; aggregations accept the
same filter parameters as the event search so every panel reflects the
current query. List endpoints paginate with (limit, cursor). All numbers on
the wire are finite.
"""

from __future__ import annotations

import base64
from datetime import datetime

from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.middleware.cors import CORSMiddleware

from . import aggregate
from .exports import ShareDecodeError, ShareState, decode_share_url, encode_share_url, export_csv
from .matching import RELIABLE_THRESHOLD
from .models import record_to_dict
from .store import CorpusStore, EventFilter, JoinedEvent, NotFoundError, view_to_store

DEFAULT_EVENT_LIMIT = 1000


def _encode_cursor(offset: int) -> str:
    return base64.urlsafe_b64encode(f"o:{offset}".encode()).decode("ascii")


def _decode_cursor(cursor: str | None) -> int:
    if cursor is None:
        return 0
    try:
        tag, raw = base64.urlsafe_b64decode(cursor.encode("ascii")).decode().split(":", 1)
        if tag != "o":
            raise ValueError(tag)
        return int(raw)
    except Exception:
        raise HTTPException(status_code=400, detail="malformed cursor") from None


def _joined_to_dict(row: JoinedEvent) -> dict:
    return {
        "event": record_to_dict(row.event),
        "station": record_to_dict(row.station),
        "location": record_to_dict(row.location),
        "artist": None if row.artist is None else record_to_dict(row.artist),
        "track": None if row.track is None else record_to_dict(row.track),
    }


def _parse_when(value: str | None, name: str) -> datetime | None:
    if value is None:
        return None
    try:
        parsed = datetime.fromisoformat(value)
    except ValueError:
        raise HTTPException(status_code=400, detail=f"bad {name} timestamp") from None
    if parsed.tzinfo is None:
        raise HTTPException(status_code=400, detail=f"{name} needs a UTC offset")
    return parsed


def create_app(store: CorpusStore) -> FastAPI:
    app = FastAPI(title="radiometa", version="1")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def filter_from_params(
        country: str | None = None,
        city: str | None = None,
        station_id: str | None = None,
        q: str | None = None,
        min_reliability: float | None = None,
        since: str | None = None,
        until: str | None = None,
        genre: str | None = None,
        artist_country: str | None = None,
    ) -> EventFilter:
        start = _parse_when(since, "since")
        end = _parse_when(until, "until")
        if (start is None) != (end is None):
            raise HTTPException(status_code=400, detail="since and until go together")
        flt = EventFilter(
            country=country,
            city=city,
            station_id=station_id,
            text_query=q,
            min_reliability=min_reliability,
            date_range=None if start is None else (start, end),
            genre=genre,
            artist_country=artist_country,
        )
        try:
            flt.validate()
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return flt

    def filtered_rows(flt: EventFilter) -> list[JoinedEvent]:
        return store.query_events(flt, limit=max(len(store.events), 1))

    @app.get("/v1/stations")
    def list_stations(
        limit: int = Query(default=100, ge=1, le=10_000),
        cursor: str | None = None,
        country: str | None = None,
    ):
        offset = _decode_cursor(cursor)
        stations = sorted(store.stations.values(), key=lambda s: s.station_id)
        if country is not None:
            stations = [
                s for s in stations if store.locations[s.location_id].country == country
            ]
        page = stations[offset : offset + limit]
        next_cursor = (
            _encode_cursor(offset + limit) if offset + limit < len(stations) else None
        )
        return {
            "items": [
                {
                    "station": record_to_dict(s),
                    "location": record_to_dict(store.locations[s.location_id]),
                }
                for s in page
            ],
            "next_cursor": next_cursor,
            "total": len(stations),
        }

    @app.get("/v1/events")
    def list_events(
        country: str | None = None,
        city: str | None = None,
        station_id: str | None = None,
        q: str | None = None,
        min_reliability: float | None = None,
        since: str | None = None,
        until: str | None = None,
        genre: str | None = None,
        artist_country: str | None = None,
        limit: int = Query(default=DEFAULT_EVENT_LIMIT, ge=1, le=10_000),
        cursor: str | None = None,
    ):
        flt = filter_from_params(
            country, city, station_id, q, min_reliability, since, until, genre, artist_country
        )
        offset = _decode_cursor(cursor)
        rows = store.query_events(flt, limit=offset + limit)
        page = rows[offset : offset + limit]
        next_cursor = _encode_cursor(offset + limit) if len(rows) == offset + limit else None
        return {
            "items": [_joined_to_dict(r) for r in page],
            "next_cursor": next_cursor,
        }

    @app.get("/v1/events/{event_id}")
    def event_detail(event_id: str):
        try:
            event = store.get_event(event_id)
        except NotFoundError:
            raise HTTPException(status_code=404, detail=f"unknown event {event_id}") from None
        row = store.join_event(event)
        return {
            "station": {
                **record_to_dict(row.station),
                "location": record_to_dict(row.location),
            },
            "event": record_to_dict(row.event),
            "artist": None if row.artist is None else record_to_dict(row.artist),
            "track": None if row.track is None else record_to_dict(row.track),
            "listen_links": list(row.track.listen_urls) if row.track else [],
            "links": {"station_website": row.station.website},
        }

    @app.post("/v1/stations/{station_id}/review")
    def review_station(station_id: str, edits: dict):
        try:
            updated = store.review_station(station_id, edits)
        except NotFoundError:
            raise HTTPException(status_code=404, detail=f"unknown station {station_id}") from None
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return {"station": record_to_dict(updated)}

    @app.get("/v1/agg/hexbin")
    def agg_hexbin(res: float = Query(default=3.0, gt=0)):
        points = [
            (
                store.locations[s.location_id].coordinates[0],
                store.locations[s.location_id].coordinates[1],
                store.locations[s.location_id].country_code,
            )
            for s in store.stations.values()
        ]
        bins = aggregate.hexbin_aggregate(points, res)
        return {
            "resolution": res,
            "bins": [
                {
                    "center": list(b.center),
                    "station_count": b.station_count,
                    "country_breakdown": b.country_breakdown,
                }
                for b in bins
            ],
        }

    @app.get("/v1/agg/map")
    def agg_map(
        radius: float = Query(default=0.0, ge=0),
        selected: str | None = None,
        country: str | None = None,
        city: str | None = None,
        station_id: str | None = None,
        q: str | None = None,
        min_reliability: float | None = None,
        since: str | None = None,
        until: str | None = None,
        genre: str | None = None,
        artist_country: str | None = None,
    ):
        flt = filter_from_params(
            country, city, station_id, q, min_reliability, since, until, genre, artist_country
        )
        selected_ids = [s for s in (selected or "").split(",") if s]
        dots = aggregate.map_dots(filtered_rows(flt), radius, selected_ids)
        return {
            "dots": [
                {
                    "position": list(d.position),
                    "event_count": d.event_count,
                    "contains_selected": d.contains_selected,
                }
                for d in dots
            ]
        }

    @app.get("/v1/agg/bar")
    def agg_bar(
        by: str,
        k: int = Query(default=10, ge=1),
        country: str | None = None,
        city: str | None = None,
        station_id: str | None = None,
        q: str | None = None,
        min_reliability: float | None = None,
        since: str | None = None,
        until: str | None = None,
        genre: str | None = None,
        artist_country: str | None = None,
    ):
        flt = filter_from_params(
            country, city, station_id, q, min_reliability, since, until, genre, artist_country
        )
        try:
            bars = aggregate.bar_counts(filtered_rows(flt), by, k)
        except aggregate.FieldError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return {"bars": [{"label": label, "count": count} for label, count in bars]}

    @app.get("/v1/agg/hist")
    def agg_hist(
        field: str,
        bins: int = Query(default=10, ge=1),
        country: str | None = None,
        city: str | None = None,
        station_id: str | None = None,
        q: str | None = None,
        min_reliability: float | None = None,
        since: str | None = None,
        until: str | None = None,
        genre: str | None = None,
        artist_country: str | None = None,
    ):
        flt = filter_from_params(
            country, city, station_id, q, min_reliability, since, until, genre, artist_country
        )
        try:
            values = [
                v
                for row in filtered_rows(flt)
                if (v := aggregate.numeric_value(row, field)) is not None
            ]
        except aggregate.FieldError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        if not values:
            return {"bins": []}
        return {
            "bins": [
                {"start": start, "end": end, "count": count}
                for start, end, count in aggregate.histogram(values, bins)
            ]
        }

    @app.get("/v1/agg/scatter")
    def agg_scatter(
        x: str,
        y: str,
        country: str | None = None,
        city: str | None = None,
        station_id: str | None = None,
        q: str | None = None,
        min_reliability: float | None = None,
        since: str | None = None,
        until: str | None = None,
        genre: str | None = None,
        artist_country: str | None = None,
    ):
        flt = filter_from_params(
            country, city, station_id, q, min_reliability, since, until, genre, artist_country
        )
        try:
            points = aggregate.scatter_points(filtered_rows(flt), x, y)
        except aggregate.FieldError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return {
            "points": [
                {"event_id": eid, "x": xv, "y": yv} for eid, xv, yv in points
            ]
        }

    @app.get("/v1/agg/pca")
    def agg_pca(
        country: str | None = None,
        city: str | None = None,
        station_id: str | None = None,
        q: str | None = None,
        min_reliability: float | None = None,
        since: str | None = None,
        until: str | None = None,
        genre: str | None = None,
        artist_country: str | None = None,
    ):
        flt = filter_from_params(
            country, city, station_id, q, min_reliability, since, until, genre, artist_country
        )
        rows = [
            row
            for row in filtered_rows(flt)
            if row.track is not None and row.track.features is not None
        ]
        matrix = [
            [aggregate.numeric_value(row, f) for f in aggregate.PCA_FEATURE_FIELDS]
            for row in rows
        ]
        try:
            model = aggregate.pca_fit(matrix)
        except (aggregate.InsufficientDataError, aggregate.DegenerateDataError) as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None
        points = [
            {
                "event_id": row.event.event_id,
                "xy": list(aggregate.pca_project(model, vec)),
            }
            for row, vec in zip(rows, matrix)
        ]
        return {**model.to_dict(), "feature_fields": list(aggregate.PCA_FEATURE_FIELDS), "points": points}

    @app.get("/v1/export/csv")
    def export_csv_endpoint(
        scope: str = Query(default="full"),
        country: str | None = None,
        city: str | None = None,
        station_id: str | None = None,
        q: str | None = None,
        min_reliability: float | None = None,
        since: str | None = None,
        until: str | None = None,
        genre: str | None = None,
        artist_country: str | None = None,
    ):
        flt = filter_from_params(
            country, city, station_id, q, min_reliability, since, until, genre, artist_country
        )
        if scope == "full":
            rows, column_set = filtered_rows(flt), "full"
        elif scope == "reliable":
            view_store = view_to_store(store.reliable_subset(RELIABLE_THRESHOLD))
            rows, column_set = view_store.query_events(flt, limit=max(len(view_store.events), 1)), "full"
        elif scope == "public-domain":
            rows, column_set = filtered_rows(flt), "public_domain"
        else:
            raise HTTPException(status_code=400, detail=f"unknown scope {scope!r}")
        return Response(
            content=export_csv(rows, column_set),
            media_type="text/csv; charset=utf-8",
            headers={"Content-Disposition": f'attachment; filename="events-{scope}.csv"'},
        )

    @app.get("/v1/share")
    def decode_share(code: str):
        try:
            state = decode_share_url(code)
        except ShareDecodeError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return state.to_dict()

    @app.post("/v1/share")
    def encode_share(state: dict):
        try:
            share = ShareState.from_dict(state)
            share.filter.validate()
        except (ValueError, KeyError, TypeError) as exc:
            raise HTTPException(status_code=400, detail=f"bad share state: {exc}") from None
        return {"code": encode_share_url(share)}

    return app


def serve(store: CorpusStore, host: str = "127.0.0.1", port: int = 8600) -> None:
    """Run the API with uvicorn (blocking)."""
    import uvicorn

    uvicorn.run(create_app(store), host=host, port=port, log_level="warning")
