"""Command-line pipeline: collect, enrich, review, export, serve, simulate.

Stages are separate commands so partial reruns stay cheap. Exit codes:
0 success, 2 partial (retryable work remains), 1 failure. Write commands
take a corpus lock file so only one writer touches a corpus at a time.
"""

from __future__ import annotations

import json
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

import click
from filelock import FileLock, Timeout

from .clock import Clock, RealClock, SimClock
from .matching import (
    FixtureLibraryClient,
    HttpLibraryClient,
    RELIABLE_THRESHOLD,
    enrich_event,
)
from .models import record_from_dict, record_to_dict
from .monitor import HttpPollSource, MonitorConfig, monitor_station, sample_stations
from .store import CorpusStore, EventFilter, view_to_store
from .exports import export_csv
from . import simulator

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARTIAL = 2


@dataclass
class PipelineConfig:
    monitor: MonitorConfig
    match_threshold: float = RELIABLE_THRESHOLD
    corpus_path: str = "corpus.db"
    library_client: dict | None = None  # {"kind": "fixture"|"http", "path"/"url": ...}
    station_source: dict | None = None  # {"kind": "simulator"|"file", "url"/"path": ...}
    poll_url: str | None = None  # defaults to the simulator url
    clock: dict | None = None  # {"kind": "real"} | {"kind": "sim", "start": iso}

    @staticmethod
    def load(path: str | Path) -> "PipelineConfig":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        threshold = obj.get("match_threshold", RELIABLE_THRESHOLD)
        if not 0.0 <= threshold <= 1.0:
            raise ValueError("match_threshold must be within [0, 1]")
        return PipelineConfig(
            monitor=MonitorConfig.from_dict(obj.get("monitor", {})),
            match_threshold=threshold,
            corpus_path=obj.get("corpus_path", "corpus.db"),
            library_client=obj.get("library_client"),
            station_source=obj.get("station_source"),
            poll_url=obj.get("poll_url"),
            clock=obj.get("clock"),
        )

    def make_clock(self) -> Clock:
        spec = self.clock or {"kind": "real"}
        if spec["kind"] == "real":
            return RealClock()
        if spec["kind"] == "sim":
            return SimClock(datetime.fromisoformat(spec["start"]))
        raise ValueError(f"unknown clock kind {spec['kind']!r}")


def _load_station_source(config: PipelineConfig) -> tuple[dict, str | None]:
    """Returns ({"locations": [...], "stations": [...]}, poll_base_url)."""
    src = config.station_source or {}
    kind = src.get("kind")
    if kind == "simulator":
        import requests

        url = src["url"].rstrip("/")
        resp = requests.get(f"{url}/stations", timeout=10)
        resp.raise_for_status()
        return resp.json(), config.poll_url or url
    if kind == "file":
        records = json.loads(Path(src["path"]).read_text(encoding="utf-8"))
        return records, config.poll_url
    raise ValueError("station_source must be a simulator url or a records file")


def _make_library_client(config: PipelineConfig):
    spec = config.library_client or {}
    if spec.get("kind") == "fixture":
        return FixtureLibraryClient(spec["path"])
    if spec.get("kind") == "http":
        return HttpLibraryClient(spec["url"])
    raise ValueError("library_client must be a fixture path or an http url")


def _corpus_lock(corpus_path: str) -> FileLock:
    return FileLock(str(corpus_path) + ".lock")


@click.group()
def main():
    """Radio-stream metadata pipeline and exploration service."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", default=None, help="Override the corpus path.")
@click.option("--seed", default=None, type=int, help="Override the sampling seed.")
@click.option("--limit", default=None, type=int, help="Override events per station.")
def collect(config_path, corpus_path, seed, limit):
    """Stage 1: sample stations, poll their streams, ingest accepted events."""
    config = PipelineConfig.load(config_path)
    if corpus_path:
        config.corpus_path = corpus_path
    monitor_cfg = config.monitor
    if seed is not None:
        monitor_cfg = MonitorConfig.from_dict({**_cfg_dict(monitor_cfg), "rng_seed": seed})
    if limit is not None:
        monitor_cfg = MonitorConfig.from_dict(
            {**_cfg_dict(monitor_cfg), "events_per_station": limit}
        )

    try:
        records, poll_url = _load_station_source(config)
        if poll_url is None:
            raise ValueError("no poll url: set poll_url or use a simulator source")
    except Exception as exc:
        click.echo(f"station source unreachable: {exc}", err=True)
        sys.exit(EXIT_FAILURE)

    lock = _corpus_lock(config.corpus_path)
    try:
        with lock.acquire(timeout=5):
            report = _run_collect(config, monitor_cfg, records, poll_url)
    except Timeout:
        click.echo("corpus is locked by another writer", err=True)
        sys.exit(EXIT_FAILURE)
    click.echo(json.dumps(report, indent=2, sort_keys=True))
    sys.exit(EXIT_PARTIAL if report["stations_unreachable"] else EXIT_OK)


def _cfg_dict(cfg: MonitorConfig) -> dict:
    return {
        "events_per_station": cfg.events_per_station,
        "poll_interval_s": cfg.poll_interval_s,
        "blacklist": list(cfg.blacklist),
        "blackout_half_width_min": cfg.blackout_half_width_min,
        "station_sample_size": cfg.station_sample_size,
        "rng_seed": cfg.rng_seed,
        "max_polls": cfg.max_polls,
    }


def _run_collect(config, monitor_cfg: MonitorConfig, records: dict, poll_url: str) -> dict:
    store = CorpusStore(config.corpus_path)
    try:
        locations = [record_from_dict("locations", o) for o in records["locations"]]
        stations = [record_from_dict("stations", o) for o in records["stations"]]
        store.upsert_many(locations)
        store.upsert_many(stations)

        n = min(monitor_cfg.station_sample_size, len(stations))
        chosen = sample_stations(stations, n, monitor_cfg.rng_seed)

        def run_one(station):
            source = HttpPollSource(poll_url, station.station_id)
            clock = config.make_clock()
            return monitor_station(station, source, monitor_cfg, clock)

        with ThreadPoolExecutor(max_workers=min(16, max(1, n))) as pool:
            results = list(pool.map(run_one, chosen))

        totals = {"polls": 0, "accepted": 0, "blackout_skipped": 0, "excluded": {}}
        unreachable = []
        per_station = {}
        for result in results:
            store.upsert_many(result.events)
            rep = result.report
            totals["polls"] += rep.polls
            totals["accepted"] += rep.accepted
            totals["blackout_skipped"] += rep.blackout_skipped
            for reason, count in rep.excluded.items():
                totals["excluded"][reason] = totals["excluded"].get(reason, 0) + count
            if result.unreachable:
                unreachable.append(result.station_id)
            per_station[result.station_id] = {
                "accepted": rep.accepted,
                "polls": rep.polls,
                "blackout_skipped": rep.blackout_skipped,
                "excluded": rep.excluded,
                "reconciles": rep.reconciles(),
            }
        excluded_total = sum(totals["excluded"].values())
        return {
            "stations_monitored": len(chosen),
            "stations_unreachable": sorted(unreachable),
            "totals": totals,
            "excluded_total": excluded_total,
            "reconciles": totals["accepted"] + excluded_total + totals["blackout_skipped"]
            == totals["polls"],
            "per_station": per_station,
        }
    finally:
        store.close()


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", default=None)
@click.option("--threshold", default=None, type=float, help="Reliable-match threshold.")
def enrich(config_path, corpus_path, threshold):
    """Stage 3: match unscored events against the music library."""
    config = PipelineConfig.load(config_path)
    if corpus_path:
        config.corpus_path = corpus_path
    if threshold is not None:
        config.match_threshold = threshold
    try:
        client = _make_library_client(config)
    except Exception as exc:
        click.echo(f"library client unavailable: {exc}", err=True)
        sys.exit(EXIT_FAILURE)

    lock = _corpus_lock(config.corpus_path)
    try:
        with lock.acquire(timeout=5):
            report = _run_enrich(config, client)
    except Timeout:
        click.echo("corpus is locked by another writer", err=True)
        sys.exit(EXIT_FAILURE)
    click.echo(json.dumps(report, indent=2, sort_keys=True))
    sys.exit(EXIT_PARTIAL if report["retryable"] else EXIT_OK)


def _run_enrich(config, client) -> dict:
    store = CorpusStore(config.corpus_path)
    try:
        pending = [e for e in store.events.values() if e.reliability is None]
        matched = unmatched = retryable = reliable = 0
        for event in sorted(pending, key=lambda e: e.event_id):
            outcome = enrich_event(event, client)
            if outcome.retryable:
                retryable += 1
                continue
            if outcome.artist is not None:
                store.upsert(outcome.artist)
            if outcome.track is not None:
                store.upsert(outcome.track)
            store.upsert(outcome.event)
            if outcome.event.artist_id is not None:
                matched += 1
            else:
                unmatched += 1
            if (outcome.event.reliability or 0.0) >= config.match_threshold:
                reliable += 1
        return {
            "pending": len(pending),
            "matched": matched,
            "unmatched": unmatched,
            "reliable": reliable,
            "retryable": retryable,
            "threshold": config.match_threshold,
        }
    finally:
        store.close()


@main.command()
@click.argument("station_id")
@click.option("--corpus", "corpus_path", required=True)
@click.option(
    "--set",
    "edits",
    multiple=True,
    help="field=value; value may be JSON (lists for formats/genres).",
)
def review(station_id, corpus_path, edits):
    """Stage 2: apply station review edits and mark the station reviewed."""
    parsed = {}
    for item in edits:
        if "=" not in item:
            click.echo(f"bad edit {item!r}, expected field=value", err=True)
            sys.exit(EXIT_FAILURE)
        key, raw = item.split("=", 1)
        try:
            parsed[key] = json.loads(raw)
        except json.JSONDecodeError:
            parsed[key] = raw
    lock = _corpus_lock(corpus_path)
    try:
        with lock.acquire(timeout=5):
            store = CorpusStore(corpus_path)
            try:
                updated = store.review_station(station_id, parsed)
            finally:
                store.close()
    except Timeout:
        click.echo("corpus is locked by another writer", err=True)
        sys.exit(EXIT_FAILURE)
    except KeyError as exc:
        click.echo(f"not found: {exc}", err=True)
        sys.exit(EXIT_FAILURE)
    except ValueError as exc:
        click.echo(f"bad edit: {exc}", err=True)
        sys.exit(EXIT_FAILURE)
    click.echo(json.dumps({"station": record_to_dict(updated)}, indent=2, sort_keys=True))


@main.command()
@click.option("--corpus", "corpus_path", required=True)
@click.option(
    "--scope",
    type=click.Choice(["full", "reliable", "public-domain"]),
    default="full",
)
@click.option("--threshold", default=RELIABLE_THRESHOLD, type=float)
@click.option("--out", "out_path", required=True, type=click.Path())
def export(corpus_path, scope, threshold, out_path):
    """Export events as CSV (full, reliable subset, or public-domain columns)."""
    store = CorpusStore(corpus_path)
    try:
        if scope == "reliable":
            sub = view_to_store(store.reliable_subset(threshold))
            rows = sub.query_events(EventFilter(), limit=max(len(sub.events), 1))
            column_set = "full"
        else:
            rows = store.query_events(EventFilter(), limit=max(len(store.events), 1))
            column_set = "public_domain" if scope == "public-domain" else "full"
        Path(out_path).write_bytes(export_csv(rows, column_set))
        click.echo(json.dumps({"rows": len(rows), "scope": scope, "out": str(out_path)}))
    finally:
        store.close()


@main.command("corpus-export")
@click.option("--corpus", "corpus_path", required=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
def corpus_export(corpus_path, out_dir):
    """Dump the corpus as NDJSON tables plus a manifest."""
    store = CorpusStore(corpus_path)
    try:
        store.export_dir(out_dir)
        click.echo(json.dumps({"out": str(out_dir), "events": len(store.events)}))
    finally:
        store.close()


@main.command("corpus-import")
@click.option("--corpus", "corpus_path", required=True)
@click.option("--from", "src_dir", required=True, type=click.Path(exists=True))
def corpus_import(corpus_path, src_dir):
    """Load a corpus directory produced by corpus-export."""
    lock = _corpus_lock(corpus_path)
    try:
        with lock.acquire(timeout=5):
            store = CorpusStore(corpus_path)
            try:
                count = store.import_dir(src_dir)
            finally:
                store.close()
    except Timeout:
        click.echo("corpus is locked by another writer", err=True)
        sys.exit(EXIT_FAILURE)
    click.echo(json.dumps({"imported": count}))


@main.command()
@click.option("--corpus", "corpus_path", required=True)
@click.option("--addr", default="127.0.0.1:8600")
def serve(corpus_path, addr):
    """Serve the exploration API over the corpus."""
    from .service import serve as serve_api

    host, _, port = addr.partition(":")
    store = CorpusStore(corpus_path)
    click.echo(f"serving http://{host}:{port or 8600}/v1 over {corpus_path}")
    serve_api(store, host=host or "127.0.0.1", port=int(port or 8600))


@main.command("gen-scenarios")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--stations", "n_stations", default=20, type=int)
@click.option("--entries", default=150, type=int)
@click.option("--ad-fraction", default=0.2, type=float)
@click.option("--seed", default=7, type=int)
def gen_scenarios(out_dir, n_stations, entries, ad_fraction, seed):
    """Generate a self-consistent fleet bundle: scripts, records, library."""
    rng = random.Random(seed)
    out = Path(out_dir)
    (out / "scripts").mkdir(parents=True, exist_ok=True)
    records = simulator.generate_fixture_records(n_stations, rng)
    scripts = [
        simulator.generate_script(st["station_id"], entries, rng, ad_fraction)
        for st in records["stations"]
    ]
    for script in scripts:
        (out / "scripts" / f"{script.station_id}.json").write_text(
            json.dumps(simulator.script_to_dict(script), indent=2), encoding="utf-8"
        )
    (out / "stations.json").write_text(
        json.dumps(records, indent=2, ensure_ascii=False), encoding="utf-8"
    )
    library = simulator.generate_library_fixture(scripts, rng)
    (out / "library.json").write_text(
        json.dumps(library, indent=2, ensure_ascii=False), encoding="utf-8"
    )
    click.echo(
        json.dumps(
            {"scripts": len(scripts), "candidates": len(library), "out": str(out)}
        )
    )


@main.command()
@click.option("--scenarios", "scenario_dir", required=True, type=click.Path(exists=True))
@click.option("--port", default=8700, type=int)
def simulate(scenario_dir, port):
    """Run the scripted station fleet over HTTP (blocking)."""
    src = Path(scenario_dir)
    scripts = [
        simulator.script_from_dict(json.loads(p.read_text(encoding="utf-8")))
        for p in sorted((src / "scripts").glob("*.json"))
    ]
    records = None
    stations_file = src / "stations.json"
    if stations_file.exists():
        records = json.loads(stations_file.read_text(encoding="utf-8"))
    server = simulator.FleetServer(scripts, records=records, port=port)
    click.echo(f"fleet of {len(scripts)} stations at {server.url}")
    server.start()
    try:
        server._thread.join()
    except KeyboardInterrupt:
        server.close()


if __name__ == "__main__":
    main()
