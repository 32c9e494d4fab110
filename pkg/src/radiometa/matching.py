"""Resolve stream descriptions against music-library candidates.

The score is a normalized edit-distance similarity over Unicode code points:
1 - levenshtein(a, b) / max(len(a), len(b)). Candidates tie within 1e-9 of
the best score; ties go to the oldest release date, then title, then artist,
so results are reproducible under any candidate ordering.
"""

from __future__ import annotations

import hashlib
import json
import re
import unicodedata
from dataclasses import dataclass, replace
from datetime import date
from typing import Protocol

from .models import (
    ArtistRecord,
    ArtistType,
    AudioFeatures,
    EventRecord,
    KeyMode,
    Member,
    TrackRecord,
)

SCORE_TIE_TOLERANCE = 1e-9
RELIABLE_THRESHOLD = 0.90

# Every common dash variant folds to "-" before comparison.
_DASH_CHARS = "‐‑‒–—―−﹘﹣－"
_DASH_TABLE = {ord(c): "-" for c in _DASH_CHARS}
_WS_RE = re.compile(r"\s+")


def normalize_string(s: str) -> str:
    """Canonicalize text for matching.

    Compatibility-decompose, drop combining marks (diacritic folding),
    case-fold, fold dash variants to "-", collapse whitespace runs, trim.
    """
    decomposed = unicodedata.normalize("NFKD", s)
    stripped = "".join(c for c in decomposed if not unicodedata.combining(c))
    folded = stripped.casefold().translate(_DASH_TABLE)
    return _WS_RE.sub(" ", folded).strip()


def levenshtein(a: str, b: str) -> int:
    """Edit distance over Unicode code points (two-row dynamic program)."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i] + [0] * len(b)
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            current[j] = min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost)
        previous = current
    return previous[-1]


def normalized_similarity(a: str, b: str) -> float:
    """Similarity in [0, 1]; both strings empty counts as identical (1.0)."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


@dataclass(frozen=True)
class MatchCandidate:
    library: str  # "lib_a" | "lib_b" | "fixture"
    candidate_artist: str
    candidate_title: str
    release_date: date | None = None
    payload: dict | None = None  # enrichment blob mapped onto artist/track records

    def compare_string(self) -> str:
        return f"{self.candidate_artist} - {self.candidate_title}"


@dataclass(frozen=True)
class MatchResult:
    chosen: MatchCandidate | None
    reliability: float
    considered: int


def candidate_from_dict(obj: dict) -> MatchCandidate:
    rd = obj.get("release_date")
    return MatchCandidate(
        library=obj.get("library", "fixture"),
        candidate_artist=obj["candidate_artist"],
        candidate_title=obj["candidate_title"],
        release_date=date.fromisoformat(rd) if rd else None,
        payload=obj.get("payload"),
    )


def candidate_to_dict(c: MatchCandidate) -> dict:
    return {
        "library": c.library,
        "candidate_artist": c.candidate_artist,
        "candidate_title": c.candidate_title,
        "release_date": c.release_date.isoformat() if c.release_date else None,
        "payload": c.payload,
    }


def select_match(description: str, candidates: list[MatchCandidate]) -> MatchResult:
    """Score every candidate and pick the best, oldest-release first on ties."""
    if not candidates:
        return MatchResult(chosen=None, reliability=0.0, considered=0)
    query = normalize_string(description)
    scored = [
        (normalized_similarity(query, normalize_string(c.compare_string())), c)
        for c in candidates
    ]
    best = max(score for score, _ in scored)
    kept = [(score, c) for score, c in scored if best - score <= SCORE_TIE_TOLERANCE]

    def tie_key(entry: tuple[float, MatchCandidate]):
        _, c = entry
        # Candidates without a release date lose every date tie-break.
        return (
            (0, c.release_date) if c.release_date is not None else (1, date.max),
            c.candidate_title,
            c.candidate_artist,
        )

    score, chosen = min(kept, key=tie_key)
    return MatchResult(chosen=chosen, reliability=score, considered=len(candidates))


def is_reliable(result: MatchResult, threshold: float = RELIABLE_THRESHOLD) -> bool:
    """True when the match meets the reliable-subset threshold (inclusive)."""
    return result.reliability >= threshold


# --- enrichment


class LibraryClient(Protocol):
    def search(self, query: str) -> list[MatchCandidate]:
        ...


class LibraryUnavailable(RuntimeError):
    """Client transport failure; the event stays unenriched and retryable."""


@dataclass(frozen=True)
class EnrichmentOutcome:
    event: EventRecord
    artist: ArtistRecord | None
    track: TrackRecord | None
    retryable: bool = False


def _stable_id(prefix: str, *parts: str) -> str:
    digest = hashlib.sha1("\x1f".join(parts).encode("utf-8")).hexdigest()[:12]
    return f"{prefix}-{digest}"


def _artist_from_payload(candidate: MatchCandidate) -> ArtistRecord:
    info = (candidate.payload or {}).get("artist", {})
    name = info.get("name", candidate.candidate_artist)
    kind = info.get("type", "musical_artist")
    members = info.get("members")
    return ArtistRecord(
        artist_id=_stable_id("ar", normalize_string(name)),
        name=name,
        artist_type=ArtistType(kind=kind, detail=info.get("type_detail")),
        gender=info.get("gender"),
        country=info.get("country"),
        genres=tuple(info.get("genres", ())),
        instruments=tuple(info.get("instruments", ())),
        members=None
        if not members
        else tuple(
            Member(name=m["name"], gender=m.get("gender"), ethnicity=m.get("ethnicity"))
            for m in members
        ),
    )


def _track_from_payload(candidate: MatchCandidate) -> TrackRecord:
    info = (candidate.payload or {}).get("track", {})
    title = info.get("title", candidate.candidate_title)
    km = info.get("key_mode")
    ft = info.get("features")
    year = info.get("year_released")
    if year is None and candidate.release_date is not None:
        year = candidate.release_date.year
    return TrackRecord(
        track_id=_stable_id(
            "tr", normalize_string(candidate.candidate_artist), normalize_string(title)
        ),
        title=title,
        duration_s=info.get("duration_s"),
        year_released=year,
        key_mode=None if km is None else KeyMode(tonic=km["tonic"], mode=km["mode"]),
        language=info.get("language"),
        features=None if ft is None else AudioFeatures(**ft),
        popularity=info.get("popularity"),
        listen_urls=tuple(info.get("listen_urls", ())),
    )


def enrich_event(event: EventRecord, client: LibraryClient) -> EnrichmentOutcome:
    """Match one event against the library and materialize linked records.

    The best match is linked regardless of score; the reliable-subset
    threshold only governs exports. A transport failure leaves the event
    untouched with ``retryable`` set; metadata is never invented.
    """
    try:
        candidates = client.search(event.description)
    except LibraryUnavailable:
        return EnrichmentOutcome(event=event, artist=None, track=None, retryable=True)
    result = select_match(event.description, candidates)
    if result.chosen is None:
        return EnrichmentOutcome(
            event=replace(event, reliability=0.0), artist=None, track=None
        )
    artist = _artist_from_payload(result.chosen)
    track = _track_from_payload(result.chosen)
    updated = replace(
        event,
        reliability=result.reliability,
        artist_id=artist.artist_id,
        track_id=track.track_id,
    )
    return EnrichmentOutcome(event=updated, artist=artist, track=track)


# --- clients


class FixtureLibraryClient:
    """Library stand-in backed by a local JSON candidate file.

    The file holds a JSON array of candidate objects. ``search`` plays the
    role of the remote engine: it ranks candidates by token overlap with the
    query and returns the closest few; scoring stays in :func:`select_match`.
    """

    def __init__(self, path, max_results: int = 25):
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        self._candidates = [candidate_from_dict(obj) for obj in raw]
        self._tokens = [
            set(normalize_string(c.compare_string()).split()) for c in self._candidates
        ]
        self.max_results = max_results

    def search(self, query: str) -> list[MatchCandidate]:
        q_tokens = set(normalize_string(query).split())
        if not q_tokens:
            return []
        ranked = sorted(
            (
                (len(q_tokens & toks) / len(q_tokens | toks), i)
                for i, toks in enumerate(self._tokens)
                if q_tokens & toks
            ),
            key=lambda pair: (-pair[0], pair[1]),
        )
        return [self._candidates[i] for _, i in ranked[: self.max_results]]


class HttpLibraryClient:
    """Speaks the search wire shape: GET /search?q=... -> JSON candidate array."""

    def __init__(self, base_url: str, timeout_s: float = 10.0):
        import requests

        self.base_url = base_url.rstrip("/")
        self.timeout_s = timeout_s
        self._session = requests.Session()

    def search(self, query: str) -> list[MatchCandidate]:
        import requests

        try:
            resp = self._session.get(
                f"{self.base_url}/search", params={"q": query}, timeout=self.timeout_s
            )
            resp.raise_for_status()
            return [candidate_from_dict(obj) for obj in resp.json()]
        except (requests.RequestException, ValueError) as exc:
            raise LibraryUnavailable(str(exc)) from exc
