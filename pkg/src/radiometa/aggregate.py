"""Server-side aggregations behind the dashboard panels.

Hex binning uses a fixed pointy-top axial grid in plain lon/lat degrees with
its origin at (0, 0); a cell's stations are exactly the points nearest its
center, so a brute-force nearest-center scan reproduces every bin. The PCA
solver is a cyclic Jacobi eigensolver: plenty for a 5x5 covariance and
deterministic across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .store import JoinedEvent

SQRT3 = math.sqrt(3.0)


class FieldError(ValueError):
    """Unknown aggregation field name."""


class EmptyInputError(ValueError):
    pass


class InsufficientDataError(ValueError):
    pass


class DegenerateDataError(ValueError):
    pass


# --- field registries over joined event rows

_CATEGORICAL_FIELDS = {
    "country": lambda r: [r.location.country],
    "city": lambda r: [r.location.city],
    "continent": lambda r: [r.location.continent.value],
    "country_code": lambda r: [r.location.country_code],
    "station_genre": lambda r: list(r.station.genres),
    "station_format": lambda r: list(r.station.formats),
    "artist_name": lambda r: [r.artist.name] if r.artist else [],
    "artist_country": lambda r: [r.artist.country] if r.artist and r.artist.country else [],
    "artist_type": lambda r: [r.artist.artist_type.kind] if r.artist else [],
    "artist_genre": lambda r: list(r.artist.genres) if r.artist else [],
    "track_title": lambda r: [r.track.title] if r.track else [],
    "language": lambda r: [r.track.language] if r.track and r.track.language else [],
    "key_mode": lambda r: [f"{r.track.key_mode.tonic} {r.track.key_mode.mode}"]
    if r.track and r.track.key_mode
    else [],
}

_NUMERIC_FIELDS = {
    "reliability": lambda r: r.event.reliability,
    "popularity": lambda r: r.track.popularity if r.track else None,
    "duration_s": lambda r: r.track.duration_s if r.track else None,
    "year_released": lambda r: r.track.year_released if r.track else None,
    "danceability": lambda r: r.track.features.danceability if r.track and r.track.features else None,
    "speechiness": lambda r: r.track.features.speechiness if r.track and r.track.features else None,
    "acousticness": lambda r: r.track.features.acousticness if r.track and r.track.features else None,
    "liveness": lambda r: r.track.features.liveness if r.track and r.track.features else None,
    "instrumentalness": lambda r: r.track.features.instrumentalness if r.track and r.track.features else None,
    "valence": lambda r: r.track.features.valence if r.track and r.track.features else None,
    "arousal": lambda r: r.track.features.arousal if r.track and r.track.features else None,
}

CATEGORICAL_FIELD_NAMES = tuple(sorted(_CATEGORICAL_FIELDS))
NUMERIC_FIELD_NAMES = tuple(sorted(_NUMERIC_FIELDS))

# The five descriptors feeding the two-component scatter.
PCA_FEATURE_FIELDS = (
    "danceability",
    "speechiness",
    "acousticness",
    "liveness",
    "instrumentalness",
)


def categorical_values(row: JoinedEvent, field: str) -> list[str]:
    try:
        getter = _CATEGORICAL_FIELDS[field]
    except KeyError:
        raise FieldError(f"unknown categorical field {field!r}") from None
    return getter(row)


def numeric_value(row: JoinedEvent, field: str) -> float | None:
    try:
        getter = _NUMERIC_FIELDS[field]
    except KeyError:
        raise FieldError(f"unknown numeric field {field!r}") from None
    return getter(row)


# --- hexagonal binning


@dataclass(frozen=True)
class HexBin:
    center: tuple[float, float]  # (longitude, latitude)
    station_count: int
    country_breakdown: dict[str, int]


def hex_cell(lon: float, lat: float, resolution: float) -> tuple[int, int]:
    """Axial cell coordinates of the hexagon containing a point."""
    q = (SQRT3 / 3.0 * lon - lat / 3.0) / resolution
    r = (2.0 / 3.0 * lat) / resolution
    return _cube_round(q, r)


def hex_center(cell: tuple[int, int], resolution: float) -> tuple[float, float]:
    q, r = cell
    return (resolution * SQRT3 * (q + r / 2.0), resolution * 1.5 * r)


def _cube_round(q: float, r: float) -> tuple[int, int]:
    x, z = q, r
    y = -x - z
    rx, ry, rz = round(x), round(y), round(z)
    dx, dy, dz = abs(rx - x), abs(ry - y), abs(rz - z)
    if dx > dy and dx > dz:
        rx = -ry - rz
    elif dy > dz:
        pass  # y is derived; recomputing x or z covers it
    else:
        rz = -rx - ry
    return int(rx), int(rz)


def hexbin_aggregate(
    stations: Iterable[tuple[float, float, str]], resolution: float
) -> list[HexBin]:
    """Bin (lon, lat, country_code) station points into hexagonal cells.

    Every station lands in exactly one cell; empty cells are omitted, so
    the per-bin counts always sum to the input size.
    """
    if resolution <= 0:
        raise ValueError("resolution must be > 0")
    cells: dict[tuple[int, int], dict[str, int]] = {}
    for lon, lat, country in stations:
        cell = hex_cell(lon, lat, resolution)
        breakdown = cells.setdefault(cell, {})
        breakdown[country] = breakdown.get(country, 0) + 1
    out = [
        HexBin(
            center=hex_center(cell, resolution),
            station_count=sum(breakdown.values()),
            country_breakdown=dict(sorted(breakdown.items())),
        )
        for cell, breakdown in cells.items()
    ]
    out.sort(key=lambda b: b.center)
    return out


# --- map dots


@dataclass(frozen=True)
class MapDot:
    position: tuple[float, float]
    event_count: int
    contains_selected: bool


def map_dots(
    rows: Sequence[JoinedEvent],
    merge_radius: float = 0.0,
    selected_event_ids: Iterable[str] = (),
) -> list[MapDot]:
    """Group events by exact station position, then merge nearby groups.

    Groups whose positions sit within the merge radius of each other join
    transitively; a merged dot sits at the event-count-weighted centroid.
    The dot holding any selected event is flagged.
    """
    if merge_radius < 0:
        raise ValueError("merge_radius must be >= 0")
    selected = set(selected_event_ids)
    groups: dict[tuple[float, float], list[str]] = {}
    for row in rows:
        groups.setdefault(row.location.coordinates, []).append(row.event.event_id)
    positions = sorted(groups)
    parent = list(range(len(positions)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(positions)):
        for j in range(i + 1, len(positions)):
            if math.dist(positions[i], positions[j]) <= merge_radius:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    clusters: dict[int, list[int]] = {}
    for i in range(len(positions)):
        clusters.setdefault(find(i), []).append(i)

    dots = []
    for members in clusters.values():
        total = sum(len(groups[positions[i]]) for i in members)
        lon = sum(positions[i][0] * len(groups[positions[i]]) for i in members) / total
        lat = sum(positions[i][1] * len(groups[positions[i]]) for i in members) / total
        flagged = any(
            eid in selected for i in members for eid in groups[positions[i]]
        )
        dots.append(MapDot(position=(lon, lat), event_count=total, contains_selected=flagged))
    dots.sort(key=lambda d: d.position)
    return dots


# --- charts


def bar_counts(
    rows: Sequence[JoinedEvent], group_by: str, top_k: int = 10
) -> list[tuple[str, int]]:
    """Counts per label, descending, ties lexicographic, truncated to top_k."""
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    if group_by not in _CATEGORICAL_FIELDS:
        raise FieldError(f"unknown categorical field {group_by!r}")
    counts: dict[str, int] = {}
    for row in rows:
        for label in categorical_values(row, group_by):
            counts[label] = counts.get(label, 0) + 1
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ordered[:top_k]


def histogram(
    values: Sequence[float], bin_count: int
) -> list[tuple[float, float, int]]:
    """Equal-width bins over [min, max]; the rightmost bin is closed."""
    if not values:
        raise EmptyInputError("histogram needs at least one value")
    if bin_count < 1:
        raise ValueError("bin_count must be >= 1")
    lo, hi = min(values), max(values)
    if lo == hi:
        return [(float(lo), float(hi), len(values))]
    width = (hi - lo) / bin_count
    counts = [0] * bin_count
    for v in values:
        i = min(int((v - lo) / width), bin_count - 1)
        counts[i] += 1
    return [
        (lo + i * width, hi if i == bin_count - 1 else lo + (i + 1) * width, counts[i])
        for i in range(bin_count)
    ]


def scatter_points(
    rows: Sequence[JoinedEvent], x_field: str, y_field: str
) -> list[tuple[str, float, float]]:
    """(event_id, x, y) for rows where both numeric fields are present."""
    for axis in (x_field, y_field):
        if axis not in _NUMERIC_FIELDS:
            raise FieldError(f"unknown numeric field {axis!r}")
    out = []
    for row in rows:
        x = numeric_value(row, x_field)
        y = numeric_value(row, y_field)
        if x is not None and y is not None:
            out.append((row.event.event_id, float(x), float(y)))
    return out


# --- principal components


@dataclass(frozen=True)
class PcaModel:
    mean: tuple[float, ...]
    components: tuple[tuple[float, ...], ...]  # rows orthonormal
    explained_variance: tuple[float, ...]  # descending

    def to_dict(self) -> dict:
        return {
            "mean": list(self.mean),
            "components": [list(c) for c in self.components],
            "explained_variance": list(self.explained_variance),
        }


def _jacobi_eigh(matrix: np.ndarray, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a small symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors-as-columns), unsorted.
    """
    a = np.array(matrix, dtype=float, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    scale = max(1.0, float(np.max(np.abs(a))))
    for _ in range(max_sweeps):
        off = math.sqrt(sum(a[p, q] ** 2 for p in range(n) for q in range(n) if p != q))
        if off <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-18 * scale:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
    return np.diag(a).copy(), v


def pca_fit(features: Sequence[Sequence[float]], n_components: int = 2) -> PcaModel:
    """Top components of the sample covariance (n-1 divisor) of feature rows.

    Components are sign-fixed so each one's largest-magnitude coordinate is
    positive, making results deterministic across eigensolvers.
    """
    x = np.asarray(features, dtype=float)
    if x.size == 0:
        raise InsufficientDataError("need at least 3 rows, got 0")
    if x.ndim != 2:
        raise ValueError("features must be a 2-D matrix")
    n, _ = x.shape
    if n < 3:
        raise InsufficientDataError(f"need at least 3 rows, got {n}")
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / (n - 1)
    if float(np.trace(cov)) <= 0.0:
        raise DegenerateDataError("all rows identical: zero total variance")
    eigenvalues, eigenvectors = _jacobi_eigh(cov)
    order = np.argsort(eigenvalues, kind="stable")[::-1][:n_components]
    components = []
    variances = []
    for idx in order:
        vec = eigenvectors[:, idx].copy()
        pivot = int(np.argmax(np.abs(vec)))
        if vec[pivot] < 0:
            vec = -vec
        components.append(tuple(float(c) for c in vec))
        variances.append(max(float(eigenvalues[idx]), 0.0))
    return PcaModel(
        mean=tuple(float(m) for m in mean),
        components=tuple(components),
        explained_variance=tuple(variances),
    )


def pca_project(model: PcaModel, row: Sequence[float]) -> tuple[float, ...]:
    """Coordinates of one feature row in the fitted component space."""
    centered = np.asarray(row, dtype=float) - np.asarray(model.mean)
    comps = np.asarray(model.components)
    return tuple(float(v) for v in comps @ centered)
