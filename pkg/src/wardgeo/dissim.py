"""Dissimilarity matrices: construction, validation, normalization, I/O.

The canonical in-memory form is the condensed upper triangle: entry
``(i, j)`` with ``i < j`` (0-based) lives at ``i*n - i*(i+1)//2 + j - i - 1``.
Square matrices exist only at file boundaries.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError

EARTH_RADIUS_KM = 6371.0088

__all__ = [
    "DissimMatrix",
    "WeightVector",
    "FeatureTable",
    "GeoPoints",
    "AdjacencyList",
    "condensed_rank",
    "condensed_unrank",
    "condensed_size",
    "euclidean_dissim",
    "geodesic_dissim",
    "adjacency_dissim",
    "normalize_max",
    "read_dissim",
    "write_dissim",
    "read_feature_table",
    "read_geo_points",
    "read_adjacency",
    "read_weights",
    "EARTH_RADIUS_KM",
]


def condensed_size(n: int) -> int:
    """Number of condensed entries for n observations."""
    return n * (n - 1) // 2


def condensed_rank(n, i, j):
    """Condensed index of pair ``(i, j)``; accepts scalars or arrays with i < j."""
    i = np.asarray(i, dtype=np.int64)
    j = np.asarray(j, dtype=np.int64)
    k = i * n - i * (i + 1) // 2 + j - i - 1
    return int(k) if k.ndim == 0 else k


def condensed_unrank(n: int, k: int) -> tuple[int, int]:
    """Inverse of :func:`condensed_rank`: pair ``(i, j)`` stored at index k."""
    if not 0 <= k < condensed_size(n):
        raise ValidationError(f"condensed index {k} out of range for n={n}")
    # i is the largest row whose block starts at or before k
    b = 2 * n - 1
    i = int((b - math.isqrt(b * b - 8 * k)) // 2)
    # isqrt truncation can land one row late on exact block boundaries
    while condensed_rank(n, i, i + 1) > k:
        i -= 1
    while i + 1 < n - 1 and condensed_rank(n, i + 1, i + 2) <= k:
        i += 1
    j = k - condensed_rank(n, i, i + 1) + i + 1
    return i, j


def _as_ids(ids, n: int) -> tuple[str, ...] | None:
    if ids is None:
        return None
    ids = tuple(str(x) for x in ids)
    if len(ids) != n:
        raise ValidationError(f"expected {n} ids, got {len(ids)}")
    if len(set(ids)) != n:
        raise ValidationError("observation ids must be unique")
    return ids


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DissimMatrix:
    """Symmetric dissimilarity matrix over n observations, condensed storage.

    Parameters
    ----------
    n : int
        Number of observations (n >= 2).
    values : ndarray
        Length ``n*(n-1)//2`` array of nonnegative finite values in
        canonical condensed order.
    ids : sequence of str, optional
        Observation labels.
    """

    n: int
    values: np.ndarray
    ids: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError(f"need at least 2 observations, got n={self.n}")
        values = np.asarray(self.values, dtype=np.float64).ravel()
        if values.shape[0] != condensed_size(self.n):
            raise ValidationError(
                f"condensed length {values.shape[0]} does not match n={self.n} "
                f"(expected {condensed_size(self.n)})"
            )
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise ValidationError(
                f"non-finite dissimilarity at condensed index {bad} "
                f"(pair {condensed_unrank(self.n, bad)})"
            )
        if np.any(values < 0):
            bad = int(np.flatnonzero(values < 0)[0])
            raise ValidationError(
                f"negative dissimilarity at condensed index {bad} "
                f"(pair {condensed_unrank(self.n, bad)})"
            )
        object.__setattr__(self, "values", _readonly(values))
        object.__setattr__(self, "ids", _as_ids(self.ids, self.n))

    def value(self, i: int, j: int) -> float:
        """Dissimilarity between observations i and j (0 on the diagonal)."""
        if i == j:
            return 0.0
        if i > j:
            i, j = j, i
        return float(self.values[condensed_rank(self.n, i, j)])

    def square(self) -> np.ndarray:
        """Materialize the full symmetric n x n array."""
        m = np.zeros((self.n, self.n))
        iu = np.triu_indices(self.n, 1)
        m[iu] = self.values
        m[iu[1], iu[0]] = self.values
        return m

    @classmethod
    def from_square(cls, square, ids=None, rtol: float = 1e-12) -> "DissimMatrix":
        """Build from a square array, checking symmetry and a zero diagonal."""
        m = np.asarray(square, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"square matrix expected, got shape {m.shape}")
        n = m.shape[0]
        if n < 2:
            raise ValidationError(f"need at least 2 observations, got n={n}")
        if np.any(m.diagonal() != 0.0):
            bad = int(np.flatnonzero(m.diagonal() != 0.0)[0])
            raise ValidationError(f"nonzero diagonal at row {bad}: {m[bad, bad]!r}")
        iu = np.triu_indices(n, 1)
        upper = m[iu]
        lower = m[iu[1], iu[0]]
        scale = np.maximum(np.abs(upper), np.abs(lower))
        bad = np.abs(upper - lower) > rtol * scale
        if np.any(bad):
            k = int(np.flatnonzero(bad)[0])
            i, j = int(iu[0][k]), int(iu[1][k])
            raise ValidationError(
                f"asymmetry at ({i},{j}): {upper[k]!r} vs {lower[k]!r} "
                f"exceeds relative tolerance {rtol}"
            )
        return cls(n=n, values=upper, ids=ids)


@dataclass(frozen=True)
class WeightVector:
    """Positive per-observation weights."""

    weights: np.ndarray
    ids: tuple[str, ...] | None = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64).ravel()
        if w.size == 0:
            raise ValidationError("empty weight vector")
        if not np.all(np.isfinite(w)):
            raise ValidationError("weights must be finite")
        if np.any(w <= 0):
            bad = int(np.flatnonzero(w <= 0)[0])
            raise ValidationError(f"weight at position {bad} is not positive: {w[bad]!r}")
        object.__setattr__(self, "weights", _readonly(w))
        object.__setattr__(self, "ids", _as_ids(self.ids, w.size))

    def __len__(self) -> int:
        return self.weights.shape[0]

    @classmethod
    def uniform(cls, n: int) -> "WeightVector":
        return cls(np.full(n, 1.0 / n))


def as_weights(wt, n: int) -> WeightVector:
    """Coerce None/array/WeightVector to a WeightVector of length n."""
    if wt is None:
        return WeightVector.uniform(n)
    if not isinstance(wt, WeightVector):
        wt = WeightVector(np.asarray(wt))
    if len(wt) != n:
        raise ValidationError(f"weight vector length {len(wt)} does not match n={n}")
    return wt


@dataclass(frozen=True)
class FeatureTable:
    """Numeric observation-by-variable table."""

    values: np.ndarray
    ids: tuple[str, ...] | None = None
    columns: tuple[str, ...] | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ValidationError(f"feature table must be 2-d, got shape {v.shape}")
        if v.shape[1] < 1:
            raise ValidationError("feature table needs at least one column")
        if not np.all(np.isfinite(v)):
            r, c = np.argwhere(~np.isfinite(v))[0]
            raise ValidationError(f"non-finite feature entry at row {r}, column {c}")
        object.__setattr__(self, "values", _readonly(v))
        object.__setattr__(self, "ids", _as_ids(self.ids, v.shape[0]))
        if self.columns is not None:
            cols = tuple(str(c) for c in self.columns)
            if len(cols) != v.shape[1]:
                raise ValidationError(
                    f"expected {v.shape[1]} column names, got {len(cols)}"
                )
            object.__setattr__(self, "columns", cols)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def standardized(self) -> "FeatureTable":
        """Z-scored copy (population std); constant columns are rejected."""
        mu = self.values.mean(axis=0)
        sd = self.values.std(axis=0)
        if np.any(sd == 0):
            bad = int(np.flatnonzero(sd == 0)[0])
            raise ValidationError(f"cannot standardize constant column {bad}")
        return FeatureTable((self.values - mu) / sd, ids=self.ids, columns=self.columns)


@dataclass(frozen=True)
class GeoPoints:
    """Latitude/longitude pairs in degrees."""

    lat: np.ndarray
    lon: np.ndarray
    ids: tuple[str, ...] | None = None

    def __post_init__(self):
        lat = np.asarray(self.lat, dtype=np.float64).ravel()
        lon = np.asarray(self.lon, dtype=np.float64).ravel()
        if lat.shape != lon.shape:
            raise ValidationError("lat and lon must have equal length")
        if not (np.all(np.isfinite(lat)) and np.all(np.isfinite(lon))):
            raise ValidationError("coordinates must be finite")
        if np.any(np.abs(lat) > 90.0):
            bad = int(np.flatnonzero(np.abs(lat) > 90.0)[0])
            raise ValidationError(f"latitude out of [-90, 90] at row {bad}: {lat[bad]!r}")
        if np.any(np.abs(lon) > 180.0):
            bad = int(np.flatnonzero(np.abs(lon) > 180.0)[0])
            raise ValidationError(f"longitude out of [-180, 180] at row {bad}: {lon[bad]!r}")
        object.__setattr__(self, "lat", _readonly(lat))
        object.__setattr__(self, "lon", _readonly(lon))
        object.__setattr__(self, "ids", _as_ids(self.ids, lat.size))

    @property
    def n(self) -> int:
        return self.lat.shape[0]


@dataclass(frozen=True)
class AdjacencyList:
    """Symmetric neighbor sets per observation; self-adjacency is implicit."""

    neighbors: tuple[frozenset[int], ...]
    ids: tuple[str, ...] | None = field(default=None)

    def __post_init__(self):
        n = len(self.neighbors)
        sets = tuple(frozenset(int(j) for j in s) for s in self.neighbors)
        for i, s in enumerate(sets):
            for j in s:
                if not 0 <= j < n:
                    raise ValidationError(f"neighbor index {j} of {i} out of range")
                if j == i:
                    raise ValidationError(f"self-adjacency stored for observation {i}")
                if i not in sets[j]:
                    raise ValidationError(
                        f"asymmetric adjacency: {j} listed for {i} but not {i} for {j}"
                    )
        object.__setattr__(self, "neighbors", sets)
        object.__setattr__(self, "ids", _as_ids(self.ids, n))

    @property
    def n(self) -> int:
        return len(self.neighbors)


def euclidean_dissim(features: FeatureTable) -> DissimMatrix:
    """Pairwise Euclidean distances between the rows of a feature table."""
    if not isinstance(features, FeatureTable):
        features = FeatureTable(np.asarray(features))
    x = features.values
    n = x.shape[0]
    if n < 2:
        raise ValidationError("need at least 2 observations")
    ii, jj = np.triu_indices(n, 1)
    d = np.sqrt(np.square(x[ii] - x[jj]).sum(axis=1))
    return DissimMatrix(n=n, values=d, ids=features.ids)


def geodesic_dissim(points: GeoPoints) -> DissimMatrix:
    """Great-circle distances in kilometers (haversine, fixed Earth radius)."""
    if points.n < 2:
        raise ValidationError("need at least 2 points")
    lat = np.radians(points.lat)
    lon = np.radians(points.lon)
    ii, jj = np.triu_indices(points.n, 1)
    s_lat = np.sin((lat[jj] - lat[ii]) / 2.0)
    s_lon = np.sin((lon[jj] - lon[ii]) / 2.0)
    h = s_lat**2 + np.cos(lat[ii]) * np.cos(lat[jj]) * s_lon**2
    d = 2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.minimum(h, 1.0)))
    return DissimMatrix(n=points.n, values=d, ids=points.ids)


def adjacency_dissim(adj: AdjacencyList) -> DissimMatrix:
    """0/1 dissimilarity: 0 between neighbors, 1 otherwise."""
    n = adj.n
    if n < 2:
        raise ValidationError("need at least 2 observations")
    values = np.ones(condensed_size(n))
    for i, s in enumerate(adj.neighbors):
        for j in s:
            if i < j:
                values[condensed_rank(n, i, j)] = 0.0
    return DissimMatrix(n=n, values=values, ids=adj.ids)


def normalize_max(d: DissimMatrix) -> DissimMatrix:
    """Divide all values by the maximum so the result peaks at 1."""
    top = float(d.values.max())
    if top <= 0.0:
        raise ValidationError(
            "cannot normalize an all-zero dissimilarity matrix "
            "(all observations identical)"
        )
    return DissimMatrix(n=d.n, values=d.values / top, ids=d.ids)


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------
#
# Square CSV      optional header row and id column; n rows of n fields,
#                 symmetric within 1e-12 relative, exactly zero diagonal.
# Condensed CSV   first line "n=<count>", then n(n-1)/2 values, one per
#                 line, canonical order.  Carries no ids.
#
# Matrix files round-trip bitwise, so floats are written with repr
# (shortest form that parses back to the same double).


def _fmt(x: float) -> str:
    return repr(float(x))


def write_dissim(d: DissimMatrix, path, format: str = "condensed") -> None:
    """Write a matrix as 'condensed' or 'square' CSV."""
    path = Path(path)
    if format == "condensed":
        lines = [f"n={d.n}"]
        lines.extend(_fmt(v) for v in d.values)
    elif format == "square":
        m = d.square()
        lines = []
        if d.ids is not None:
            lines.append(",".join(["id"] + list(d.ids)))
        for i in range(d.n):
            row = ",".join(_fmt(v) for v in m[i])
            if d.ids is not None:
                row = f"{d.ids[i]},{row}"
            lines.append(row)
    else:
        raise ValidationError(f"unknown dissimilarity format: {format!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_float(tok: str, where: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ValidationError(f"{where}: not a number: {tok!r}") from None


def _read_condensed(lines: list[str], path) -> DissimMatrix:
    head = lines[0].strip()
    if not head.startswith("n="):
        raise ValidationError(f"{path}:1: condensed header must be 'n=<count>'")
    try:
        n = int(head[2:])
    except ValueError:
        raise ValidationError(f"{path}:1: bad count in {head!r}") from None
    body = [ln.strip() for ln in lines[1:] if ln.strip()]
    if len(body) != condensed_size(n):
        raise ValidationError(
            f"{path}: expected {condensed_size(n)} values for n={n}, got {len(body)}"
        )
    values = np.array(
        [_parse_float(tok, f"{path}:{k + 2}") for k, tok in enumerate(body)]
    )
    return DissimMatrix(n=n, values=values)


def _read_square(lines: list[str], path) -> DissimMatrix:
    rows = [ln.split(",") for ln in lines if ln.strip()]
    if not rows:
        raise ValidationError(f"{path}: empty file")

    def _numeric(tok: str) -> bool:
        try:
            float(tok)
            return True
        except ValueError:
            return False

    ids = None
    has_header = not all(_numeric(t) for t in rows[0])
    if has_header:
        header = rows[0]
        ids = [t.strip() for t in header[1:]] if len(header) > 1 else []
        rows = rows[1:]
    n = len(rows)
    if has_header and len(ids) != n:
        raise ValidationError(f"{path}: header names {len(ids)} columns, found {n} rows")
    data = np.empty((n, n))
    for r, row in enumerate(rows):
        expected = n + 1 if has_header else n
        lineno = r + 2 if has_header else r + 1
        if len(row) != expected:
            raise ValidationError(
                f"{path}:{lineno}: ragged row: {len(row)} fields, expected {expected}"
            )
        body = row[1:] if has_header else row
        if has_header and row[0].strip() != ids[r]:
            raise ValidationError(
                f"{path}:{lineno}: row id {row[0].strip()!r} does not match "
                f"header id {ids[r]!r}"
            )
        for c, tok in enumerate(body):
            data[r, c] = _parse_float(tok.strip(), f"{path}:{lineno}: column {c}")
    try:
        return DissimMatrix.from_square(data, ids=ids)
    except ValidationError as e:
        raise ValidationError(f"{path}: {e}") from None


def read_dissim(path, format: str = "auto") -> DissimMatrix:
    """Read 'square' or 'condensed' CSV; 'auto' sniffs the first line."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValidationError(f"{path}: empty file")
    if format == "auto":
        format = "condensed" if lines[0].strip().startswith("n=") else "square"
    if format == "condensed":
        return _read_condensed(lines, path)
    if format == "square":
        return _read_square(lines, path)
    raise ValidationError(f"unknown dissimilarity format: {format!r}")


def read_feature_table(path) -> FeatureTable:
    """Feature CSV: header of column names, first column is the row id."""
    path = Path(path)
    lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
    if len(lines) < 2:
        raise ValidationError(f"{path}: need a header row and at least one data row")
    header = [t.strip() for t in lines[0].split(",")]
    if len(header) < 2:
        raise ValidationError(f"{path}:1: need an id column and at least one variable")
    columns = header[1:]
    ids, rows = [], []
    for lineno, ln in enumerate(lines[1:], start=2):
        toks = [t.strip() for t in ln.split(",")]
        if len(toks) != len(header):
            raise ValidationError(
                f"{path}:{lineno}: ragged row: {len(toks)} fields, expected {len(header)}"
            )
        ids.append(toks[0])
        rows.append(
            [_parse_float(t, f"{path}:{lineno}: column {header[c + 1]!r}")
             for c, t in enumerate(toks[1:])]
        )
    return FeatureTable(np.array(rows), ids=ids, columns=columns)


def read_geo_points(path) -> GeoPoints:
    """Coordinates CSV with columns id,lat,lon."""
    path = Path(path)
    lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines:
        raise ValidationError(f"{path}: empty file")
    header = [t.strip().lower() for t in lines[0].split(",")]
    if header != ["id", "lat", "lon"]:
        raise ValidationError(f"{path}:1: expected header 'id,lat,lon', got {lines[0]!r}")
    ids, lat, lon = [], [], []
    for lineno, ln in enumerate(lines[1:], start=2):
        toks = [t.strip() for t in ln.split(",")]
        if len(toks) != 3:
            raise ValidationError(f"{path}:{lineno}: expected 3 fields, got {len(toks)}")
        ids.append(toks[0])
        lat.append(_parse_float(toks[1], f"{path}:{lineno}: lat"))
        lon.append(_parse_float(toks[2], f"{path}:{lineno}: lon"))
    return GeoPoints(lat=np.array(lat), lon=np.array(lon), ids=ids)


def read_adjacency(path) -> AdjacencyList:
    """Adjacency JSON: object mapping id to an array of neighbor ids."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}: invalid JSON: {e}") from None
    if not isinstance(raw, dict):
        raise ValidationError(f"{path}: top level must be an object mapping id -> [ids]")
    ids = [str(k) for k in raw.keys()]
    index = {k: i for i, k in enumerate(ids)}
    neighbors = []
    for k, adj in raw.items():
        if not isinstance(adj, list):
            raise ValidationError(f"{path}: neighbors of {k!r} must be an array")
        s = set()
        for other in adj:
            other = str(other)
            if other not in index:
                raise ValidationError(f"{path}: unknown neighbor {other!r} of {k!r}")
            s.add(index[other])
        neighbors.append(frozenset(s))
    return AdjacencyList(neighbors=tuple(neighbors), ids=ids)


def read_weights(path) -> WeightVector:
    """Weights CSV with columns id,weight."""
    path = Path(path)
    lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines:
        raise ValidationError(f"{path}: empty file")
    header = [t.strip().lower() for t in lines[0].split(",")]
    if header != ["id", "weight"]:
        raise ValidationError(f"{path}:1: expected header 'id,weight', got {lines[0]!r}")
    ids, w = [], []
    for lineno, ln in enumerate(lines[1:], start=2):
        toks = [t.strip() for t in ln.split(",")]
        if len(toks) != 2:
            raise ValidationError(f"{path}:{lineno}: expected 2 fields, got {len(toks)}")
        ids.append(toks[0])
        w.append(_parse_float(toks[1], f"{path}:{lineno}: weight"))
    return WeightVector(np.array(w), ids=ids)
