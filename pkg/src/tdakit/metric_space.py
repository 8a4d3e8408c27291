"""Finite metric spaces built from observed feature vectors.

Point clouds are ordered lists of equal-dimension feature vectors; the
pairwise Euclidean distance matrix derived from a cloud is what the
filtration builder consumes.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import EmptyInputError, ParseError

__all__ = [
    "FeatureRecord",
    "PointCloud",
    "DistanceMatrix",
    "ColumnSpec",
    "read_records",
    "load_point_cloud",
    "pairwise_distances",
    "standardize_features",
]


@dataclass(frozen=True)
class FeatureRecord:
    """One observation: an ordinal index, a feature vector, an optional temperature."""

    index: int
    features: tuple[float, ...]
    temperature: float | None = None

    def __post_init__(self):
        if len(self.features) == 0:
            raise ValueError("feature vector is empty")
        if not all(math.isfinite(v) for v in self.features):
            raise ValueError(f"non-finite feature value in record {self.index}")


@dataclass(frozen=True)
class PointCloud:
    """A labelled finite metric space: n points in R^d under the Euclidean metric."""

    label: str
    points: np.ndarray  # (n, d) float64, read-only

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError(f"point cloud {self.label!r} must be a non-empty 2-d array")
        if not np.all(np.isfinite(pts)):
            raise ValueError(f"point cloud {self.label!r} contains non-finite coordinates")
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @classmethod
    def from_records(cls, label: str, records: Sequence[FeatureRecord]) -> "PointCloud":
        if not records:
            raise EmptyInputError(f"no records for point cloud {label!r}")
        d = len(records[0].features)
        if any(len(r.features) != d for r in records):
            raise ValueError("records have inconsistent feature dimensions")
        return cls(label, np.array([r.features for r in records], dtype=np.float64))

    def relabel(self, label: str) -> "PointCloud":
        return PointCloud(label, self.points)

    def take(self, indices: Sequence[int], label: str | None = None) -> "PointCloud":
        """Sub-cloud at the given row indices (order preserved as supplied)."""
        return PointCloud(label if label is not None else self.label,
                          self.points[np.asarray(indices, dtype=np.intp)])


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric nonnegative matrix of pairwise distances with zero diagonal."""

    entries: np.ndarray  # (n, n) float64, read-only

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("distance matrix must be square")
        if not np.array_equal(m, m.T):
            raise ValueError("distance matrix must be symmetric")
        if np.any(np.diagonal(m) != 0.0):
            raise ValueError("distance matrix diagonal must be zero")
        if np.any(m < 0.0) or not np.all(np.isfinite(m)):
            raise ValueError("distances must be finite and nonnegative")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def enclosing_diameter(self) -> float:
        """Largest pairwise distance; the scale at which the complex is fully connected."""
        return float(self.entries.max())


@dataclass(frozen=True)
class ColumnSpec:
    """Names the columns of a tabular input.

    feature_columns: names of the numeric feature columns, in order. Empty
        means "every column not claimed by temperature/index", in header order.
    temperature_column / index_column: optional. Without an index column,
        records are numbered by row position starting at 0.
    """

    feature_columns: tuple[str, ...] = ()
    temperature_column: str | None = None
    index_column: str | None = None


def _parse_float(text: str, row: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"cannot parse {text!r} as a number", row=row, column=column) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite value {text!r}", row=row, column=column)
    return value


def read_records(source: Iterable[str] | str, spec: ColumnSpec = ColumnSpec(),
                 delimiter: str = ",") -> list[FeatureRecord]:
    """Parse delimiter-separated rows (header first) into FeatureRecords.

    Missing/blank temperature cells yield temperature=None; a missing or
    malformed feature cell is an error naming the row and column. Row numbers
    in errors count data rows from 0.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source, delimiter=delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyInputError("input has no header row") from None
    header = [h.strip() for h in header]
    pos = {name: i for i, name in enumerate(header)}

    feature_cols = list(spec.feature_columns)
    if not feature_cols:
        claimed = {spec.temperature_column, spec.index_column}
        feature_cols = [h for h in header if h not in claimed]
    for name in feature_cols:
        if name not in pos:
            raise ParseError(f"feature column {name!r} not present in header", column=name)
    if spec.temperature_column is not None and spec.temperature_column not in pos:
        raise ParseError(f"temperature column {spec.temperature_column!r} not present in header",
                         column=spec.temperature_column)
    if spec.index_column is not None and spec.index_column not in pos:
        raise ParseError(f"index column {spec.index_column!r} not present in header",
                         column=spec.index_column)
    if not feature_cols:
        raise ParseError("no feature columns remain after excluding temperature/index columns")

    records: list[FeatureRecord] = []
    for row_no, row in enumerate(reader):
        if not row or all(cell.strip() == "" for cell in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} cells, found {len(row)}", row=row_no)
        cells = [c.strip() for c in row]

        features = []
        for name in feature_cols:
            text = cells[pos[name]]
            if text == "":
                raise ParseError("missing feature value", row=row_no, column=name)
            features.append(_parse_float(text, row_no, name))

        temperature: float | None = None
        if spec.temperature_column is not None:
            text = cells[pos[spec.temperature_column]]
            if text != "" and text.lower() != "nan":
                temperature = _parse_float(text, row_no, spec.temperature_column)

        if spec.index_column is not None:
            text = cells[pos[spec.index_column]]
            try:
                index = int(float(text))
            except ValueError:
                raise ParseError(f"cannot parse {text!r} as an index",
                                 row=row_no, column=spec.index_column) from None
        else:
            index = row_no

        records.append(FeatureRecord(index=index, features=tuple(features),
                                     temperature=temperature))

    if not records:
        raise EmptyInputError("input has a header but no data rows")
    return records


def load_point_cloud(source: Iterable[str] | str, spec: ColumnSpec = ColumnSpec(),
                     label: str = "cloud", delimiter: str = ",") -> PointCloud:
    """Read a tabular stream into a PointCloud, preserving row order."""
    return PointCloud.from_records(label, read_records(source, spec, delimiter))


def pairwise_distances(cloud: PointCloud) -> DistanceMatrix:
    """Euclidean distance matrix of the cloud (symmetric, zero diagonal)."""
    if cloud.n == 1:
        return DistanceMatrix(np.zeros((1, 1)))
    return DistanceMatrix(squareform(pdist(cloud.points, metric="euclidean")))


def standardize_features(cloud: PointCloud) -> PointCloud:
    """Z-score each feature column. Constant columns are centred but not scaled."""
    pts = cloud.points
    mean = pts.mean(axis=0)
    std = pts.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    return PointCloud(cloud.label, (pts - mean) / std)
