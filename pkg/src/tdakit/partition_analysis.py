"""Partition records by temperature/index rules and compare the partitions.

The workflow: assign each record to a named partition (an index-threshold
"damage" rule takes precedence over the temperature bands), optionally split
the largest partition into two random halves, compute one barcode per
partition, fill the pairwise Wasserstein matrix, and report row sums together
with row sums scaled by each partition's point count. The scaled sum is the
size-independent discriminator: the larger it is, the more the partition's
manifold shape differs from the rest.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .barcode_metrics import WassersteinConfig, wasserstein_distance
from .errors import (CapacityError, ConfigError, IncomparableBarcodesError,
                     TooSmallError, UnclassifiableRecordError)
from .metric_space import FeatureRecord, PointCloud, pairwise_distances
from .persistence import Barcode, compute_persistence
from .vr_filtration import FiltrationParams, build_filtration

__all__ = [
    "TemperatureBand",
    "PartitionSpec",
    "WassersteinReport",
    "SweepRow",
    "SweepResult",
    "default_partition_spec",
    "load_partition_spec",
    "partition_records",
    "split_random_halves",
    "with_subset_halves",
    "barcode_for",
    "pairwise_report",
    "partition_size_sweep",
    "rank_partitions",
]


@dataclass(frozen=True)
class TemperatureBand:
    """Half-open temperature range [lower, upper); None means unbounded."""

    name: str
    lower: float | None = None
    upper: float | None = None

    def contains(self, t: float) -> bool:
        if self.lower is not None and t < self.lower:
            return False
        if self.upper is not None and t >= self.upper:
            return False
        return True


def _check_name(name: str) -> str:
    if not name or any(ch.isspace() for ch in name):
        raise ConfigError(f"partition name {name!r} must be non-empty without whitespace")
    return name


@dataclass(frozen=True)
class PartitionSpec:
    """Ordered partition rules: the damage index rule first, then temperature bands.

    Bands must chain exactly (each upper equals the next lower) and cover the
    whole line, so every record with a temperature lands in exactly one band.
    """

    bands: tuple[TemperatureBand, ...]
    damage_name: str = "damage"
    damage_index_threshold: int = 3475

    def __post_init__(self):
        names = [_check_name(b.name) for b in self.bands] + [_check_name(self.damage_name)]
        if len(set(names)) != len(names):
            raise ConfigError("partition names must be unique")
        if not self.bands:
            raise ConfigError("at least one temperature band is required")
        if self.bands[0].lower is not None or self.bands[-1].upper is not None:
            raise ConfigError("temperature bands must be unbounded below and above")
        for a, b in zip(self.bands, self.bands[1:]):
            if a.upper is None or b.lower is None or a.upper != b.lower:
                raise ConfigError(
                    f"temperature bands {a.name!r} and {b.name!r} do not chain: "
                    f"upper {a.upper} vs lower {b.lower}")

    def assign(self, record: FeatureRecord) -> str | None:
        """Partition name, or None when the record is unclassifiable."""
        if record.index > self.damage_index_threshold:
            return self.damage_name
        if record.temperature is None:
            return None
        for band in self.bands:
            if band.contains(record.temperature):
                return band.name
        return None

    def partition_names(self) -> list[str]:
        return [b.name for b in self.bands] + [self.damage_name]


def default_partition_spec() -> PartitionSpec:
    """Freezing / cold / warm temperature bands with a damage index rule."""
    return PartitionSpec(bands=(
        TemperatureBand("freezing", None, 0.0),
        TemperatureBand("cold", 0.0, 4.0),
        TemperatureBand("warm", 4.0, None),
    ))


def load_partition_spec(text: str) -> PartitionSpec:
    """Parse a JSON rules document.

    Schema: {"damage": {"name": str, "index_greater_than": int},
             "temperature_bands": [{"name": str, "lower"?: num, "upper"?: num}, ...]}
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"rules document is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("rules document must be a JSON object")
    try:
        damage = doc.get("damage", {})
        bands = tuple(
            TemperatureBand(str(b["name"]),
                            None if b.get("lower") is None else float(b["lower"]),
                            None if b.get("upper") is None else float(b["upper"]))
            for b in doc["temperature_bands"])
        return PartitionSpec(
            bands=bands,
            damage_name=str(damage.get("name", "damage")),
            damage_index_threshold=int(damage.get("index_greater_than", 3475)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed rules document: {exc}") from None


def partition_records(records: list[FeatureRecord],
                      spec: PartitionSpec | None = None) -> dict[str, PointCloud]:
    """Assign every record to exactly one partition, preserving input order.

    Partitions with no records are omitted. Records that match no rule (no
    temperature, index at or below the damage threshold) raise
    UnclassifiableRecordError listing their indices.
    """
    spec = spec or default_partition_spec()
    buckets: dict[str, list[FeatureRecord]] = {name: [] for name in spec.partition_names()}
    unclassifiable: list[int] = []
    for rec in records:
        name = spec.assign(rec)
        if name is None:
            unclassifiable.append(rec.index)
        else:
            buckets[name].append(rec)
    if unclassifiable:
        raise UnclassifiableRecordError(unclassifiable)
    return {name: PointCloud.from_records(name, recs)
            for name, recs in buckets.items() if recs}


def split_random_halves(cloud: PointCloud, seed: int) -> tuple[PointCloud, PointCloud]:
    """Disjoint random halves (sizes n//2 and n-n//2), deterministic per seed."""
    n = cloud.n
    if n < 2:
        raise TooSmallError(f"cannot split {cloud.label!r} with {n} point(s) in half")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    first = np.sort(perm[:n // 2])
    second = np.sort(perm[n // 2:])
    return (cloud.take(first, label=cloud.label + "1"),
            cloud.take(second, label=cloud.label + "2"))


def _subsample(cloud: PointCloud, fraction: float, rng) -> PointCloud:
    m = int(round(fraction * cloud.n))
    if m < 2:
        raise TooSmallError(
            f"fraction {fraction} of {cloud.label!r} keeps {m} point(s); need >= 2")
    if m >= cloud.n:
        return cloud
    idx = np.sort(rng.choice(cloud.n, size=m, replace=False))
    return cloud.take(idx)


def with_subset_halves(clouds: dict[str, PointCloud], target: str,
                       seed: int) -> dict[str, PointCloud]:
    """The cloud map with the target's two random halves appended at the end."""
    if target not in clouds:
        raise KeyError(f"no partition named {target!r}")
    out = dict(clouds)
    h1, h2 = split_random_halves(clouds[target], seed)
    out[h1.label] = h1
    out[h2.label] = h2
    return out


def barcode_for(cloud: PointCloud, params: FiltrationParams | None = None,
                include_unverified_top: bool = True) -> Barcode:
    """Cloud -> distance matrix -> filtration -> barcode."""
    params = params or FiltrationParams()
    try:
        filt = build_filtration(pairwise_distances(cloud), params.max_dimension,
                                params.diameter_cap, params.budget)
    except CapacityError as exc:
        raise CapacityError(f"partition {cloud.label!r}: {exc}") from None
    return compute_persistence(filt, label=cloud.label,
                               include_unverified_top=include_unverified_top)


@dataclass(frozen=True)
class WassersteinReport:
    """Pairwise distances over named partitions plus raw and scaled row sums."""

    labels: tuple[str, ...]
    matrix: np.ndarray
    row_sums: np.ndarray
    n_points: tuple[int, ...]
    scaled_sums: np.ndarray

    def __post_init__(self):
        m = self.matrix
        if m.shape != (len(self.labels), len(self.labels)):
            raise ValueError("matrix shape does not match the label count")
        if not np.array_equal(m, m.T) or np.any(np.diagonal(m) != 0.0):
            raise ValueError("report matrix must be symmetric with a zero diagonal")

    def row(self, label: str) -> int:
        return self.labels.index(label)

    def to_table_text(self) -> str:
        """Human-readable tables, 2-decimal formatting."""
        width = max(8, max(len(l) for l in self.labels) + 1)
        head = "".join(f"{l:>{width}}" for l in self.labels)
        lines = [f"{'':{width}}{head}"]
        for i, l in enumerate(self.labels):
            row = "".join(f"{v:>{width}.2f}" for v in self.matrix[i])
            lines.append(f"{l:<{width}}{row}")
        lines.append("")
        lines.append(f"{'':{width}}{'sum':>{width}}{'points':>{width}}{'scaled':>{width}}")
        for i, l in enumerate(self.labels):
            lines.append(f"{l:<{width}}{self.row_sums[i]:>{width}.2f}"
                         f"{self.n_points[i]:>{width}d}{self.scaled_sums[i]:>{width}.2f}")
        return "\n".join(lines) + "\n"

    def to_records_text(self) -> str:
        """Machine-readable structured text with full-precision values."""
        lines = ["report-v1", "labels " + " ".join(self.labels),
                 "n_points " + " ".join(str(n) for n in self.n_points), "matrix"]
        for row in self.matrix:
            lines.append(" ".join(repr(float(v)) for v in row))
        lines.append("row_sums " + " ".join(repr(float(v)) for v in self.row_sums))
        lines.append("scaled_sums " + " ".join(repr(float(v)) for v in self.scaled_sums))
        return "\n".join(lines) + "\n"


def pairwise_report(clouds: dict[str, PointCloud],
                    cfg: WassersteinConfig | None = None,
                    params: FiltrationParams | None = None,
                    threads: int = 1) -> WassersteinReport:
    """Barcode every cloud once, then fill the symmetric distance matrix."""
    if len(clouds) < 2:
        raise ValueError("a report needs at least 2 point clouds")
    cfg = cfg or WassersteinConfig()
    params = params or FiltrationParams()
    labels = tuple(clouds)
    # the top simplex dimension only matters when explicitly requested
    need_top = cfg.dimensions is not None and max(cfg.dimensions) >= params.max_dimension
    barcodes = {name: barcode_for(cloud, params, include_unverified_top=need_top)
                for name, cloud in clouds.items()}

    k = len(labels)
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]

    def dist(pair):
        i, j = pair
        try:
            return wasserstein_distance(barcodes[labels[i]], barcodes[labels[j]], cfg)
        except (CapacityError, IncomparableBarcodesError) as exc:
            raise type(exc)(f"pair ({labels[i]!r}, {labels[j]!r}): {exc}") from None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(dist, pairs))
    else:
        values = [dist(p) for p in pairs]

    matrix = np.zeros((k, k))
    for (i, j), v in zip(pairs, values):
        matrix[i, j] = matrix[j, i] = v
    row_sums = matrix.sum(axis=1)
    n_points = tuple(clouds[l].n for l in labels)
    scaled = row_sums / np.array(n_points, dtype=np.float64)
    return WassersteinReport(labels=labels, matrix=matrix, row_sums=row_sums,
                             n_points=n_points, scaled_sums=scaled)


@dataclass(frozen=True)
class SweepRow:
    fraction: float
    report: WassersteinReport


@dataclass(frozen=True)
class SweepResult:
    target: str
    rows: tuple[SweepRow, ...]

    @property
    def labels(self) -> tuple[str, ...]:
        return self.rows[0].report.labels


def partition_size_sweep(clouds: dict[str, PointCloud], sweep_target: str,
                         fractions: list[float], seed: int,
                         cfg: WassersteinConfig | None = None,
                         params: FiltrationParams | None = None,
                         threads: int = 1) -> SweepResult:
    """Re-run the full report while the target partition is subsampled.

    For each fraction the target is subsampled (uniform, without replacement,
    deterministic per seed), its two random halves are rebuilt from the
    subsample, and the pairwise report is recomputed over the other partitions
    plus the subsampled target and its halves. Fraction 1.0 reproduces
    pairwise_report(with_subset_halves(clouds, target, seed)) exactly.
    """
    if sweep_target not in clouds:
        raise KeyError(f"no partition named {sweep_target!r}")
    if not fractions:
        raise ValueError("fractions must be non-empty")
    if any(not 0.0 < f <= 1.0 for f in fractions):
        raise ValueError("fractions must lie in (0, 1]")
    if any(a >= b for a, b in zip(fractions, fractions[1:])):
        raise ValueError("fractions must be sorted strictly ascending")

    rows = []
    for k, fraction in enumerate(fractions):
        rng = np.random.default_rng([seed, k])
        sub = _subsample(clouds[sweep_target], fraction, rng)
        run = dict(clouds)
        run[sweep_target] = sub
        run = with_subset_halves(run, sweep_target, seed)
        rows.append(SweepRow(fraction, pairwise_report(run, cfg, params, threads)))
    return SweepResult(target=sweep_target, rows=tuple(rows))


def rank_partitions(report: WassersteinReport) -> list[tuple[str, float]]:
    """Partitions ordered by descending scaled sum; ties break lexicographically."""
    entries = list(zip(report.labels, (float(v) for v in report.scaled_sums)))
    return sorted(entries, key=lambda t: (-t[1], t[0]))
