"""p-Wasserstein distance between barcodes.

Within each homology dimension an optimal matching is solved over the two
interval multisets augmented with the diagonal: any interval may instead match
its nearest diagonal point, at sup-metric cost persistence/2. Costs are raised
to the power p, summed over all included dimensions, and the total is taken to
the 1/p. The assignment is solved exactly (shortest augmenting path on the
diagonal-augmented square cost matrix).

Essential intervals (death = infinity) are handled by policy before matching:

* "truncate" (default): death is replaced by the source barcode's enclosing
  diameter and essentials are matched only against the other side's
  essentials of the same dimension (with diagonal augmentation).
* "match-or-fail": essentials pair by birth difference alone; if the two
  barcodes disagree on the essential count in any included dimension the
  distance is the infinite-distance signal float('inf').
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import IncomparableBarcodesError
from .persistence import Barcode, PersistenceInterval

__all__ = [
    "WassersteinConfig",
    "Matching",
    "WassersteinResult",
    "interval_sup_distance",
    "wasserstein_distance",
    "wasserstein_details",
]

ESSENTIAL_POLICIES = ("truncate", "match-or-fail")


@dataclass(frozen=True)
class WassersteinConfig:
    """Knobs of the barcode metric.

    dimensions=None selects every dimension both barcodes compute reliably,
    i.e. 0..max_dimension-1; the top simplex dimension only holds unverifiable
    classes and must be requested explicitly.
    """

    p: float = 2.0
    dimensions: tuple[int, ...] | None = None
    essential_policy: str = "truncate"

    def __post_init__(self):
        if not self.p > 0:
            raise ValueError("p must be > 0")
        if self.essential_policy not in ESSENTIAL_POLICIES:
            raise ValueError(f"essential_policy must be one of {ESSENTIAL_POLICIES}")
        if self.dimensions is not None:
            dims = tuple(sorted(set(int(d) for d in self.dimensions)))
            if any(d < 0 for d in dims):
                raise ValueError("dimensions must be >= 0")
            object.__setattr__(self, "dimensions", dims)


@dataclass
class Matching:
    """Optimal matching underlying a distance value."""

    pairs: list[tuple[PersistenceInterval, PersistenceInterval]] = field(default_factory=list)
    unmatched_1: list[PersistenceInterval] = field(default_factory=list)
    unmatched_2: list[PersistenceInterval] = field(default_factory=list)

    def swapped(self) -> "Matching":
        return Matching(pairs=[(b, a) for a, b in self.pairs],
                        unmatched_1=list(self.unmatched_2),
                        unmatched_2=list(self.unmatched_1))


@dataclass(frozen=True)
class WassersteinResult:
    distance: float
    per_dimension: dict[int, float]
    matching: Matching


def interval_sup_distance(a: PersistenceInterval, b: PersistenceInterval) -> float:
    """Supremum metric between two finite intervals."""
    if math.isinf(a.death) or math.isinf(b.death):
        raise ValueError("interval_sup_distance requires finite intervals; "
                         "apply the essential policy first")
    return max(abs(a.birth - b.birth), abs(a.death - b.death))


def _diagonal_cost(iv: PersistenceInterval) -> float:
    # nearest diagonal point under the sup metric is the midpoint
    return (iv.death - iv.birth) / 2.0


def _assign_with_diagonal(A: list[PersistenceInterval], B: list[PersistenceInterval],
                          p: float, matching: Matching) -> float:
    """Minimal sum of cost^p matching A against B with diagonal augmentation."""
    n, m = len(A), len(B)
    if n == 0 and m == 0:
        return 0.0
    ab = np.array([iv.birth for iv in A], dtype=np.float64).reshape(n, 1)
    ad = np.array([iv.death for iv in A], dtype=np.float64).reshape(n, 1)
    bb = np.array([iv.birth for iv in B], dtype=np.float64).reshape(1, m)
    bd = np.array([iv.death for iv in B], dtype=np.float64).reshape(1, m)
    C = np.full((n + m, m + n), np.inf)
    C[:n, :m] = np.maximum(np.abs(ab - bb), np.abs(ad - bd)) ** p
    C[np.arange(n), m + np.arange(n)] = ((ad - ab).ravel() / 2.0) ** p
    C[n + np.arange(m), np.arange(m)] = ((bd - bb).ravel() / 2.0) ** p
    C[n:, m:] = 0.0
    rows, cols = linear_sum_assignment(C)
    total = 0.0
    for r, c in zip(rows, cols):
        total += C[r, c]
        if r < n and c < m:
            matching.pairs.append((A[r], B[c]))
        elif r < n:
            matching.unmatched_1.append(A[r])
        elif c < m:
            matching.unmatched_2.append(B[c])
    return float(total)


def _assign_by_birth(A: list[PersistenceInterval], B: list[PersistenceInterval],
                     p: float, matching: Matching) -> float:
    """Minimal sum of |birth difference|^p over perfect matchings (equal sizes)."""
    if not A:
        return 0.0
    ab = np.array([iv.birth for iv in A], dtype=np.float64).reshape(len(A), 1)
    bb = np.array([iv.birth for iv in B], dtype=np.float64).reshape(1, len(B))
    C = np.abs(ab - bb) ** p
    rows, cols = linear_sum_assignment(C)
    total = 0.0
    for r, c in zip(rows, cols):
        total += C[r, c]
        matching.pairs.append((A[r], B[c]))
    return float(total)


def _truncated(iv: PersistenceInterval, enclosing: float) -> PersistenceInterval:
    return iv._replace(death=max(float(enclosing), iv.birth))


def _barcode_sort_key(b: Barcode):
    return (b.label, b.n_points, b.max_dimension, b.enclosing_diameter,
            tuple((iv.dimension, iv.birth, iv.death, iv.unverified) for iv in b.intervals))


def wasserstein_details(b1: Barcode, b2: Barcode,
                        cfg: WassersteinConfig | None = None) -> WassersteinResult:
    """Distance plus per-dimension breakdown and the realized matching.

    The argument pair is ordered canonically before solving, so the result is
    exactly symmetric in its inputs.
    """
    cfg = cfg or WassersteinConfig()
    if b1.max_dimension != b2.max_dimension:
        raise IncomparableBarcodesError(
            f"barcodes {b1.label!r} and {b2.label!r} were computed with different "
            f"simplex-dimension caps ({b1.max_dimension} vs {b2.max_dimension})")

    swap = _barcode_sort_key(b2) < _barcode_sort_key(b1)
    x, y = (b2, b1) if swap else (b1, b2)

    if cfg.dimensions is None:
        dims = tuple(range(b1.max_dimension))
    else:
        bad = [d for d in cfg.dimensions if d > b1.max_dimension]
        if bad:
            raise ValueError(f"requested dimensions {bad} exceed max_dimension {b1.max_dimension}")
        dims = cfg.dimensions

    matching = Matching()
    per_dim: dict[int, float] = {}
    total = 0.0
    for d in dims:
        xs = x.intervals_in_dim(d)
        ys = y.intervals_in_dim(d)
        x_fin = [iv for iv in xs if not math.isinf(iv.death)]
        y_fin = [iv for iv in ys if not math.isinf(iv.death)]
        x_ess = [iv for iv in xs if math.isinf(iv.death)]
        y_ess = [iv for iv in ys if math.isinf(iv.death)]

        dim_total = _assign_with_diagonal(x_fin, y_fin, cfg.p, matching)
        if cfg.essential_policy == "match-or-fail":
            if len(x_ess) != len(y_ess):
                return WassersteinResult(math.inf, {d: math.inf}, Matching())
            dim_total += _assign_by_birth(x_ess, y_ess, cfg.p, matching)
        else:
            xt = [_truncated(iv, x.enclosing_diameter) for iv in x_ess]
            yt = [_truncated(iv, y.enclosing_diameter) for iv in y_ess]
            ess_matching = Matching()
            dim_total += _assign_with_diagonal(xt, yt, cfg.p, ess_matching)
            # report the original (infinite) intervals in the matching
            by_id_x = {id(t): orig for t, orig in zip(xt, x_ess)}
            by_id_y = {id(t): orig for t, orig in zip(yt, y_ess)}
            matching.pairs.extend((by_id_x[id(a)], by_id_y[id(b)]) for a, b in ess_matching.pairs)
            matching.unmatched_1.extend(by_id_x[id(a)] for a in ess_matching.unmatched_1)
            matching.unmatched_2.extend(by_id_y[id(b)] for b in ess_matching.unmatched_2)

        per_dim[d] = dim_total ** (1.0 / cfg.p)
        total += dim_total

    distance = total ** (1.0 / cfg.p)
    if swap:
        matching = matching.swapped()
    return WassersteinResult(distance, per_dim, matching)


def wasserstein_distance(b1: Barcode, b2: Barcode,
                         cfg: WassersteinConfig | None = None) -> float:
    """p-Wasserstein distance between two barcodes (see module docstring)."""
    return wasserstein_details(b1, b2, cfg).distance
