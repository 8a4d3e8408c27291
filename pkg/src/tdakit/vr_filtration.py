"""Vietoris–Rips filtration construction.

Filtration values are simplex DIAMETERS (largest pairwise distance among the
simplex vertices). The user-facing scale parameter epsilon is a ball radius:
balls of radius epsilon around two points intersect when their distance is at
most 2*epsilon, so a simplex is present at radius epsilon exactly when its
diameter is <= 2*epsilon (inclusive at the threshold).

Simplices are ordered by (diameter, dimension, lexicographic vertex tuple),
which is total, deterministic, and places every face before its cofaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .errors import CapacityError
from .metric_space import DistanceMatrix

__all__ = [
    "FilteredSimplex",
    "Filtration",
    "FiltrationParams",
    "DEFAULT_SIMPLEX_BUDGET",
    "build_filtration",
    "complex_at_scale",
    "filtration_dump_lines",
]

DEFAULT_SIMPLEX_BUDGET = 50_000_000


@dataclass(frozen=True)
class FiltrationParams:
    """Bundle of build_filtration arguments for pipelines."""

    max_dimension: int = 2
    diameter_cap: float | None = None
    budget: int = DEFAULT_SIMPLEX_BUDGET


class FilteredSimplex(NamedTuple):
    """A simplex with its appearance scale (diameter units)."""

    vertices: tuple[int, ...]
    dimension: int
    diameter: float


class Filtration:
    """All simplices up to a dimension cap, in deterministic filtration order.

    Stores one (vertex-array, diameter-array) pair per dimension; each
    dimension is locally sorted by (diameter, lexicographic vertices), and the
    global order interleaves dimensions by (diameter, dimension, vertices).
    Behaves as an immutable sequence of FilteredSimplex.
    """

    def __init__(self, verts_by_dim: dict[int, np.ndarray],
                 diams_by_dim: dict[int, np.ndarray],
                 max_dimension: int, enclosing_diameter: float,
                 diameter_cap: float | None):
        self._verts = verts_by_dim
        self._diams = diams_by_dim
        self.max_dimension = max_dimension
        self.enclosing_diameter = enclosing_diameter
        self.diameter_cap = diameter_cap
        self.n_vertices = int(verts_by_dim[0].shape[0])
        self._g_dim: np.ndarray | None = None
        self._g_local: np.ndarray | None = None
        self._g_of: dict[int, np.ndarray] | None = None

    # ---- per-dimension access (read-only views) ----

    def dims(self) -> list[int]:
        return [d for d in range(self.max_dimension + 1) if len(self._diams.get(d, ())) > 0]

    def count(self, dim: int) -> int:
        return int(self._diams[dim].shape[0]) if dim in self._diams else 0

    def vertices_of(self, dim: int) -> np.ndarray:
        """(N_d, dim+1) int32 array, rows sorted by (diameter, lex)."""
        return self._verts[dim]

    def diameters_of(self, dim: int) -> np.ndarray:
        return self._diams[dim]

    # ---- global filtration order ----

    def _ensure_global(self) -> None:
        if self._g_dim is not None:
            return
        dims = []
        diams = []
        local = []
        for d in sorted(self._diams):
            n_d = self._diams[d].shape[0]
            dims.append(np.full(n_d, d, dtype=np.int8))
            diams.append(self._diams[d])
            local.append(np.arange(n_d, dtype=np.intp))
        dims_c = np.concatenate(dims)
        diams_c = np.concatenate(diams)
        local_c = np.concatenate(local)
        # local rank already encodes (diameter, lex) within a dimension
        order = np.lexsort((local_c, dims_c, diams_c))
        self._g_dim = dims_c[order]
        self._g_local = local_c[order]
        positions = np.arange(order.shape[0], dtype=np.intp)
        self._g_of = {}
        for d in sorted(self._diams):
            mask = self._g_dim == d
            of = np.empty(self._diams[d].shape[0], dtype=np.intp)
            of[self._g_local[mask]] = positions[mask]
            self._g_of[d] = of

    def global_position(self, dim: int, local_rank: int) -> int:
        """Position in the global filtration order of the given simplex."""
        self._ensure_global()
        return int(self._g_of[dim][local_rank])

    def global_positions_of(self, dim: int) -> np.ndarray:
        self._ensure_global()
        return self._g_of[dim]

    def __len__(self) -> int:
        return sum(int(a.shape[0]) for a in self._diams.values())

    def __getitem__(self, i: int) -> FilteredSimplex:
        self._ensure_global()
        if i < 0:
            i += len(self)
        if not 0 <= i < len(self):
            raise IndexError(i)
        d = int(self._g_dim[i])
        loc = int(self._g_local[i])
        return FilteredSimplex(tuple(int(v) for v in self._verts[d][loc]),
                               d, float(self._diams[d][loc]))

    def __iter__(self) -> Iterator[FilteredSimplex]:
        self._ensure_global()
        for d, loc in zip(self._g_dim, self._g_local):
            yield FilteredSimplex(tuple(int(v) for v in self._verts[int(d)][int(loc)]),
                                  int(d), float(self._diams[int(d)][int(loc)]))


def _sort_local(verts: np.ndarray, diams: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    keys = tuple(verts[:, j] for j in reversed(range(verts.shape[1]))) + (diams,)
    order = np.lexsort(keys)
    return np.ascontiguousarray(verts[order]), diams[order]


def _extend_dimension(verts: np.ndarray, diams: np.ndarray, adj: np.ndarray,
                      D: np.ndarray, seen: int, budget: int) -> tuple[np.ndarray, np.ndarray]:
    """All (k+1)-simplices obtained by appending a vertex above each k-simplex."""
    n = adj.shape[0]
    col_idx = np.arange(n)
    chunk = max(1, (64 << 20) // max(n, 1))  # bound the candidate mask to ~64 MB
    out_v: list[np.ndarray] = []
    out_d: list[np.ndarray] = []
    total = seen
    for start in range(0, verts.shape[0], chunk):
        V = verts[start:start + chunk]
        dm = diams[start:start + chunk]
        cand = adj[V[:, 0]].copy()
        for j in range(1, V.shape[1]):
            cand &= adj[V[:, j]]
        cand &= col_idx[None, :] > V[:, -1][:, None]
        rows, new_v = np.nonzero(cand)
        if rows.size == 0:
            continue
        total += rows.size
        if total > budget:
            raise CapacityError(
                f"simplex count exceeds the budget of {budget}; "
                f"lower max_dimension, set a diameter cap, or raise the budget")
        newV = np.concatenate([V[rows], new_v[:, None].astype(np.int32)], axis=1)
        nd = dm[rows]
        for j in range(V.shape[1]):
            nd = np.maximum(nd, D[V[rows, j], new_v])
        out_v.append(newV)
        out_d.append(nd)
    if not out_v:
        return (np.empty((0, verts.shape[1] + 1), dtype=np.int32),
                np.empty(0, dtype=np.float64))
    return np.concatenate(out_v), np.concatenate(out_d)


def build_filtration(dist: DistanceMatrix, max_dimension: int = 2,
                     diameter_cap: float | None = None,
                     budget: int = DEFAULT_SIMPLEX_BUDGET) -> Filtration:
    """Enumerate every simplex of dimension <= max_dimension with diameter <= cap.

    The cap defaults to the enclosing diameter (no truncation). Raises
    CapacityError, never truncates silently, when the simplex count would
    exceed the budget.
    """
    if max_dimension < 0:
        raise ValueError("max_dimension must be >= 0")
    if diameter_cap is not None and diameter_cap < 0:
        raise ValueError("diameter_cap must be >= 0")
    n = dist.n
    D = dist.entries
    enclosing = dist.enclosing_diameter
    cap = enclosing if diameter_cap is None else float(diameter_cap)

    if diameter_cap is None or diameter_cap >= enclosing:
        predicted = sum(math.comb(n, k + 1) for k in range(max_dimension + 1))
        if predicted > budget:
            raise CapacityError(
                f"full filtration would hold {predicted} simplices "
                f"(budget {budget}); set a diameter cap or subsample")

    verts_by_dim: dict[int, np.ndarray] = {
        0: np.arange(n, dtype=np.int32).reshape(n, 1)}
    diams_by_dim: dict[int, np.ndarray] = {0: np.zeros(n, dtype=np.float64)}
    total = n
    if total > budget:
        raise CapacityError(f"vertex count {n} exceeds the budget of {budget}")

    if max_dimension >= 1 and n >= 2:
        iu, ju = np.triu_indices(n, k=1)
        dd = D[iu, ju]
        keep = dd <= cap
        ev = np.stack([iu[keep], ju[keep]], axis=1).astype(np.int32)
        ed = dd[keep]
        total += ev.shape[0]
        if total > budget:
            raise CapacityError(f"simplex count exceeds the budget of {budget}")
        ev, ed = _sort_local(ev, ed)
        verts_by_dim[1] = ev
        diams_by_dim[1] = ed

        adj = (D <= cap) & ~np.eye(n, dtype=bool)
        for d in range(2, max_dimension + 1):
            prev_v = verts_by_dim.get(d - 1)
            if prev_v is None or prev_v.shape[0] == 0:
                break
            sv, sd = _extend_dimension(prev_v, diams_by_dim[d - 1], adj, D, total, budget)
            if sv.shape[0] == 0:
                break
            total += sv.shape[0]
            sv, sd = _sort_local(sv, sd)
            verts_by_dim[d] = sv
            diams_by_dim[d] = sd

    return Filtration(verts_by_dim, diams_by_dim, max_dimension, enclosing, diameter_cap)


def complex_at_scale(filt: Filtration, epsilon: float) -> list[FilteredSimplex]:
    """Simplices present at ball radius epsilon (diameter <= 2*epsilon), in order."""
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    threshold = 2.0 * epsilon
    out = []
    for s in filt:
        if s.diameter <= threshold:
            out.append(s)
    return out


def filtration_dump_lines(filt: Filtration) -> Iterator[str]:
    """Debug dump: 'diameter dim v0 v1 ... vk' per simplex, in filtration order."""
    for s in filt:
        yield f"{s.diameter!r} {s.dimension} " + " ".join(str(v) for v in s.vertices)
