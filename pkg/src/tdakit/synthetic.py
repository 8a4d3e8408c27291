"""Seeded samplers for point clouds with known homology.

These supply ground truth for the persistence oracle suite (a circle has one
dominant loop, a torus two, a 2-sphere one enclosed volume) and the inputs for
the partition-size studies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metric_space import PointCloud

__all__ = ["MANIFOLD_KINDS", "ManifoldSpec", "sample"]

MANIFOLD_KINDS = ("circle", "two_clusters", "sphere_2", "torus",
                  "figure_eight", "uniform_noise")


@dataclass(frozen=True)
class ManifoldSpec:
    kind: str
    n: int
    noise_sigma: float = 0.0
    seed: int = 0
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in MANIFOLD_KINDS:
            raise ValueError(f"unknown manifold kind {self.kind!r}; "
                             f"choose from {MANIFOLD_KINDS}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if not self.scale > 0:
            raise ValueError("scale must be > 0")


def _circle(rng, n, scale):
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    return scale * np.stack([np.cos(theta), np.sin(theta)], axis=1)


def _two_clusters(rng, n, scale):
    # two centres separated by 10*scale; the blobs get their spread from noise_sigma
    n1 = n // 2
    centres = np.array([[-5.0 * scale, 0.0], [5.0 * scale, 0.0]])
    assign = np.concatenate([np.zeros(n1, dtype=int), np.ones(n - n1, dtype=int)])
    return centres[assign]


def _sphere_2(rng, n, scale):
    g = rng.standard_normal((n, 3))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return scale * g / norms


def _torus(rng, n, scale):
    # radii (2*scale, scale); rejection sampling in the tube angle keeps the
    # surface density uniform
    R, r = 2.0 * scale, scale
    u = rng.uniform(0.0, 2.0 * np.pi, size=n)
    v = np.empty(n)
    filled = 0
    while filled < n:
        cand = rng.uniform(0.0, 2.0 * np.pi, size=2 * (n - filled))
        accept = rng.uniform(0.0, 1.0, size=cand.size) <= (R + r * np.cos(cand)) / (R + r)
        good = cand[accept][:n - filled]
        v[filled:filled + good.size] = good
        filled += good.size
    x = (R + r * np.cos(v)) * np.cos(u)
    y = (R + r * np.cos(v)) * np.sin(u)
    z = r * np.sin(v)
    return np.stack([x, y, z], axis=1)


def _figure_eight(rng, n, scale):
    # two circles of radius scale tangent at the origin
    n1 = n // 2
    t1 = rng.uniform(0.0, 2.0 * np.pi, size=n1)
    t2 = rng.uniform(0.0, 2.0 * np.pi, size=n - n1)
    left = np.stack([-scale + scale * np.cos(t1), scale * np.sin(t1)], axis=1)
    right = np.stack([scale + scale * np.cos(t2), scale * np.sin(t2)], axis=1)
    return np.concatenate([left, right], axis=0)


def _uniform_noise(rng, n, scale):
    return rng.uniform(-scale, scale, size=(n, 2))


_SAMPLERS = {
    "circle": _circle,
    "two_clusters": _two_clusters,
    "sphere_2": _sphere_2,
    "torus": _torus,
    "figure_eight": _figure_eight,
    "uniform_noise": _uniform_noise,
}


def sample(spec: ManifoldSpec) -> PointCloud:
    """Draw a point cloud for the spec; deterministic given the seed."""
    rng = np.random.default_rng(spec.seed)
    pts = _SAMPLERS[spec.kind](rng, spec.n, spec.scale)
    if spec.noise_sigma > 0:
        pts = pts + spec.noise_sigma * rng.standard_normal(pts.shape)
    return PointCloud(spec.kind, pts)
