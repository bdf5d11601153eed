"""Density-separation test for a single cluster against the rest of the data.

A cluster is *not* separated when some boundary point and its nearest outside
neighbour are joined by a straight segment along which the kernel density never
drops below ``lambda`` times the smaller of the two sides' peak densities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import EmptyCluster
from .graph import SimilarityGraph, gaussian_kernel


@dataclass(frozen=True)
class SeparationConfig:
    lam: float = 1.0
    segment_grid: int = 100

    def __post_init__(self):
        if not 0 < self.lam <= 1:
            raise ValueError(f"lambda must lie in (0, 1], got {self.lam}")
        if self.segment_grid < 1:
            raise ValueError("segment_grid must be >= 1")


@dataclass(frozen=True)
class Witness:
    boundary: int
    neighbor: int
    position: float
    density: float


@dataclass(frozen=True)
class SeparationVerdict:
    separated: bool
    witness: Witness | None = None
    threshold: float | None = None

    def __bool__(self):
        return self.separated


def _split(n, members):
    mask = np.zeros(n, dtype=bool)
    mask[np.asarray(members, dtype=np.int64)] = True
    inside = np.flatnonzero(mask)
    outside = np.flatnonzero(~mask)
    if inside.size == 0 or outside.size == 0:
        raise EmptyCluster("both the cluster and its complement must be non-empty")
    return inside, outside


def boundary_points(X, members, sqdist: np.ndarray | None = None) -> np.ndarray:
    """Members of the cluster that are nearest (ties included) to some outside point."""
    points = X.values if hasattr(X, "values") else np.asarray(X, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    inside, outside = _split(points.shape[0], members)
    if sqdist is None:
        sub = cdist(points[outside], points[inside], "sqeuclidean")
    else:
        sub = sqdist[np.ix_(outside, inside)]
    hits = (sub == sub.min(axis=1, keepdims=True)).any(axis=0)
    return inside[hits]


def kernel_density_at(G: SimilarityGraph, locations: np.ndarray) -> np.ndarray:
    """Unnormalized kernel density ``sum_i k(|z - x_i| / sigma)`` at each row of ``locations``."""
    return gaussian_kernel(cdist(locations, G.points, "sqeuclidean"), G.sigma).sum(axis=1)


def segment_positions(segment_grid: int) -> np.ndarray:
    """Weights on the boundary point, both endpoints included."""
    return np.linspace(0.0, 1.0, segment_grid + 2)


def segment_density(G: SimilarityGraph, x: int, y: int, segment_grid: int = 100):
    """Density along ``g * x_x + (1 - g) * x_y`` on the evaluation grid.

    Endpoint values are the on-sample densities ``D_ii + 1``. A zero-length
    segment is evaluated at its single point.
    """
    pts = G.points
    if np.array_equal(pts[x], pts[y]):
        return np.array([0.0]), np.array([G.degree[y] + 1.0])
    g = segment_positions(segment_grid)
    dens = np.empty_like(g)
    dens[0] = G.degree[y] + 1.0
    dens[-1] = G.degree[x] + 1.0
    interior = g[1:-1, None] * pts[x] + (1.0 - g[1:-1, None]) * pts[y]
    dens[1:-1] = kernel_density_at(G, interior)
    return g, dens


def is_density_separated(X, members, G: SimilarityGraph, cfg: SeparationConfig | None = None):
    """Decide whether the cluster ``members`` is density-separated from the rest.

    ``X`` is accepted for interface symmetry; the coordinates stored in ``G``
    are the ones used.
    """
    cfg = cfg or SeparationConfig()
    inside, outside = _split(G.n, members)
    dens = G.degree + 1.0
    threshold = min(dens[inside].max(), dens[outside].max())
    level = cfg.lam * threshold
    for b in boundary_points(G.points, inside, G.sqdist):
        y = int(outside[np.argmin(G.sqdist[b, outside])])
        # The segment minimum is at most its endpoint values.
        if min(dens[b], dens[y]) < level:
            continue
        g, along = segment_density(G, int(b), y, cfg.segment_grid)
        k = int(np.argmin(along))
        if along[k] >= level:
            return SeparationVerdict(
                False, Witness(int(b), y, float(g[k]), float(along[k])), float(threshold)
            )
    return SeparationVerdict(True, None, float(threshold))
