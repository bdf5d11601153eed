"""Lloyd's k-means with k-means++ seeding and reproducible restarts.

Restart ``r`` draws from ``numpy.random.Philox(key=seed + r)``, a
counter-based generator whose stream is fixed across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .graph import Partition

_UINT64 = 1 << 64


@dataclass(frozen=True)
class KMeansConfig:
    restarts: int = 10
    max_iters: int = 100
    seed: int = 0
    tol: float = 1e-9

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be >= 1")
        if self.tol < 0:
            raise ValueError("tol must be non-negative")


@dataclass
class KMeansResult:
    partition: Partition
    centers: np.ndarray
    distortion: float
    restart: int
    restart_distortions: list = field(default_factory=list)
    histories: list = field(default_factory=list)


def restart_generator(seed: int, restart: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(int(seed) + restart) % _UINT64))


def kmeans_plusplus(rows: np.ndarray, c: int, rng: np.random.Generator) -> np.ndarray:
    n = rows.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = cdist(rows, rows[chosen], "sqeuclidean")[:, 0]
    for _ in range(1, c):
        total = d2.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=d2 / total))
        else:
            nxt = int(rng.integers(n))
        chosen.append(nxt)
        d2 = np.minimum(d2, cdist(rows, rows[[nxt]], "sqeuclidean")[:, 0])
    return rows[chosen].copy()


def _repair_empty(assign, dist_own, c):
    counts = np.bincount(assign, minlength=c)
    for k in np.flatnonzero(counts == 0):
        movable = counts[assign] > 1
        cand = np.where(movable, dist_own, -np.inf)
        p = int(np.argmax(cand))
        counts[assign[p]] -= 1
        assign[p] = k
        counts[k] = 1
        dist_own[p] = 0.0
    return assign


def _centers(rows, assign, c):
    sums = np.zeros((c, rows.shape[1]))
    np.add.at(sums, assign, rows)
    return sums / np.bincount(assign, minlength=c)[:, None]


def _lloyd(rows, c, cfg, rng):
    centers = kmeans_plusplus(rows, c, rng)
    history = []
    prev = None
    assign = None
    for _ in range(cfg.max_iters):
        dist = cdist(rows, centers, "sqeuclidean")
        new = np.argmin(dist, axis=1)
        dist_own = dist[np.arange(rows.shape[0]), new]
        new = _repair_empty(new, dist_own, c)
        centers = _centers(rows, new, c)
        distortion = float(np.sum((rows - centers[new]) ** 2))
        history.append(distortion)
        stable = assign is not None and np.array_equal(new, assign)
        assign = new
        if stable:
            break
        if prev is not None and prev - distortion <= cfg.tol * max(prev, np.finfo(float).tiny):
            break
        prev = distortion
    return assign, centers, history[-1], history


def kmeans_fit(rows, c: int, cfg: KMeansConfig | None = None) -> KMeansResult:
    cfg = cfg or KMeansConfig()
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim == 1:
        rows = rows[:, None]
    n = rows.shape[0]
    if not 1 <= c <= n:
        raise ValueError(f"c must lie in 1..{n}, got {c}")
    best = None
    distortions, histories = [], []
    for r in range(cfg.restarts):
        assign, centers, distortion, history = _lloyd(rows, c, cfg, restart_generator(cfg.seed, r))
        distortions.append(distortion)
        histories.append(history)
        if best is None or distortion < best[2]:
            best = (assign, centers, distortion, r)
    assign, centers, distortion, r = best
    return KMeansResult(
        partition=Partition(assign, c),
        centers=centers,
        distortion=distortion,
        restart=r,
        restart_distortions=distortions,
        histories=histories,
    )


def kmeans(rows, c: int, cfg: KMeansConfig | None = None) -> Partition:
    """Best-of-restarts k-means partition of the rows of ``rows``."""
    return kmeans_fit(rows, c, cfg).partition
