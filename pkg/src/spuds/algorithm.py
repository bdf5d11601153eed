"""SPUDS: spectral clustering with the cluster count chosen by density separation.

The number of clusters is moved up (or down) from ``c0`` until the largest
``c`` is found for which every non-outlier cluster of the spectral solution is
density-separated from the rest. Outlier clusters (fewer than ``gamma`` points)
are exempt from the check and merged into their nearest substantive cluster at
the end.
"""

from __future__ import annotations

import logging
import math
import time
from collections import defaultdict
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.spatial.distance import cdist

from .dataset import as_data_matrix
from .density import SeparationConfig, is_density_separated
from .eigen import SpectralEmbedder
from .errors import AllOutliers, ConfigError
from .graph import DEFAULT_MAX_N, Partition, build_graph
from .kmeans import KMeansConfig, kmeans
from .scale import compute_sigma

log = logging.getLogger(__name__)

NO_VALID_CLUSTERING = "no_valid_clustering"
C_MAX_REACHED = "c_max_reached"
ALL_OUTLIERS = "all_outliers"


@dataclass(frozen=True)
class SpudsConfig:
    c0: int = 30
    lam: float = 1.0
    gamma_frac: float = 1 / 200
    step: int = 1
    c_max: int | None = None
    sigma_override: float | None = None
    kmeans: KMeansConfig = field(default_factory=KMeansConfig)
    seed: int = 0
    segment_grid: int = 100
    max_n: int = DEFAULT_MAX_N

    def __post_init__(self):
        if self.c0 < 1:
            raise ConfigError("c0 must be >= 1")
        if not 0 < self.lam <= 1:
            raise ConfigError(f"lambda must lie in (0, 1], got {self.lam}")
        if not self.gamma_frac > 0:
            raise ConfigError("gamma_frac must be positive")
        if self.step < 1:
            raise ConfigError("step must be >= 1")
        if self.c_max is not None and self.c_max < 1:
            raise ConfigError("c_max must be >= 1")
        if self.c_max is not None and self.c0 > self.c_max:
            raise ConfigError(f"c0={self.c0} exceeds c_max={self.c_max}")
        if self.sigma_override is not None and not (
            math.isfinite(self.sigma_override) and self.sigma_override > 0
        ):
            raise ConfigError("sigma_override must be positive and finite")

    def resolved_c_max(self, n: int) -> int:
        return self.c_max if self.c_max is not None else min(n - 1, 100)

    def outlier_size(self, n: int) -> int:
        return max(1, math.ceil(n * self.gamma_frac))


@dataclass(frozen=True)
class TraceEntry:
    c: int
    sizes: tuple
    verdicts: tuple  # per cluster: True/False, or None for exempt outliers
    assignment: np.ndarray = field(repr=False, compare=False)

    @property
    def all_separated(self) -> bool:
        return all(v is not False for v in self.verdicts)

    def as_dict(self):
        return {
            "c": self.c,
            "sizes": list(self.sizes),
            "verdicts": ["outlier" if v is None else v for v in self.verdicts],
            "all_separated": self.all_separated,
        }


@dataclass(frozen=True)
class SpudsResult:
    partition: Partition
    selected_c: int
    sigma: float
    gamma: int
    trace: list
    merges: list
    warnings: list
    scale: object = None
    timings: dict = field(default_factory=dict)
    solver_calls: int = 0

    @property
    def labels(self) -> np.ndarray:
        return self.partition.assignment

    @property
    def fallback(self) -> bool:
        return NO_VALID_CLUSTERING in self.warnings

    def as_dict(self):
        return {
            "labels": self.labels.tolist(),
            "n_clusters": self.partition.c,
            "selected_c": self.selected_c,
            "sigma": self.sigma,
            "gamma": self.gamma,
            "trace": [t.as_dict() for t in self.trace],
            "merges": [list(m) for m in self.merges],
            "warnings": list(self.warnings),
            "eigensolver_calls": self.solver_calls,
        }


def cluster_distance(points, a, b, sqdist=None) -> float:
    """Single-linkage (minimum pairwise) Euclidean distance between index sets."""
    if sqdist is not None:
        return float(np.sqrt(sqdist[np.ix_(a, b)].min()))
    return float(np.sqrt(cdist(points[a], points[b], "sqeuclidean").min()))


def merge_outliers(X, P: Partition, gamma: int, sqdist=None):
    """Absorb every cluster smaller than ``gamma`` into its nearest substantive cluster.

    Distances are measured against the original substantive clusters, so merges
    never cascade. Returns the merged partition (substantive clusters relabelled
    ``0..m-1`` in their original order) and a list of ``(outlier, target)``
    pairs in pre-merge ids.
    """
    points = as_data_matrix(X).values
    sizes = P.sizes()
    outliers = [k for k in range(P.c) if sizes[k] < gamma]
    substantive = [k for k in range(P.c) if sizes[k] >= gamma]
    if not substantive:
        raise AllOutliers(f"no cluster has at least gamma={gamma} points")
    members = {k: P.members(k) for k in range(P.c)}
    merged = P.assignment.copy()
    log_ = []
    for o in outliers:
        dists = [cluster_distance(points, members[o], members[s], sqdist) for s in substantive]
        target = substantive[int(np.argmin(dists))]
        merged[members[o]] = target
        log_.append((o, target))
    relabel = np.full(P.c, -1, dtype=np.int64)
    relabel[substantive] = np.arange(len(substantive))
    return Partition(relabel[merged], len(substantive)), log_


def kmeans_seed(seed: int, c: int) -> int:
    return int(np.random.SeedSequence([int(seed) % (1 << 64), c]).generate_state(1, np.uint64)[0])


class _Search:
    """State shared across the c-loop: graph, eigenpair cache, timings."""

    def __init__(self, X, G, cfg: SpudsConfig, gamma: int):
        self.X = X
        self.G = G
        self.cfg = cfg
        self.gamma = gamma
        self.sep_cfg = SeparationConfig(cfg.lam, cfg.segment_grid)
        t = time.perf_counter()
        self.embedder = SpectralEmbedder(G)
        self.timings = defaultdict(float)
        self.timings["laplacian"] = time.perf_counter() - t
        self.per_c = defaultdict(dict)
        self.trace: list[TraceEntry] = []
        self._seen: dict[int, TraceEntry] = {}

    def evaluate(self, c: int) -> TraceEntry:
        if c in self._seen:
            return self._seen[c]
        n = self.G.n
        if c == 1:
            entry = TraceEntry(1, (n,), (True,), np.zeros(n, dtype=np.int64))
        else:
            t0 = time.perf_counter()
            emb = self.embedder.embed(c)
            t1 = time.perf_counter()
            km_cfg = replace(self.cfg.kmeans, seed=kmeans_seed(self.cfg.seed, c))
            P = kmeans(emb.scaled, c, km_cfg)
            t2 = time.perf_counter()
            sizes = P.sizes()
            verdicts = []
            for k in range(c):
                if sizes[k] < self.gamma:
                    verdicts.append(None)
                else:
                    verdicts.append(
                        is_density_separated(self.X, P.members(k), self.G, self.sep_cfg).separated
                    )
            t3 = time.perf_counter()
            self.per_c[c] = {"eigensolve": t1 - t0, "kmeans": t2 - t1, "separation": t3 - t2}
            for key, val in self.per_c[c].items():
                self.timings[key] += val
            entry = TraceEntry(c, tuple(int(s) for s in sizes), tuple(verdicts), P.assignment)
        log.debug("c=%d sizes=%s verdicts=%s", c, entry.sizes, entry.verdicts)
        self._seen[c] = entry
        self.trace.append(entry)
        return entry


def spuds_cluster(X, cfg: SpudsConfig | None = None) -> SpudsResult:
    """Cluster ``X`` with SPUDS.

    Parameters
    ----------
    X : DataMatrix or array-like of shape (n, d)
    cfg : SpudsConfig, optional
        Defaults: ``c0=30``, ``lam=1``, ``gamma_frac=1/200``, ``step=1``.

    Returns
    -------
    SpudsResult
        ``warnings`` contains ``"no_valid_clustering"`` when no ``c >= 2``
        yields an all-separated solution (the single-cluster result is
        returned) and ``"c_max_reached"`` when the ascent was capped.
    """
    cfg = cfg or SpudsConfig()
    X = as_data_matrix(X)
    n = X.n
    if n < 4:
        raise ConfigError(f"need at least 4 observations, got {n}")
    c_max = cfg.resolved_c_max(n)
    if c_max > n - 1:
        raise ConfigError(f"c_max={c_max} must be below n={n}")
    warnings = []
    c0 = cfg.c0
    if c0 > c_max:
        log.warning("c0=%d exceeds c_max=%d; starting at c_max", c0, c_max)
        c0 = c_max
    gamma = cfg.outlier_size(n)

    t = time.perf_counter()
    scale = None
    if cfg.sigma_override is not None:
        sigma = float(cfg.sigma_override)
    else:
        scale = compute_sigma(X)
        sigma = scale.sigma
    t_scale = time.perf_counter() - t
    t = time.perf_counter()
    G = build_graph(X, sigma, max_n=cfg.max_n)
    t_graph = time.perf_counter() - t

    search = _Search(X, G, cfg, gamma)
    search.timings["scale"] = t_scale
    search.timings["graph"] = t_graph

    current = search.evaluate(c0)
    if current.all_separated:
        stored = current
        c = c0
        while True:
            if c >= c_max:
                warnings.append(C_MAX_REACHED)
                break
            nxt = search.evaluate(min(c + cfg.step, c_max))
            if nxt.all_separated:
                stored, c = nxt, nxt.c
                continue
            # Fine-tune downward when the ascent skipped values.
            for cc in range(nxt.c - 1, stored.c, -1):
                cand = search.evaluate(cc)
                if cand.all_separated:
                    stored = cand
                    break
            break
    else:
        stored = None
        for c in range(c0 - 1, 0, -1):
            cand = search.evaluate(c)
            if cand.all_separated:
                stored = cand
                break
    if stored.c == 1:
        warnings.append(NO_VALID_CLUSTERING)

    t = time.perf_counter()
    pre = Partition(stored.assignment, stored.c)
    try:
        final, merges = merge_outliers(X, pre, gamma, G.sqdist)
    except AllOutliers:
        warnings.append(ALL_OUTLIERS)
        final, merges = pre, []
    search.timings["merge"] = time.perf_counter() - t

    timings = dict(search.timings)
    timings["per_c"] = {str(k): v for k, v in sorted(search.per_c.items())}
    return SpudsResult(
        partition=final,
        selected_c=stored.c,
        sigma=sigma,
        gamma=gamma,
        trace=list(search.trace),
        merges=merges,
        warnings=warnings,
        scale=scale,
        timings=timings,
        solver_calls=search.embedder.solver_calls,
    )
