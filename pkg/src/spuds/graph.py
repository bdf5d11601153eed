"""Gaussian similarity graph and the cut functionals defined on it."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .dataset import as_data_matrix
from .errors import (
    DimensionMismatch,
    InvalidSigma,
    IsolatedVertex,
    RequiresTwoClusters,
    TooLarge,
    ZeroVolumeCluster,
)

DEFAULT_MAX_N = 20000
MIN_DEGREE = 1e-300


def gaussian_kernel(sqdist, sigma):
    """``exp(-r^2 / (2 sigma^2))`` evaluated on squared distances."""
    return np.exp(-np.asarray(sqdist) / (2.0 * sigma * sigma))


@dataclass(frozen=True)
class SimilarityGraph:
    affinity: np.ndarray
    degree: np.ndarray
    sigma: float
    points: np.ndarray
    sqdist: np.ndarray

    @property
    def n(self) -> int:
        return self.affinity.shape[0]


@dataclass(frozen=True)
class Partition:
    """Assignment of ``n`` points to clusters ``0..c-1``, none of them empty."""

    assignment: np.ndarray
    c: int

    def __post_init__(self):
        a = np.asarray(self.assignment, dtype=np.int64).copy()
        if a.ndim != 1:
            raise DimensionMismatch("assignment must be 1-d")
        c = int(self.c)
        counts = np.bincount(a, minlength=c) if a.size else np.zeros(c, dtype=np.int64)
        if a.size and (a.min() < 0 or a.max() >= c):
            raise ValueError(f"cluster ids must lie in 0..{c - 1}")
        if np.any(counts[:c] == 0):
            raise ValueError("every cluster id must be used at least once")
        a.setflags(write=False)
        object.__setattr__(self, "assignment", a)
        object.__setattr__(self, "c", c)

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        """Relabel arbitrary ids onto ``0..c-1`` preserving their sorted order."""
        uniq, inv = np.unique(np.asarray(labels), return_inverse=True)
        return cls(inv.astype(np.int64), len(uniq))

    @property
    def n(self) -> int:
        return self.assignment.shape[0]

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.c)

    def members(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == k)

    def indicator(self) -> np.ndarray:
        Z = np.zeros((self.n, self.c))
        Z[np.arange(self.n), self.assignment] = 1.0
        return Z


def build_graph(X, sigma: float, max_n: int = DEFAULT_MAX_N) -> SimilarityGraph:
    """Dense affinity ``A_ij = exp(-|x_i - x_j|^2 / (2 sigma^2))`` with zero diagonal."""
    X = as_data_matrix(X)
    if not (isinstance(sigma, (int, float, np.floating)) and math.isfinite(sigma) and sigma > 0):
        raise InvalidSigma(f"sigma must be positive and finite, got {sigma!r}")
    if X.n > max_n:
        raise TooLarge(f"n={X.n} exceeds the dense graph limit {max_n}; subsample first")
    # pdist works on coordinate differences, so coincident points get exactly 0.
    sq = squareform(pdist(X.values, metric="sqeuclidean"))
    A = gaussian_kernel(sq, float(sigma))
    np.fill_diagonal(A, 0.0)
    D = A.sum(axis=1)
    for arr in (A, D, sq):
        arr.setflags(write=False)
    return SimilarityGraph(affinity=A, degree=D, sigma=float(sigma), points=X.values, sqdist=sq)


def laplacian(G: SimilarityGraph) -> np.ndarray:
    """Symmetric normalized Laplacian ``I - D^-1/2 A D^-1/2``."""
    if np.any(G.degree < MIN_DEGREE):
        bad = int(np.argmin(G.degree))
        raise IsolatedVertex(
            f"vertex {bad} has degree {G.degree[bad]:.3g}; sigma={G.sigma:.3g} is too small"
        )
    dinv = 1.0 / np.sqrt(G.degree)
    L = -(G.affinity * np.outer(dinv, dinv))
    L[np.diag_indices_from(L)] += 1.0
    return L


def _check(G: SimilarityGraph, P: Partition):
    if P.n != G.n:
        raise DimensionMismatch(f"partition has {P.n} points, graph has {G.n}")


def cluster_cuts(G: SimilarityGraph, P: Partition):
    """Per-cluster ``Cut(C_k, X \\ C_k)`` and ``vol(C_k)``."""
    _check(G, P)
    Z = P.indicator()
    B = G.affinity @ Z
    B[np.arange(P.n), P.assignment] = 0.0
    cuts = Z.T @ B.sum(axis=1)
    return cuts, Z.T @ G.degree


def cut_value(G: SimilarityGraph, P: Partition) -> float:
    cuts, _ = cluster_cuts(G, P)
    return float(cuts.sum() / 2.0)


def ncut_value(G: SimilarityGraph, P: Partition) -> float:
    cuts, vol = cluster_cuts(G, P)
    if np.any(vol <= 0):
        raise ZeroVolumeCluster(f"cluster(s) {np.flatnonzero(vol <= 0).tolist()} have zero volume")
    return float(np.sum(cuts / vol))


def ratio_cut_value(G: SimilarityGraph, P: Partition) -> float:
    if P.c != 2:
        raise RequiresTwoClusters(f"Ratio Cut is defined for 2 clusters, got {P.c}")
    cuts, _ = cluster_cuts(G, P)
    sizes = P.sizes()
    return float(cuts[0] * (1.0 / sizes[0] + 1.0 / sizes[1]))


def point_density(G: SimilarityGraph, i: int) -> float:
    """Unnormalized kernel density at ``x_i``: the degree plus the self term ``k(0) = 1``."""
    return float(G.degree[i] + 1.0)
