"""Bottom eigenpairs of the normalized Laplacian and the relaxed NCut embedding."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .errors import ConvergenceFailure, NonSymmetric
from .graph import SimilarityGraph, laplacian

log = logging.getLogger(__name__)

DENSE_LIMIT = 2000
RESIDUAL_TOL = 1e-8
SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class SpectralEmbedding:
    vectors: np.ndarray
    values: np.ndarray
    scaled: np.ndarray | None = None

    @property
    def c(self) -> int:
        return self.vectors.shape[1]


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry is positive (first index on ties)."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def residuals(L: np.ndarray, vectors: np.ndarray, values: np.ndarray) -> np.ndarray:
    return np.linalg.norm(L @ vectors - vectors * values, axis=0)


def _dense(L, c):
    values, vectors = scipy.linalg.eigh(L, subset_by_index=[0, c - 1], driver="evr")
    return values, vectors


def _lanczos(L, c, maxiter):
    n = L.shape[0]
    # Fixed start vector keeps ARPACK deterministic.
    v0 = np.random.Generator(np.random.Philox(0)).standard_normal(n)
    try:
        values, vectors = eigsh(
            L, k=c, which="SA", v0=v0, tol=1e-13, maxiter=maxiter, ncv=min(n, max(2 * c + 1, c + 32))
        )
    except ArpackNoConvergence as exc:
        raise ConvergenceFailure(f"Lanczos did not converge for k={c}: {exc}") from None
    order = np.argsort(values, kind="stable")
    return values[order], vectors[:, order]


def smallest_eigenpairs(L, c: int, dense_limit: int = DENSE_LIMIT) -> SpectralEmbedding:
    """The ``c`` eigenpairs of symmetric ``L`` with smallest eigenvalues.

    Dense LAPACK for ``n <= dense_limit``, implicitly restarted Lanczos (ARPACK)
    otherwise. Eigenvalues are ascending; signs follow :func:`fix_signs`.
    """
    L = np.asarray(L, dtype=np.float64)
    n = L.shape[0]
    if L.shape != (n, n):
        raise NonSymmetric(f"expected a square matrix, got {L.shape}")
    if not 1 <= c <= n:
        raise ValueError(f"c must lie in 1..{n}, got {c}")
    asym = np.max(np.abs(L - L.T)) if n else 0.0
    if asym > SYMMETRY_TOL:
        raise NonSymmetric(f"matrix is not symmetric (max asymmetry {asym:.3g})")
    # Lanczos needs k < n; fall back to dense when the request is (nearly) full.
    if n <= dense_limit or c >= n - 1:
        values, vectors = _dense(L, c)
    else:
        values, vectors = _lanczos(L, c, maxiter=10 * n)
        res = residuals(L, vectors, values)
        bad = res > RESIDUAL_TOL * np.maximum(1.0, np.abs(values))
        if np.any(bad):
            raise ConvergenceFailure(
                f"residual {res.max():.3g} exceeds tolerance for {int(bad.sum())} eigenpair(s)"
            )
    return SpectralEmbedding(vectors=fix_signs(vectors), values=values)


class SpectralEmbedder:
    """Caches eigenpairs of one graph's Laplacian across calls with varying ``c``.

    ``solver_calls`` counts eigensolver invocations; small graphs are solved
    completely on the first call, large ones in growing chunks.
    """

    def __init__(self, G: SimilarityGraph, dense_limit: int = DENSE_LIMIT, chunk: int = 10):
        self.graph = G
        self.L = laplacian(G)
        self.dinv_sqrt = 1.0 / np.sqrt(G.degree)
        self.dense_limit = dense_limit
        self.chunk = chunk
        self.solver_calls = 0
        self._values = np.empty(0)
        self._vectors = np.empty((G.n, 0))

    @property
    def cached(self) -> int:
        return self._values.shape[0]

    def _extend(self, c):
        n = self.graph.n
        if n <= self.dense_limit:
            k = n
        else:
            k = min(n, max(c + self.chunk, 2 * self.cached))
        emb = smallest_eigenpairs(self.L, k, dense_limit=self.dense_limit)
        self.solver_calls += 1
        log.debug("eigensolve: %d pairs (call %d)", k, self.solver_calls)
        self._values, self._vectors = emb.values, emb.vectors

    def embed(self, c: int) -> SpectralEmbedding:
        if not 1 <= c <= self.graph.n:
            raise ValueError(f"c must lie in 1..{self.graph.n}, got {c}")
        if c > self.cached:
            self._extend(c)
        U = self._vectors[:, :c]
        return SpectralEmbedding(
            vectors=U, values=self._values[:c], scaled=U * self.dinv_sqrt[:, None]
        )


def spectral_embed(G: SimilarityGraph, c: int) -> SpectralEmbedding:
    return SpectralEmbedder(G).embed(c)
