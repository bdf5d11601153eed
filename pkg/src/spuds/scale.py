"""Data-driven choice of the Gaussian scale parameter.

``sigma = s(X) * n ** (-1 / (2 d + 3))`` where ``s(X)`` is the square root of
the mean of the leading ``d'`` covariance eigenvalues and ``d'`` comes from
Kaiser's criterion on the correlation matrix.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .dataset import as_data_matrix
from .errors import DegenerateData

log = logging.getLogger(__name__)

MAX_INTRINSIC_DIM = 20
# Eigenvalues of an exactly-identity correlation matrix come back as 1 - O(eps).
_KAISER_SLACK = 1e-10


@dataclass(frozen=True)
class ScaleReport:
    intrinsic_dim: int
    s_value: float
    sigma: float
    covariance_eigenvalues: np.ndarray
    n: int
    d: int

    def as_dict(self):
        return {
            "intrinsic_dim": self.intrinsic_dim,
            "s_value": self.s_value,
            "sigma": self.sigma,
            "covariance_eigenvalues": self.covariance_eigenvalues.tolist(),
        }


def sigma_rule(s_value: float, n: int, d: int) -> float:
    return s_value * n ** (-1.0 / (2 * d + 3))


def kaiser_intrinsic_dim(X) -> int:
    """Number of correlation-matrix eigenvalues >= 1, clamped to ``[1, min(d, 20)]``.

    Constant features are dropped from the correlation matrix with a warning.
    """
    X = as_data_matrix(X)
    values = X.values
    std = values.std(axis=0, ddof=1)
    keep = std > 0
    if not keep.any():
        raise DegenerateData("every feature is constant")
    if not keep.all():
        log.warning("ignoring %d constant feature(s) in Kaiser's criterion", int((~keep).sum()))
    kept = values[:, keep]
    if kept.shape[1] == 1:
        count = 1
    else:
        corr = np.corrcoef(kept, rowvar=False)
        eig = np.linalg.eigvalsh(corr)
        count = int(np.sum(eig >= 1.0 - _KAISER_SLACK))
    return max(1, min(count, MAX_INTRINSIC_DIM, X.d))


def compute_sigma(X) -> ScaleReport:
    X = as_data_matrix(X)
    d_prime = kaiser_intrinsic_dim(X)
    cov = np.atleast_2d(np.cov(X.values, rowvar=False, ddof=1))
    eig = np.linalg.eigvalsh(cov)[::-1].copy()
    eig = np.maximum(eig, 0.0)
    s_value = math.sqrt(float(np.mean(eig[:d_prime])))
    if s_value <= 0:
        raise DegenerateData("leading covariance eigenvalues are all zero")
    eig.setflags(write=False)
    return ScaleReport(
        intrinsic_dim=d_prime,
        s_value=s_value,
        sigma=sigma_rule(s_value, X.n, X.d),
        covariance_eigenvalues=eig,
        n=X.n,
        d=X.d,
    )
