"""Normalised Mutual Information and the contingency table it is built on."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import check_same_length
from .graph import Partition


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def rows(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def cols(self) -> np.ndarray:
        return self.counts.sum(axis=0)


def _as_labels(x) -> np.ndarray:
    if isinstance(x, Partition):
        return x.assignment
    return np.asarray(x)


def contingency_table(a, b) -> ContingencyTable:
    a, b = _as_labels(a), _as_labels(b)
    check_same_length(a, b)
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    counts = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(counts, (ia, ib), 1)
    return ContingencyTable(counts)


def _entropy(counts, n):
    p = counts[counts > 0] / n
    return float(-np.sum(p * np.log(p)))


def nmi(pred, truth) -> float:
    """``I(pred; truth) / sqrt(H(pred) H(truth))`` in nats.

    When either entropy vanishes the score is 1 for two single-cluster
    labelings and 0 otherwise.
    """
    table = contingency_table(pred, truth)
    n = table.n
    if n == 0:
        raise ValueError("empty labelings")
    h_pred = _entropy(table.rows, n)
    h_truth = _entropy(table.cols, n)
    if h_pred == 0.0 or h_truth == 0.0:
        return 1.0 if table.counts.shape == (1, 1) else 0.0
    nz = table.counts > 0
    joint = table.counts[nz] / n
    outer = np.outer(table.rows, table.cols)[nz] / (n * n)
    mi = float(np.sum(joint * np.log(joint / outer)))
    return max(0.0, mi / np.sqrt(h_pred * h_truth))
