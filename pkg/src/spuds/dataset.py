"""Loading and validation of numeric datasets and ground-truth labels."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, EmptyData, LengthMismatch, ParseError


@dataclass(frozen=True)
class DataMatrix:
    """An immutable ``n x d`` matrix of finite observations."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise DimensionMismatch(f"expected a 2-d array, got ndim={values.ndim}")
        if values.shape[0] < 2:
            raise EmptyData(f"need at least 2 observations, got {values.shape[0]}")
        if values.shape[1] < 1:
            raise EmptyData("need at least 1 feature")
        if not np.all(np.isfinite(values)):
            raise ParseError("data contains NaN or infinite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


def as_data_matrix(X) -> DataMatrix:
    return X if isinstance(X, DataMatrix) else DataMatrix(X)


def canonicalize_labels(labels) -> np.ndarray:
    """Map arbitrary labels onto ``0..K-1`` in order of first appearance."""
    mapping: dict = {}
    out = np.empty(len(labels), dtype=np.int64)
    for i, lab in enumerate(labels):
        out[i] = mapping.setdefault(lab, len(mapping))
    return out


def _parse_label(token: str, row: int, column: int) -> int:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(
            f"row {row}, column index {column}: label {token!r} is not numeric", row, column
        ) from None
    if not value.is_integer() or value < 0:
        raise ParseError(
            f"row {row}, column index {column}: label {token!r} is not a non-negative integer",
            row,
            column,
        )
    return int(value)


def load_csv(path, label_column: int | None = None, has_header: bool = False):
    """Read a comma-delimited numeric file.

    Parameters
    ----------
    path : str or Path
        UTF-8 text file, one observation per line.
    label_column : int, optional
        Zero-based index of a column holding integer class ids. It is removed
        from the features and returned canonicalized.
    has_header : bool
        Skip the first line.

    Returns
    -------
    (DataMatrix, numpy.ndarray or None)
    """
    path = Path(path)
    rows: list[list[float]] = []
    labels: list[int] = []
    width = None
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, record in enumerate(reader, start=1):
            if has_header and lineno == 1:
                continue
            if not record or all(not tok.strip() for tok in record):
                continue
            if width is None:
                width = len(record)
            elif len(record) != width:
                raise DimensionMismatch(
                    f"row {lineno} has {len(record)} fields, expected {width}"
                )
            feats = []
            for col, tok in enumerate(record):
                if label_column is not None and col == label_column:
                    labels.append(_parse_label(tok.strip(), lineno, col))
                    continue
                try:
                    feats.append(float(tok))
                except ValueError:
                    raise ParseError(
                        f"row {lineno}, column index {col}: {tok!r} is not numeric", lineno, col
                    ) from None
            rows.append(feats)
    if label_column is not None and width is not None and not 0 <= label_column < width:
        raise DimensionMismatch(f"label column {label_column} out of range for {width} columns")
    if len(rows) < 2:
        raise EmptyData(f"{path}: need at least 2 rows, got {len(rows)}")
    X = DataMatrix(np.array(rows, dtype=np.float64))
    y = canonicalize_labels(labels) if label_column is not None else None
    return X, y


def load_labels(path) -> np.ndarray:
    """Read a label file with one integer per line."""
    out = []
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            tok = line.strip()
            if tok:
                out.append(_parse_label(tok, lineno, 0))
    if not out:
        raise EmptyData(f"{path}: no labels")
    return np.array(out, dtype=np.int64)


def check_same_length(a, b):
    if len(a) != len(b):
        raise LengthMismatch(f"length mismatch: {len(a)} vs {len(b)}")
