"""Compiled O(n^2) Gaussian pair sums with compensated (Neumaier) accumulation."""

import math

import numba
import numpy as np

# TBB shipped with the base image is too old for numba; prefer OpenMP.
if numba.config.THREADING_LAYER == "default":
    numba.config.THREADING_LAYER = "omp"


@numba.njit(cache=True, parallel=True, fastmath=False)
def _row_sums(points, negative, sigma):
    n, d = points.shape
    inv = 1.0 / (2.0 * sigma * sigma)
    total = np.empty(n)
    cross = np.empty(n)
    for i in numba.prange(n):
        s_all = 0.0
        c_all = 0.0
        s_x = 0.0
        c_x = 0.0
        for j in range(n):
            if j == i:
                continue
            r2 = 0.0
            for k in range(d):
                t = points[i, k] - points[j, k]
                r2 += t * t
            w = math.exp(-r2 * inv)
            t = s_all + w
            if abs(s_all) >= abs(w):
                c_all += (s_all - t) + w
            else:
                c_all += (w - t) + s_all
            s_all = t
            if negative[i] != negative[j]:
                t = s_x + w
                if abs(s_x) >= abs(w):
                    c_x += (s_x - t) + w
                else:
                    c_x += (w - t) + s_x
                s_x = t
        total[i] = s_all + c_all
        cross[i] = s_x + c_x
    return total, cross


def row_sums(points: np.ndarray, negative: np.ndarray, sigma: float):
    """Per-point kernel sums over ``j != i``: all partners, and partners on the other side."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    return _row_sums(pts, np.ascontiguousarray(negative, dtype=np.bool_), float(sigma))
