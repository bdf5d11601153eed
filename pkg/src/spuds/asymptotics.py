"""Monte Carlo checks of the large-sample limits of scaled cut statistics.

For an i.i.d. sample from a density ``p`` and a hyperplane ``S`` splitting
space into ``S1`` (``normal . x <= offset``) and ``S2``, with ``sigma_n -> 0``
slowly enough, the following converge almost surely:

========  ===================================================  ====================================
name      statistic                                            limit
========  ===================================================  ====================================
volume    c_d / (n^2 s^d) sum_{i in M} sum_{j != i} k_ij       int_M p^2
cut       c_d sqrt(2 pi) / (n^2 s^(d+1)) sum_{S1 x S2} k_ij    surface integral of p^2 over S
ncut      sqrt(2 pi) / s * NCut(S1, S2)                        cut-limit * (1/int_S1 p^2 + 1/int_S2 p^2)
ratio     scaled cut * (n/|S1| + n/|S2|)                       cut-limit * (1/P(S1) + 1/P(S2))
========  ===================================================  ====================================

Here ``s = sigma_n``, ``k_ij = exp(-|x_i - x_j|^2 / (2 s^2))`` and
``c_d = (2 pi)^(-d/2)`` normalizes the Gaussian kernel.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import ndtr

from ._pairsums import row_sums
from .errors import ConfigError, EmptySide

STATISTICS = ("volume", "cut", "ncut", "ratio")


@dataclass(frozen=True)
class HalfspaceSurface:
    normal: tuple
    offset: float = 0.0

    def __post_init__(self):
        normal = np.atleast_1d(np.asarray(self.normal, dtype=np.float64))
        if abs(np.linalg.norm(normal) - 1.0) > 1e-12:
            raise ConfigError(f"surface normal must have unit length, got {np.linalg.norm(normal)}")
        object.__setattr__(self, "normal", tuple(float(v) for v in normal))
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def axis(cls, dim: int, offset: float = 0.0, axis: int = 0) -> "HalfspaceSurface":
        normal = np.zeros(dim)
        normal[axis] = 1.0
        return cls(tuple(normal), offset)

    @property
    def dim(self) -> int:
        return len(self.normal)

    def negative_side(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        return pts @ np.asarray(self.normal) <= self.offset


class DensityModel:
    """Analytic density with a sampler and closed-form integral oracles."""

    name = "abstract"
    dim = 1
    lipschitz = True

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def pdf(self, x) -> np.ndarray:
        raise NotImplementedError

    def squared_mass(self, surface: HalfspaceSurface | None = None, side: str = "negative") -> float:
        """Integral of ``p^2`` over one side of ``surface`` (all of space when ``None``)."""
        raise NotImplementedError

    def surface_squared_mass(self, surface: HalfspaceSurface) -> float:
        raise NotImplementedError

    def region_prob(self, surface: HalfspaceSurface, side: str = "negative") -> float:
        raise NotImplementedError

    def describe(self) -> dict:
        return {"name": self.name, "dim": self.dim}


def _side(side, below, total):
    if side == "negative":
        return below
    if side == "positive":
        return total - below
    raise ConfigError(f"side must be 'negative' or 'positive', got {side!r}")


class StandardGaussian(DensityModel):
    lipschitz = True

    def __init__(self, dim: int = 1):
        self.dim = dim
        self.name = f"gauss{dim}d"

    def sample(self, n, rng):
        return rng.standard_normal((n, self.dim))

    def pdf(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.dim:
            x = x.T
        return (2 * math.pi) ** (-self.dim / 2) * np.exp(-0.5 * np.sum(x * x, axis=1))

    def squared_mass(self, surface=None, side="negative"):
        total = (4 * math.pi) ** (-self.dim / 2)
        if surface is None:
            return total
        # p^2 is (4 pi)^(-d/2) times the N(0, I/2) density.
        return _side(side, total * ndtr(math.sqrt(2) * surface.offset), total)

    def surface_squared_mass(self, surface):
        d = self.dim
        return (2 * math.pi) ** (-d) * math.pi ** ((d - 1) / 2) * math.exp(-surface.offset**2)

    def region_prob(self, surface, side="negative"):
        return _side(side, float(ndtr(surface.offset)), 1.0)


class GaussianMixture1D(DensityModel):
    """Equal-weight mixture of unit normals centred at ``+-separation/2``."""

    dim = 1

    def __init__(self, separation: float = 4.0):
        self.separation = float(separation)
        self.m = self.separation / 2
        self.name = "mixture1d"

    def describe(self):
        return {"name": self.name, "dim": 1, "separation": self.separation}

    def sample(self, n, rng):
        signs = np.where(rng.random(n) < 0.5, -1.0, 1.0)
        return (signs * self.m + rng.standard_normal(n))[:, None]

    def pdf(self, x):
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        phi = lambda z: np.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)  # noqa: E731
        return 0.5 * phi(x - self.m) + 0.5 * phi(x + self.m)

    def _below(self, t):
        m, r2 = self.m, math.sqrt(2)
        return (
            ndtr(r2 * (t - m)) + ndtr(r2 * (t + m)) + 2 * math.exp(-m * m) * ndtr(r2 * t)
        ) / (8 * math.sqrt(math.pi))

    def squared_mass(self, surface=None, side="negative"):
        total = (1 + math.exp(-self.m**2)) / (4 * math.sqrt(math.pi))
        if surface is None:
            return total
        t = surface.offset * surface.normal[0]
        below = float(self._below(t)) if surface.normal[0] > 0 else total - float(self._below(t))
        return _side(side, below, total)

    def surface_squared_mass(self, surface):
        t = surface.offset * surface.normal[0]
        return float(self.pdf([t])[0] ** 2)

    def region_prob(self, surface, side="negative"):
        t = surface.offset * surface.normal[0]
        below = float(0.5 * ndtr(t - self.m) + 0.5 * ndtr(t + self.m))
        if surface.normal[0] < 0:
            below = 1.0 - below
        return _side(side, below, 1.0)


class Uniform1D(DensityModel):
    """Uniform on ``[0, 1]``. Discontinuous at the edges, so it is a negative control."""

    dim = 1
    lipschitz = False
    name = "uniform1d"

    def sample(self, n, rng):
        return rng.random((n, 1))

    def pdf(self, x):
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        return ((x >= 0) & (x <= 1)).astype(np.float64)

    def _t(self, surface):
        if surface.normal[0] < 0:
            raise ConfigError("uniform1d supports only the +1 normal")
        return surface.offset

    def squared_mass(self, surface=None, side="negative"):
        if surface is None:
            return 1.0
        return _side(side, float(np.clip(self._t(surface), 0.0, 1.0)), 1.0)

    def surface_squared_mass(self, surface):
        return 1.0 if 0.0 < self._t(surface) < 1.0 else 0.0

    def region_prob(self, surface, side="negative"):
        return self.squared_mass(surface, side)


def make_model(name: str, separation: float = 4.0) -> DensityModel:
    models = {
        "gauss1d": lambda: StandardGaussian(1),
        "gauss2d": lambda: StandardGaussian(2),
        "mixture1d": lambda: GaussianMixture1D(separation),
        "uniform1d": Uniform1D,
    }
    if name not in models:
        raise ConfigError(f"unknown model {name!r}; valid: {', '.join(models)}")
    return models[name]()


def target(model: DensityModel, surface: HalfspaceSurface, statistic: str) -> float:
    """Closed-form large-sample limit of ``statistic``."""
    surf = model.surface_squared_mass(surface)
    if statistic == "volume":
        return model.squared_mass(surface, "negative")
    if statistic == "cut":
        return surf
    if statistic in ("ncut", "ratio"):
        mass = model.squared_mass if statistic == "ncut" else model.region_prob
        neg, pos = mass(surface, "negative"), mass(surface, "positive")
        if neg <= 0.0 or pos <= 0.0:
            raise ConfigError(
                f"surface leaves one side with zero mass; {statistic} has no finite limit"
            )
        return surf * (1 / neg + 1 / pos)
    raise ConfigError(f"unknown statistic {statistic!r}; valid: {', '.join(STATISTICS)}")


@dataclass(frozen=True)
class PairSums:
    """Everything the four statistics need from one pass over the pairs."""

    n: int
    d: int
    sigma: float
    n_negative: int
    volume_negative: float
    volume_positive: float
    cross: float

    @property
    def n_positive(self) -> int:
        return self.n - self.n_negative

    @property
    def c_d(self) -> float:
        return (2 * math.pi) ** (-self.d / 2)

    def volume(self, side: str | None = "negative") -> float:
        raw = {
            "negative": self.volume_negative,
            "positive": self.volume_positive,
            None: self.volume_negative + self.volume_positive,
        }[side]
        return self.c_d / (self.n**2 * self.sigma**self.d) * raw

    def _require_sides(self):
        if self.n_negative == 0 or self.n_positive == 0:
            raise EmptySide(f"sides hold {self.n_negative} and {self.n_positive} points")

    def cut(self) -> float:
        self._require_sides()
        return self.c_d * math.sqrt(2 * math.pi) / (self.n**2 * self.sigma ** (self.d + 1)) * self.cross

    def ncut(self) -> float:
        self._require_sides()
        return math.sqrt(2 * math.pi) / self.sigma * (
            self.cross / self.volume_negative + self.cross / self.volume_positive
        )

    def count_factor(self) -> float:
        self._require_sides()
        return self.n / self.n_negative + self.n / self.n_positive

    def ratio(self) -> float:
        return self.cut() * self.count_factor()

    def statistic(self, name: str) -> float:
        if name == "volume":
            return self.volume("negative")
        if name in ("cut", "ncut", "ratio"):
            return getattr(self, name)()
        raise ConfigError(f"unknown statistic {name!r}; valid: {', '.join(STATISTICS)}")


def pair_sums(X, surface: HalfspaceSurface | None, sigma: float) -> PairSums:
    points = np.asarray(getattr(X, "values", X), dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    if not sigma > 0:
        raise ConfigError("sigma must be positive")
    n, d = points.shape
    if surface is None:
        negative = np.ones(n, dtype=bool)
    else:
        if surface.dim != d:
            raise ConfigError(f"surface has dimension {surface.dim}, data has {d}")
        negative = surface.negative_side(points)
    total, cross = row_sums(points, negative, sigma)
    return PairSums(
        n=n,
        d=d,
        sigma=float(sigma),
        n_negative=int(negative.sum()),
        volume_negative=math.fsum(total[negative]),
        volume_positive=math.fsum(total[~negative]),
        # Each unordered cross pair appears once in each of its two rows.
        cross=math.fsum(cross[negative]),
    )


def scaled_volume_estimate(X, surface: HalfspaceSurface | None, sigma: float, side: str | None = "negative") -> float:
    """Scaled volume of the sample points in one half-space (all of space for ``surface=None``)."""
    return pair_sums(X, surface, sigma).volume(side if surface is not None else None)


def scaled_cut_estimate(X, surface: HalfspaceSurface, sigma: float) -> float:
    return pair_sums(X, surface, sigma).cut()


def scaled_ncut_estimate(X, surface: HalfspaceSurface, sigma: float) -> float:
    return pair_sums(X, surface, sigma).ncut()


def scaled_ratio_cut_estimate(X, surface: HalfspaceSurface, sigma: float) -> float:
    return pair_sums(X, surface, sigma).ratio()


@dataclass
class ConvergenceRun:
    model: dict
    surface: dict
    statistic: str
    alpha: float
    target: float
    n_grid: list
    seeds: list
    cells: list = field(default_factory=list)
    summary: list = field(default_factory=list)

    def medians(self) -> list:
        return [row["median_error"] for row in self.summary]

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def to_csv(self) -> str:
        buf = io.StringIO()
        fields = ["n", "seed", "sigma", "estimate", "error", "n_negative", "n_positive", "count_factor"]
        writer = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for cell in self.cells:
            writer.writerow(cell)
        return buf.getvalue()


def summarize(cells, n_grid) -> list:
    out = []
    for n in n_grid:
        errs = sorted(c["error"] for c in cells if c["n"] == n and c["estimate"] is not None)
        missing = sum(1 for c in cells if c["n"] == n and c["estimate"] is None)
        if errs:
            q1, med, q3 = np.percentile(errs, [25, 50, 75])
            out.append({"n": n, "median_error": float(med), "iqr": float(q3 - q1), "cells": len(errs), "missing": missing})
        else:
            out.append({"n": n, "median_error": None, "iqr": None, "cells": 0, "missing": missing})
    return out


def check_alpha(alpha: float, d: int):
    bound = 1.0 / (2 * d + 2)
    if not 0 < alpha < bound:
        raise ConfigError(
            f"alpha={alpha} violates the rate condition n * sigma_n^(2d+2+eps) -> infinity "
            f"for sigma_n = n^(-alpha); need 0 < alpha < 1/(2d+2) = {bound:.6g}"
        )


def seed_rng(base_seed: int, seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([base_seed, seed])))


def run_studies(
    model: DensityModel,
    surface: HalfspaceSurface,
    statistics=STATISTICS,
    n_grid=(1000, 4000, 16000),
    seeds: int = 10,
    alpha: float | None = None,
    base_seed: int = 0,
) -> dict:
    """Run several statistics over shared samples; one pair pass per ``(n, seed)`` cell.

    Each seed defines one i.i.d. sequence and the sample of size ``n`` is its
    first ``n`` draws, so every seed traces a single growing sample.
    """
    n_grid = [int(n) for n in n_grid]
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])) or not n_grid:
        raise ConfigError("n_grid must be non-empty and strictly ascending")
    if alpha is None:
        alpha = 1.0 / (2 * model.dim + 3)
    check_alpha(alpha, model.dim)
    for s in statistics:
        if s not in STATISTICS:
            raise ConfigError(f"unknown statistic {s!r}; valid: {', '.join(STATISTICS)}")
    targets = {s: target(model, surface, s) for s in statistics}
    cells = {s: [] for s in statistics}
    streams = [model.sample(n_grid[-1], seed_rng(base_seed, seed)) for seed in range(seeds)]
    for n in n_grid:
        sigma = n ** (-alpha)
        for seed in range(seeds):
            X = streams[seed][:n]
            sums = pair_sums(X, surface, sigma)
            for s in statistics:
                cell = {
                    "n": n,
                    "seed": seed,
                    "sigma": sigma,
                    "n_negative": sums.n_negative,
                    "n_positive": sums.n_positive,
                    "count_factor": None,
                }
                try:
                    est = sums.statistic(s)
                    if s == "ratio":
                        cell["count_factor"] = sums.count_factor()
                except EmptySide:
                    est = None
                cell["estimate"] = est
                cell["error"] = None if est is None else abs(est - targets[s])
                cells[s].append(cell)
    return {
        s: ConvergenceRun(
            model=model.describe(),
            surface={"normal": list(surface.normal), "offset": surface.offset},
            statistic=s,
            alpha=alpha,
            target=targets[s],
            n_grid=n_grid,
            seeds=list(range(seeds)),
            cells=cells[s],
            summary=summarize(cells[s], n_grid),
        )
        for s in statistics
    }


def convergence_study(model, surface, statistic="ncut", n_grid=(1000, 4000, 16000), seeds=10, alpha=None, base_seed=0) -> ConvergenceRun:
    return run_studies(model, surface, (statistic,), n_grid, seeds, alpha, base_seed)[statistic]
