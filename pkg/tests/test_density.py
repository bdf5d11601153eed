import math

import numpy as np
import pytest

from spuds.density import (
    SeparationConfig,
    boundary_points,
    is_density_separated,
    kernel_density_at,
    segment_density,
)
from spuds.errors import EmptyCluster
from spuds.graph import build_graph


def bf_separated(X, members, sigma, lam, grid=100):
    """Line-by-line pure-Python rendering of the separation test."""
    n = len(X)
    inside = sorted(members)
    outside = [i for i in range(n) if i not in set(members)]
    dist2 = lambda a, b: sum((p - q) ** 2 for p, q in zip(a, b))  # noqa: E731
    dens = lambda z: sum(math.exp(-dist2(z, X[i]) / (2 * sigma**2)) for i in range(n))  # noqa: E731
    thresh = min(max(dens(X[i]) for i in inside), max(dens(X[i]) for i in outside))
    boundary = set()
    for o in outside:
        dmin = min(dist2(X[o], X[i]) for i in inside)
        boundary |= {i for i in inside if dist2(X[o], X[i]) == dmin}
    margins = []
    for b in sorted(boundary):
        y = min(outside, key=lambda j: (dist2(X[b], X[j]), j))
        if X[b] == X[y]:
            gs = [0.0]
        else:
            gs = [k / (grid + 1) for k in range(grid + 2)]
        low = min(dens([g * p + (1 - g) * q for p, q in zip(X[b], X[y])]) for g in gs)
        margins.append(low - lam * thresh)
        if low >= lam * thresh:
            return False, margins
    return True, margins


def test_boundary_single_point():
    X = np.array([[0.0], [1.0], [2.0]])
    np.testing.assert_array_equal(boundary_points(X, [1]), [1])


def test_boundary_line():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    np.testing.assert_array_equal(boundary_points(X, [0, 1]), [1])


def test_boundary_ties():
    X = np.array([[-1.0, 0.0], [1.0, 0.0], [0.0, 5.0]])
    np.testing.assert_array_equal(boundary_points(X, [0, 1]), [0, 1])


def test_boundary_empty():
    with pytest.raises(EmptyCluster):
        boundary_points(np.zeros((3, 1)), [0, 1, 2])


def test_separated_pair():
    X = np.array([[0.0], [0.05], [10.0], [10.05]])
    G = build_graph(X, 0.1)
    v = is_density_separated(X, [0, 1], G)
    assert v.separated and v.witness is None
    assert bf_separated(X.tolist(), [0, 1], 0.1, 1.0)[0] is True
    # the segment between 0.05 and 10 drops essentially to zero
    _, along = segment_density(G, 1, 2)
    assert along.min() < 1e-100


@pytest.mark.parametrize("cut", [5, 6])
def test_uniform_grid_not_separated(cut):
    X = np.round(np.arange(11) * 0.1, 10)[:, None]
    G = build_graph(X, 0.2)
    v = is_density_separated(X, range(cut), G)
    assert not v.separated
    assert v.witness is not None
    assert v.witness.density >= v.threshold
    assert bf_separated(X.tolist(), list(range(cut)), 0.2, 1.0)[0] is False


def test_degenerate_zero_length_segment():
    X = np.array([[0.0], [1.0], [1.0], [2.0]])
    G = build_graph(X, 0.8)
    v = is_density_separated(X, [0, 1], G)
    dens = G.degree + 1
    thresh = min(dens[[0, 1]].max(), dens[[2, 3]].max())
    assert v.separated == (not dens[2] >= thresh)
    if not v.separated:
        assert (v.witness.boundary, v.witness.neighbor, v.witness.position) == (1, 2, 0.0)
    assert not is_density_separated(X, [0, 1], G, SeparationConfig(lam=0.5)).separated


def test_on_sample_density_matches_degree(rng):
    X = rng.standard_normal((25, 2))
    G = build_graph(X, 0.6)
    np.testing.assert_allclose(kernel_density_at(G, X), G.degree + 1, rtol=0, atol=1e-12)


def test_agrees_with_brute_force(rng):
    checked = 0
    for _ in range(40):
        n = int(rng.integers(4, 14))
        X = rng.standard_normal((n, 2)) * rng.uniform(0.5, 3)
        sigma = float(rng.uniform(0.3, 1.5))
        lam = float(rng.uniform(0.3, 1.0))
        members = np.flatnonzero(X[:, 0] < np.median(X[:, 0]))
        expected, margins = bf_separated(X.tolist(), members.tolist(), sigma, lam)
        if min(abs(m) for m in margins) < 1e-9:
            continue
        G = build_graph(X, sigma)
        assert is_density_separated(X, members, G, SeparationConfig(lam=lam)).separated == expected
        checked += 1
    assert checked > 30


def test_lambda_monotone(rng):
    for _ in range(100):
        n = int(rng.integers(5, 16))
        X = rng.standard_normal((n, int(rng.integers(1, 3))))
        G = build_graph(X, float(rng.uniform(0.2, 1.5)))
        members = rng.choice(n, size=int(rng.integers(1, n)), replace=False)
        lams = np.sort(rng.uniform(0.05, 1.0, 5))
        verdicts = [is_density_separated(X, members, G, SeparationConfig(lam=l)).separated for l in lams]
        first = verdicts.index(True) if True in verdicts else len(verdicts)
        assert all(verdicts[first:])


def test_rigid_motion_invariance(rng):
    theta = 1.1
    R = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    for _ in range(20):
        X = rng.standard_normal((12, 2))
        sigma = 0.7
        members = np.flatnonzero(X[:, 1] > 0)
        if members.size in (0, 12):
            continue
        _, margins = bf_separated(X.tolist(), members.tolist(), sigma, 1.0)
        if min(abs(m) for m in margins) < 1e-6:
            continue
        Y = X @ R.T + np.array([3.0, -7.0])
        a = is_density_separated(X, members, build_graph(X, sigma)).separated
        b = is_density_separated(Y, members, build_graph(Y, sigma)).separated
        assert a == b


def test_refinement_keeps_confident_failures(rng):
    seen = 0
    for _ in range(60):
        n = int(rng.integers(6, 15))
        X = np.sort(rng.uniform(0, 2, n))[:, None]
        sigma = 0.4
        G = build_graph(X, sigma)
        members = np.arange(n // 2)
        v = is_density_separated(X, members, G, SeparationConfig(lam=0.6, segment_grid=100))
        if v.separated:
            continue
        w = v.witness
        length = abs(X[w.boundary, 0] - X[w.neighbor, 0])
        # |d/dg density| <= n * length * e^{-1/2} / sigma; half a grid step of slack.
        bound = n * length * math.exp(-0.5) / sigma * (1 / 101) / 2
        if w.density - bound < 0.6 * v.threshold:
            continue
        seen += 1
        refined = SeparationConfig(lam=0.6, segment_grid=200)
        assert not is_density_separated(X, members, G, refined).separated
    assert seen > 5


def test_config_validation():
    with pytest.raises(ValueError):
        SeparationConfig(lam=0.0)
    with pytest.raises(ValueError):
        SeparationConfig(lam=1.5)
