import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spuds.errors import LengthMismatch
from spuds.graph import Partition
from spuds.metrics import contingency_table, nmi


def bf_nmi(a, b):
    n = len(a)
    pa = {x: a.count(x) / n for x in set(a)}
    pb = {y: b.count(y) / n for y in set(b)}
    pab = {}
    for x, y in zip(a, b):
        pab[(x, y)] = pab.get((x, y), 0) + 1 / n
    mi = sum(p * math.log(p / (pa[x] * pb[y])) for (x, y), p in pab.items())
    ha = -sum(p * math.log(p) for p in pa.values())
    hb = -sum(p * math.log(p) for p in pb.values())
    if ha == 0 or hb == 0:
        return 1.0 if len(pa) == len(pb) == 1 else 0.0
    return mi / math.sqrt(ha * hb)


def test_identical():
    assert nmi([2, 2, 5, 1], [2, 2, 5, 1]) == pytest.approx(1.0, abs=1e-12)
    assert nmi(Partition(np.array([0, 1, 1, 0]), 2), [3, 4, 4, 3]) == pytest.approx(1.0, abs=1e-12)


def test_single_cluster_prediction():
    assert nmi([0, 0, 0, 0], [0, 0, 1, 1]) == 0.0


def test_independent():
    assert nmi([0, 0, 1, 1], [0, 1, 0, 1]) == pytest.approx(0.0, abs=1e-12)


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        nmi([0, 1], [0, 1, 1])


def test_contingency():
    t = contingency_table([0, 0, 1, 2], [1, 1, 0, 0])
    np.testing.assert_array_equal(t.counts, [[0, 2], [1, 0], [1, 0]])
    assert t.n == 4
    np.testing.assert_array_equal(t.rows, [2, 1, 1])


labels = st.integers(2, 50).flatmap(
    lambda n: st.tuples(
        st.lists(st.integers(0, 5), min_size=n, max_size=n),
        st.lists(st.integers(0, 5), min_size=n, max_size=n),
    )
)


@settings(max_examples=100, deadline=None)
@given(labels)
def test_matches_brute_force(pair):
    a, b = pair
    assert nmi(a, b) == pytest.approx(bf_nmi(a, b), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(labels, st.permutations(range(6)))
def test_symmetry_relabel_range(pair, perm):
    a, b = pair
    v = nmi(a, b)
    assert nmi(b, a) == pytest.approx(v, abs=1e-12)
    assert nmi([perm[x] for x in a], b) == pytest.approx(v, abs=1e-12)
    assert -1e-12 <= v <= 1 + 1e-12
