import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subsetspace.fset import FSet, hausdorff
from subsetspace.relations import Relation, decompose, is_essential, orders, proximal_relation, reduce
from subsetspace.suites import brute_force_reduced, random_relation


def by_value(R, x, y):
    return sorted((x.points[i, 0], y.points[j, 0]) for i, j in R.pairs)


def is_reduced_complete(pairs, a, b):
    if {i for i, _ in pairs} != set(range(a)) or {j for _, j in pairs} != set(range(b)):
        return False
    lc = {i: sum(1 for k, _ in pairs if k == i) for i in range(a)}
    rc = {j: sum(1 for _, k in pairs if k == j) for j in range(b)}
    return all(lc[i] == 1 or rc[j] == 1 for i, j in pairs)


def enumerate_reduced(R):
    """Every reduced complete subrelation by plain subset enumeration."""
    out = set()
    for k in range(1, len(R) + 1):
        for sub in itertools.combinations(R.pairs, k):
            if is_reduced_complete(sub, R.n_left, R.n_right):
                out.add(sub)
    return out


# ------------------------------------------------------------ proximal

@pytest.mark.parametrize("x, y, expected", [
    ([0.0, 1.0], [0.0, 1.0], [(0.0, 0.0), (1.0, 1.0)]),
    ([0.0, 3.0, 5.0], [-1.0, 1.0, 4.0], [(0.0, -1.0), (0.0, 1.0), (3.0, 4.0), (5.0, 4.0)]),
    ([0.0], [-1.0, 1.0], [(0.0, -1.0), (0.0, 1.0)]),
])
def test_proximal_examples(x, y, expected):
    x, y = FSet(x, n=3), FSet(y, n=3)
    R = proximal_relation(x, y)
    assert by_value(R, x, y) == expected
    assert R.complete


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), p=st.sampled_from([1.0, 2.0, float("inf")]))
def test_proximal_complete_and_tight(seed, p):
    rng = np.random.default_rng(seed)
    x = FSet(rng.uniform(-1, 1, size=(rng.integers(1, 6), 2)), n=5, p=p)
    y = FSet(rng.uniform(-1, 1, size=(rng.integers(1, 6), 2)), n=5, p=p)
    R = proximal_relation(x, y)
    assert R.complete
    assert R.max_length() <= hausdorff(x, y) + 1e-12


# -------------------------------------------------------------- orders

def test_orders():
    R = Relation(((0, 0),), 1, 1)
    assert orders(R, (0, 0)) == (1, 1)
    R = Relation(((0, 0), (0, 1), (1, 0)), 2, 2)
    assert orders(R, (0, 0)) == (2, 2)
    assert orders(R, (1, 0)) == (2, 1)
    assert not is_essential(R, (0, 0)) and is_essential(R, (1, 0))
    with pytest.raises(ValueError):
        orders(R, (1, 1))


def test_relation_range_checked():
    with pytest.raises(ValueError):
        Relation(((0, 2),), 1, 2)


# -------------------------------------------------------------- reduce

def test_reduce_examples():
    R = Relation(((0, 0), (0, 1), (1, 0)), 2, 2)
    assert reduce(R).pairs == ((0, 1), (1, 0))
    full = Relation(((0, 0), (1, 0)), 2, 1)
    assert reduce(full) == full
    assert reduce(reduce(R)) == reduce(R)


def test_reduce_needs_complete():
    with pytest.raises(ValueError):
        reduce(Relation(((0, 0),), 2, 1))


def test_reduce_keeps_proximity():
    x, y = FSet([0.0, 3.0, 5.0]), FSet([-1.0, 1.0, 4.0])
    R = proximal_relation(x, y)
    S = reduce(R)
    assert set(S.pairs) <= set(R.pairs)
    assert by_value(S, x, y) == [(0.0, -1.0), (0.0, 1.0), (3.0, 4.0), (5.0, 4.0)]


@pytest.mark.parametrize("seed", range(4))
def test_reduce_against_enumeration(seed):
    rng = np.random.default_rng(seed)
    for _ in range(150):
        R = random_relation(rng, max_side=4, max_pairs=10)
        S = reduce(R)
        assert S.reduced and set(S.pairs) <= set(R.pairs)
        assert reduce(S) == S
        found = enumerate_reduced(R)
        assert S.pairs in found
        assert len(S) <= max(R.n_left, R.n_right, R.n_left + R.n_right - 2)
        # the vectorized enumerator used by the harness agrees with the plain one
        vec, _ = brute_force_reduced(R)
        assert vec == found


# ----------------------------------------------------------- decompose

@pytest.mark.parametrize("pairs, a, b, xp, ydp, f, g", [
    (((0, 0), (1, 0), (2, 1)), 3, 2, (0, 1, 2), (), {0: 0, 1: 0, 2: 1}, {}),
    (((0, 0), (0, 1)), 1, 2, (), (0, 1), {}, {0: 0, 1: 0}),
    (((0, 0),), 1, 1, (0,), (), {0: 0}, {}),
])
def test_decompose_examples(pairs, a, b, xp, ydp, f, g):
    D = decompose(Relation(pairs, a, b))
    assert D.x_prime == xp and D.y_dprime == ydp
    assert D.f == f and D.g == g
    assert D.reassemble() == Relation(pairs, a, b)


def test_decompose_needs_reduced():
    with pytest.raises(ValueError):
        decompose(Relation(((0, 0), (0, 1), (1, 0)), 2, 2))


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_decompose_partition(seed):
    R = reduce(random_relation(np.random.default_rng(seed)))
    D = decompose(R)
    assert set(D.x_prime).isdisjoint(D.x_dprime)
    assert set(D.x_prime) | set(D.x_dprime) == set(range(R.n_left))
    assert set(D.y_prime).isdisjoint(D.y_dprime)
    assert set(D.y_prime) | set(D.y_dprime) == set(range(R.n_right))
    assert set(D.f.values()) == set(D.y_prime) and set(D.g.values()) == set(D.x_dprime)
    assert D.reassemble() == R
