import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from subsetspace.chebyshev import cheb_center, two_center
from subsetspace.fset import (FSet, diam, dist_to_x2, hausdorff, min_sep, proximal_bijection)
from subsetspace.norms import INF, NormSpec, pnorm


def brute_hausdorff(A, B, p):
    d = lambda a, b: pnorm(np.subtract(a, b), p)
    fwd = max(min(d(a, b) for b in B) for a in A)
    bwd = max(min(d(a, b) for a in A) for b in B)
    return max(fwd, bwd)


def oracle_cheb(P, p, restarts=8):
    """Coarse grid, then Nelder-Mead restarts on c -> max_i ||c - P_i||."""
    P = np.asarray(P, float)
    f = lambda c: max(pnorm(c - q, p) for q in P)
    lo, hi = P.min(0), P.max(0)
    axes = [np.linspace(a, b, 31) for a, b in zip(lo, hi)]
    G = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, P.shape[1])
    c = min(G, key=f)
    rng = np.random.default_rng(0)
    for k in range(restarts):
        start = c + (rng.normal(size=c.shape) * 1e-2 if k else 0.0)
        res = minimize(f, start, method="Nelder-Mead",
                       options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 20000, "maxfev": 40000})
        if res.fun < f(c):
            c = res.x
    return c, f(c)


# ------------------------------------------------------------------ FSet

def test_dedup_and_order():
    x = FSet([[1.0, 0.0], [0.0, 5.0], [1.0, 0.0], [0.0, -1.0]])
    assert x.points.tolist() == [[0.0, -1.0], [0.0, 5.0], [1.0, 0.0]]
    assert len(x) == 3 and x.n == 3


def test_negative_zero_folds():
    assert len(FSet([[-0.0], [0.0]])) == 1


def test_scalar_input_is_line():
    x = FSet([0.2, 0.0, 1.0])
    assert x.dim == 1 and x.points[:, 0].tolist() == [0.0, 0.2, 1.0]


def test_immutable():
    x = FSet([0.0, 1.0])
    with pytest.raises(ValueError):
        x.points[0, 0] = 3.0


@pytest.mark.parametrize("kw, msg", [
    (dict(points=[], n=2), "nonempty"),
    (dict(points=[0.0, 1.0, 2.0], n=2), "exceed"),
    (dict(points=[0.0, np.nan]), "finite"),
    (dict(points=[0.0], n=0), "positive"),
])
def test_invalid(kw, msg):
    with pytest.raises(ValueError, match=msg):
        FSet(**kw)


def test_json_roundtrip():
    x = FSet([[0.5, 1.0], [2.0, -3.0]], n=4, p="inf")
    obj = json.loads(x.to_json())
    assert obj == {"n": 4, "p": "inf", "points": [[0.5, 1.0], [2.0, -3.0]]}
    y = FSet.from_json(x.to_json())
    assert y == x and y.n == 4


def test_spec_mismatch():
    with pytest.raises(ValueError):
        hausdorff(FSet([0.0], p=2), FSet([0.0], p=1))


# ------------------------------------------------------------- hausdorff

@pytest.mark.parametrize("x, y, expected", [
    ([[1.0, 2.0]], [[1.0, 2.0]], 0.0),
    ([0.0], [-1.0, 1.0], 1.0),
    ([0.0, 3.0, 5.0], [-1.0, 1.0, 4.0], 1.0),
])
def test_hausdorff_examples(x, y, expected):
    assert hausdorff(FSet(x), FSet(y)) == expected


coord = st.floats(-10, 10).map(lambda v: round(v, 6))
pts = st.lists(st.tuples(coord, coord), min_size=1, max_size=6)


@pytest.mark.parametrize("p", [1.0, 2.0, 3.0, INF])
@settings(max_examples=40, deadline=None)
@given(A=pts, B=pts, C=pts)
def test_hausdorff_metric(p, A, B, C):
    x, y, z = (FSet(S, p=p) for S in (A, B, C))
    assert hausdorff(x, y) == hausdorff(y, x)
    assert hausdorff(x, y) == pytest.approx(brute_hausdorff(x.points, y.points, p), abs=1e-12)
    assert hausdorff(x, z) <= hausdorff(x, y) + hausdorff(y, z) + 1e-12
    assert (hausdorff(x, y) == 0) == (x == y)


# ------------------------------------------------------- diam and min_sep

@pytest.mark.parametrize("x, expected", [
    ([[7.0, 7.0]], 0.0),
    ([0.0, 0.2, 1.0], 1.0),
    ([[0.0, 0.0], [3.0, 4.0]], 5.0),
])
def test_diam(x, expected):
    assert diam(FSet(x)) == expected


@pytest.mark.parametrize("x, n, expected", [
    ([5.0], 3, 0.0),
    ([0.0, 0.2, 1.0], 3, 0.2),
    ([0.0, 1.0], 3, 0.0),
    ([4.0], 1, math.inf),
])
def test_min_sep(x, n, expected):
    assert min_sep(FSet(x, n=n)) == expected


@settings(max_examples=60, deadline=None)
@given(A=st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=3, max_size=3),
       B=st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=3, max_size=3))
def test_two_lipschitz(A, B):
    x, y = FSet(A, n=3), FSet(B, n=3)
    dh = hausdorff(x, y)
    assert abs(diam(x) - diam(y)) <= 2 * dh + 1e-12
    assert abs(min_sep(x) - min_sep(y)) <= 2 * dh + 1e-12


# ------------------------------------------------------------- Chebyshev

@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 4.0, INF])
def test_cheb_trivial(p):
    s = NormSpec(p, 1)
    c, r = cheb_center(np.array([[0.0], [1.0]]), s)
    assert c[0] == pytest.approx(0.5) and r == pytest.approx(0.5)
    c, r = cheb_center(np.array([[0.3]]), s)
    assert c[0] == 0.3 and r == 0.0


def test_cheb_right_triangle():
    c, r = cheb_center(np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]]), NormSpec(2.0, 2))
    assert np.allclose(c, [1.0, 1.0], atol=1e-9) and r == pytest.approx(math.sqrt(2), abs=1e-9)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0, INF])
@pytest.mark.parametrize("seed", range(4))
def test_cheb_against_oracle(p, seed):
    P = np.random.default_rng(seed).uniform(-1, 1, size=(5, 2))
    _, r = cheb_center(P, NormSpec(p, 2))
    _, r_ref = oracle_cheb(P, p)
    # any oracle value is an upper bound on the optimum
    assert r <= r_ref + 1e-9
    assert r == pytest.approx(r_ref, abs=1e-7)


@pytest.mark.parametrize("p", [1.0, 2.0, 4.0])
def test_cheb_3d_and_translation(p):
    rng = np.random.default_rng(5)
    P = rng.uniform(-1, 1, size=(6, 3))
    s = NormSpec(p, 3)
    c, r = cheb_center(P, s)
    w = rng.normal(size=3) * 10
    c2, r2 = cheb_center(P + w, s)
    assert r2 == pytest.approx(r, abs=1e-9)
    assert max(pnorm(c - q, p) for q in P) == pytest.approx(r, abs=1e-9)


# ---------------------------------------------------------- dist_to_x2

def brute_two_center(P, p):
    k = len(P)
    best = math.inf
    for labels in itertools.product((0, 1), repeat=k - 1):
        lab = np.array((0,) + labels)
        r = max(cheb_center(P[lab == g], NormSpec(p, P.shape[1]))[1] for g in (0, 1) if (lab == g).any())
        best = min(best, r)
    return best


def test_dist_to_x2_examples():
    w = dist_to_x2(FSet([-1.0, 0.0, 1.0]))
    assert w.radius == pytest.approx(0.5)
    assert sorted(c[0] for c in w.centers) == pytest.approx([-0.5, 1.0])
    assert w.partition == (0, 0, 1)
    w = dist_to_x2(FSet([0.0, 0.05, 0.95, 1.0]))
    assert w.radius == pytest.approx(0.025)
    assert sorted(c[0] for c in w.centers) == pytest.approx([0.025, 0.975])


def test_dist_to_x2_small():
    x = FSet([[0.0, 1.0], [2.0, 3.0]])
    w = dist_to_x2(x)
    assert w.radius == 0.0 and w.as_fset(x.spec) == x


@pytest.mark.parametrize("p", [1.0, 2.0, INF])
@pytest.mark.parametrize("seed", range(3))
def test_dist_to_x2_witness(p, seed):
    rng = np.random.default_rng(seed)
    x = FSet(rng.uniform(-1, 1, size=(6, 2)), p=p)
    w = dist_to_x2(x)
    assert w.radius == pytest.approx(brute_two_center(x.points, p), abs=1e-9)
    assert hausdorff(x, w.as_fset(x.spec)) == pytest.approx(w.radius, abs=1e-9)
    C = np.array(w.centers)
    for a, g in zip(x.points, w.partition):
        assert pnorm(a - C[g], p) <= w.radius + 1e-9
    for _ in range(200):
        z = FSet(rng.uniform(-1, 1, size=(2, 2)), n=2, p=p)
        assert w.radius <= hausdorff(x, z) + 1e-9


def test_two_center_limit():
    with pytest.raises(ValueError):
        two_center(np.zeros((21, 1)) + np.arange(21)[:, None], NormSpec(2.0, 1))


# ------------------------------------------------------ proximal bijection

def test_proximal_bijection_examples():
    x, y = FSet([0.0, 10.0]), FSet([1.0, 9.0])
    assert proximal_bijection(x, y) == [(0, 0), (1, 1)]
    x, y = FSet([0.0, 1.0]), FSet([0.4, 0.6])
    assert proximal_bijection(x, y) == [(0, 0), (1, 1)]
    assert proximal_bijection(x, x) == [(0, 0), (1, 1)]


def test_proximal_bijection_absent():
    assert proximal_bijection(FSet([0.0, 1.0]), FSet([0.0, 5.0])) is None


def test_proximal_bijection_cardinality():
    with pytest.raises(ValueError):
        proximal_bijection(FSet([0.0, 1.0]), FSet([0.0], n=2))


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), frac=st.floats(0.0, 0.499))
def test_proximal_bijection_property(seed, frac):
    rng = np.random.default_rng(seed)
    x = FSet(rng.uniform(-1, 1, size=(4, 2)), n=4)
    if len(x) < 4:
        return
    V = rng.normal(size=(4, 2))
    V /= np.linalg.norm(V, axis=1)[:, None]
    y = FSet(x.points + V * frac * min_sep(x) * rng.uniform(size=(4, 1)), n=4)
    if len(y) < 4 or not min_sep(x) > 2 * hausdorff(x, y):
        return
    pairs = proximal_bijection(x, y)
    assert pairs is not None
    assert sorted(j for _, j in pairs) == [0, 1, 2, 3]
    dh = hausdorff(x, y)
    for i, j in pairs:
        assert pnorm(x.points[i] - y.points[j], 2.0) <= dh + 1e-12
