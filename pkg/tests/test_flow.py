import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subsetspace.errors import DomainError, NonConvergenceError
from subsetspace.flow import (FlowConfig, collision_time_bounds, flow_field, flow_until,
                              holder_bound, holder_retraction, integrate_pair,
                              integrate_to_collision, merge_clusters)
from subsetspace.fset import FSet, hausdorff, min_sep
from subsetspace.norms import NormSpec

LINE = NormSpec(2.0, 1)


@pytest.mark.parametrize("u, expected", [
    ([0.0, 1.0], [-1.0, 1.0]),
    ([-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0]),
])
def test_flow_field_examples(u, expected):
    assert flow_field(np.array(u)[:, None], LINE)[:, 0].tolist() == expected


def test_flow_field_coincident():
    with pytest.raises(DomainError):
        flow_field(np.array([[0.0], [0.0]]), LINE)


@pytest.mark.parametrize("p", [1.5, 2.0, 4.0])
@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 6))
def test_flow_field_speed_bound(p, seed, n):
    u = np.random.default_rng(seed).normal(size=(n, 3))
    J = flow_field(u, NormSpec(p, 3))
    assert (np.linalg.norm(J, ord=p, axis=1) <= n - 1 + 1e-12).all()
    # the terms cancel pairwise, so the field sums to zero
    assert np.allclose(J.sum(axis=0), 0.0, atol=1e-12)


@pytest.mark.parametrize("x, bounds", [
    ([0.0, 1.0], (0.5, 0.5)),
    ([-1.0, 0.0, 1.0], (0.25, 0.5)),
    ([0.0, 0.2, 1.0], (0.05, 0.1)),
])
def test_collision_time_bounds(x, bounds):
    assert collision_time_bounds(FSet(x)) == pytest.approx(bounds, abs=1e-15)


def test_collision_time_needs_full_cardinality():
    with pytest.raises(DomainError):
        collision_time_bounds(FSet([0.0, 1.0], n=3))


@pytest.mark.parametrize("x, T, r", [
    ([0.0, 1.0], 0.5, [0.5]),
    ([-1.0, 0.0, 1.0], 0.5, [0.0]),
])
def test_closed_forms(x, T, r):
    res = integrate_to_collision(FSet(x))
    assert res.T == pytest.approx(T, abs=1e-6)
    assert res.retract.n == len(x) - 1
    assert res.retract.points[:, 0] == pytest.approx(r, abs=1e-6)


def test_reference_run():
    x = FSet([0.0, 0.2, 1.0])
    ref = integrate_to_collision(x, FlowConfig(eps_coll=1e-12, step_safety=0.01))
    res = integrate_to_collision(x)
    lo, hi = collision_time_bounds(x)
    assert lo <= ref.T <= hi
    assert res.T == pytest.approx(ref.T, abs=FlowConfig().time_tol)
    assert hausdorff(res.retract, ref.retract) <= 1e-6


def test_holder_retraction_examples():
    assert holder_retraction(FSet([0.0, 1.0])).points[:, 0] == pytest.approx([0.5], abs=1e-6)
    assert holder_retraction(FSet([-1.0, 0.0, 1.0])).points[:, 0] == pytest.approx([0.0], abs=1e-6)
    x = FSet([[0.0, 1.0], [2.0, 3.0]], n=3)
    out = holder_retraction(x)
    assert out.n == 2 and np.array_equal(out.points, x.points)


@pytest.mark.parametrize("x, y, n, expected", [
    ([0.0, 1.0], [0.0, 1.0], 2, 0.0),
    ([0.0, 1.0], [1.0], 2, 6.0),
    ([0.0, 1.0], [0.0, 1.0, 1 / 32], 3, 7.5),
])
def test_holder_bound(x, y, n, expected):
    assert holder_bound(FSet(x, n=n), FSet(y, n=n)) == pytest.approx(expected, rel=1e-14)


def test_holder_bound_ambient_mismatch():
    with pytest.raises(ValueError):
        holder_bound(FSet([0.0], n=2), FSet([0.0], n=3))


@given(a=st.floats(0.01, 10.0), b=st.floats(0.01, 10.0))
def test_two_point_holder(a, b):
    # r({0, a}) = {a / 2}
    x, y = FSet([0.0, a], n=2), FSet([0.0, b], n=2)
    rx, ry = holder_retraction(x), holder_retraction(y)
    assert rx.points[0, 0] == pytest.approx(a / 2, abs=1e-6)
    assert hausdorff(rx, ry) <= holder_bound(x, y) + 1e-6


def test_config_validation():
    for kw in (dict(eps_coll=0.0), dict(step_safety=1.0), dict(max_steps=0), dict(merge_factor=0.5)):
        with pytest.raises(ValueError):
            FlowConfig(**kw)


def test_domain_errors():
    with pytest.raises(DomainError):
        integrate_to_collision(FSet([0.0, 1.0], n=3))
    with pytest.raises(DomainError):
        flow_until(FSet([0.0, 1.0]), 0.9)
    with pytest.raises(DomainError):
        integrate_pair(FSet([0.0, 1.0]), FSet([0.0, 1.0], n=3))


def test_max_steps():
    with pytest.raises(NonConvergenceError) as exc:
        integrate_to_collision(FSet([0.0, 1.0, 3.0]), FlowConfig(max_steps=5))
    assert exc.value.diagnostics["steps"] == 5


def test_merge_clusters():
    z = merge_clusters(np.array([[0.0], [1e-9], [1.0]]), 4e-8, LINE, n=2)
    assert z.points[:, 0] == pytest.approx([5e-10, 1.0])


@pytest.mark.parametrize("p", [2.0, 4.0])
@pytest.mark.parametrize("n", [3, 4, 5])
def test_trajectory_invariants(p, n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        x = FSet(rng.uniform(-1, 1, size=(n, 2)), n=n, p=p)
        res = integrate_to_collision(x, record=True)
        lo, hi = collision_time_bounds(x)
        tol = FlowConfig().time_tol
        assert lo - tol <= res.T <= hi + tol
        d = res.diagnostics
        # the minimum separation decays at rate at least 2
        assert (d["min_sep"] <= min_sep(x) - 2 * d["times"] + 1e-6).all()
        assert len(res.retract) <= n - 1
        assert hausdorff(res.retract, x) <= (n - 1) / 2 * min_sep(x) + 1e-6
        # time translation: restarting halfway recovers the remaining time
        tau = res.T / 2
        rest = integrate_to_collision(flow_until(x, tau))
        assert abs(res.T - tau - rest.T) <= 1e-5


@pytest.mark.parametrize("n", [3, 4])
def test_paired_contraction(n):
    rng = np.random.default_rng(10 + n)
    x = FSet(rng.uniform(-1, 1, size=(n, 2)), n=n)
    y = FSet(x.points + rng.normal(size=(n, 2)) * 1e-3, n=n)
    out = integrate_pair(x, y)
    assert out["paired"]
    assert (out["g"] <= out["g"][0] + 2 * (n - 1) * out["times"] + 1e-6).all()
