"""Acceptance gate: ten criteria at full sample sizes.

Each test prints one ``PASS``/``FAIL`` line (visible without ``-s``) and
then asserts. The whole module takes a few minutes on one core.
"""

import math
import time

import numpy as np
import pytest

from subsetspace.fset import FSet
from subsetspace.harness import RunConfig, verify
from subsetspace.selector import SelectorConfig, steiner_point

INF = math.inf


@pytest.fixture
def emit(capsys):
    def _emit(k, title, checks, extra=""):
        ok = all(c.passed for c in checks)
        failed = [c.name for c in checks if not c.passed]
        note = f"; failing: {failed}" if failed else ""
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {k:2d}: {title} "
                  f"({len(checks)} checks{', ' + extra if extra else ''}){note}")
        return ok
    return _emit


def run(suite, **kw):
    return verify(suite, RunConfig(**kw)).checks


def pick(checks, *prefixes):
    return [c for c in checks if c.name.startswith(prefixes)]


def test_criterion_01_r2_lipschitz(emit):
    t0 = time.perf_counter()
    checks = []
    for p in (1.0, 2.0, INF):
        checks += run("r2-lipschitz", dim=3, n=2, p=p, samples=100_000)
    dt = time.perf_counter() - t0
    worst = max(c.max_ratio for c in checks)
    ok = emit(1, "r2 ratio <= 1 + 1e-9 over 1e5 pairs per p", checks,
              f"max {worst:.12g}, {dt:.1f}s")
    assert ok and worst <= 1 + 1e-9
    assert dt < 30.0


def test_criterion_02_r3(emit):
    checks = run("r3-lipschitz", dim=2, n=3, p=2.0, samples=10_000)
    checks += pick(run("retraction-identity", dim=2, n=3, p=2.0, samples=10_000), "r3 ")
    strips = run("r3-strips", dim=2, n=3, p=2.0, samples=10_000)
    checks += strips
    extra = "max {:.4g}; strips {}".format(checks[0].max_ratio,
                                           "/".join(f"{c.max_ratio:.4g}" for c in strips))
    assert emit(2, "r3 ratio <= 731, identity on X(2), strip constants", checks, extra)


def test_criterion_03_rn2(emit):
    checks, maxima = [], []
    for n in (4, 5, 6):
        checks += pick(run("retraction-identity", dim=2, n=n, samples=1000), "rn2 ")
        checks += pick(run("extension", dim=2, n=n, samples=1000), "rn2 ")
        lip = run("rn2-lipschitz", dim=2, n=n, samples=10_000)
        maxima.append(lip[0].max_ratio)
        checks += lip
    extra = "max ratio " + "/".join(f"{m:.4g}" for m in maxima) + " for n=4/5/6"
    assert emit(3, "rn2 identity, affine equivariance, stable Lipschitz ratio", checks, extra)


def test_criterion_04_flow(emit):
    checks = run("flow-closed-form", samples=1)
    checks += run("collision-time", dim=2, samples=1000)
    assert emit(4, "flow closed forms, collision-time sandwich, time translation", checks)


def test_criterion_05_holder(emit):
    t0 = time.perf_counter()
    checks, worst = [], 0.0
    for n in (3, 4, 5):
        for p in (2.0, 4.0):
            got = run("holder-estimate", dim=2, n=n, p=p, samples=1000)
            worst = max(worst, got[0].max_ratio)
            checks += got
    dt = time.perf_counter() - t0
    ok = emit(5, "Hölder estimate and proximity, 1e3 pairs x 6 configs", checks,
              f"max ratio to bound {worst:.4g}, {dt:.0f}s")
    assert ok and dt < 600.0


def test_criterion_06_quasiconvexity(emit):
    checks = []
    for n in (3, 4, 5, 6):
        checks += run("quasigeodesic-modulus", dim=2, n=n, samples=1000)
    checks += run("x2-geodesic", dim=2, n=2, samples=1000)
    checks += run("spaced-sharpness", samples=1)
    checks += run("spaced-property", samples=10_000)
    assert emit(6, "2-quasigeodesic modulus, X(2) geodesics, spaced pairs", checks)


def test_criterion_07_metric_lipschitz(emit):
    checks = run("delta-2lip", dim=2, n=3, samples=100_000)
    checks += run("diam-2lip", dim=2, n=3, samples=100_000)
    checks += run("proximal-bijection", dim=2, n=3, samples=10_000)
    assert emit(7, "delta and diam 2-Lipschitz, proximal bijection", checks)


def test_criterion_08_normed_core(emit):
    checks = []
    for p in (1.0, 1.5, 2.0, 4.0, INF):
        checks += run("semi-inner", dim=3, p=p, samples=10_000)
        checks += run("radial", dim=3, p=p, samples=10_000)
    assert emit(8, "semi-inner derivatives, radial monotonicity, Dunkl-Williams", checks)


def test_criterion_09_selector(emit):
    s = steiner_point(FSet([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), SelectorConfig(sphere_samples=10**6))
    err = float(np.abs(s - 0.375).max())
    checks = run("selector", dim=2, n=3, samples=1000)
    ok = emit(9, "Steiner triangle, membership, hull contraction", checks,
              f"triangle error {err:.2e}")
    assert ok and err <= 2e-3


def test_criterion_10_relations(emit):
    checks = run("relations", samples=10_000)
    assert emit(10, "reduce and decompose against brute force", checks)
