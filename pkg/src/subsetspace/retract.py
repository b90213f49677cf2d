"""Lipschitz retractions X(2) -> X, X(3) -> X(2) and X(n) -> X(2).

The X(3) and X(n) maps are built on normalized central sets (diameter 1,
containing the origin) by blending two candidate maps with a piecewise
linear partition of unity, then extended to all of X(n) through
r(t x0 + v) = t R(x0) + v.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .errors import PreconditionError
from .fset import FSet, diam, dist_to_x2, min_sep
from .selector import DEFAULT, SelectorConfig, steiner_point

TAU = 7.0
NORMALIZED_TOL = 1e-12


def avg(x: FSet) -> np.ndarray:
    """Arithmetic mean of the (distinct) points of x."""
    return x.points.mean(axis=0)


def r2(x: FSet) -> FSet:
    """The 1-Lipschitz retraction X(2) -> X, x -> {Avg(x)}."""
    if len(x) > 2:
        raise ValueError(f"r2 is defined on X(2); got {len(x)} points")
    if len(x) == 1:
        return x.with_n(1)
    P = x.points
    return FSet._raw(0.5 * (P[:1] + P[1:]), 1, x.spec)


@dataclass(frozen=True)
class PartitionOfUnity:
    """phi1 = 1 below ``lo``, 0 above ``hi``, linear between; phi2 = 1 - phi1."""

    lo: float
    hi: float

    def __post_init__(self):
        if not 0.0 < self.lo < self.hi:
            raise ValueError("need 0 < lo < hi")

    @property
    def lipschitz(self) -> float:
        return 1.0 / (self.hi - self.lo)

    def __call__(self, t):
        return pou_eval(self, t)


def pou_eval(P: PartitionOfUnity, t: float):
    phi1 = min(1.0, max(0.0, (P.hi - t) / (P.hi - P.lo)))
    return phi1, 1.0 - phi1


POU3 = PartitionOfUnity(1.0 / 5.0, 1.0 / 4.0)


def pou_n(tau: float = TAU) -> PartitionOfUnity:
    return PartitionOfUnity(1.0 / (3.0 * tau), 1.0 / (2.0 * tau))


@dataclass(frozen=True)
class NormalizedCentral:
    """x = t * base + v with diam(base) = 1 and 0 in base (t = 0: degenerate)."""

    base: FSet
    t: float
    v: np.ndarray
    source: FSet

    @property
    def degenerate(self) -> bool:
        return self.t == 0.0


def normalize(x: FSet, n=None) -> NormalizedCentral:
    """Normalize about the lexicographically smallest point of x."""
    n = x.n if n is None else n
    v = x.points[0].copy()
    t = diam(x)
    if t == 0.0:
        return NormalizedCentral(FSet._raw(np.zeros_like(x.points), n, x.spec), 0.0, v, x)
    return NormalizedCentral(FSet._raw((x.points - v) / t, n, x.spec), t, v, x)


def is_normalized_central(x: FSet, tol: float = NORMALIZED_TOL) -> bool:
    return abs(diam(x) - 1.0) <= tol and bool((x.points == 0.0).all(axis=1).any())


def minkowski(phi1: float, A: np.ndarray, phi2: float, B: np.ndarray) -> np.ndarray:
    """All points phi1 * a + phi2 * b, a in A, b in B."""
    return (phi1 * A[:, None, :] + phi2 * B[None, :, :]).reshape(-1, A.shape[1])


def thin_label(points, p: float = 2.0):
    """Label three points so d(x1,x2) <= d(x2,x3) <= d(x1,x3) = 1.

    ``points`` is a multiset of exactly three points of a normalized set;
    a two-point set is passed with one point repeated. Among the valid
    labelings the lexicographically smallest (x1, x2, x3) is returned.
    The vertex map is V(x) = x3.
    """
    P = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if P.shape[0] != 3:
        raise ValueError("thin_label needs exactly three points")
    D = kernels.pairwise(P, p)
    if abs(D.max() - 1.0) > NORMALIZED_TOL:
        raise ValueError(f"thin_label needs a normalized set (diameter {D.max()!r})")
    best = None
    for i, j, k in itertools.permutations(range(3)):
        if D[i, j] <= D[j, k] <= D[i, k]:
            key = tuple(P[i]) + tuple(P[j]) + tuple(P[k])
            if best is None or key < best[0]:
                best = (key, (i, j, k))
    i, j, k = best[1]
    return P[i].copy(), P[j].copy(), P[k].copy()


def _as_base(x0):
    return x0.base if isinstance(x0, NormalizedCentral) else x0


def interp3(x0) -> FSet:
    """Interpolation X(3) -> X(2) on a normalized central set.

    Blends R1(x) = {(x1 + x2)/2, x3} and R2 = Avg by the partition of unity
    on [1/5, 1/4] evaluated at the minimum separation (ambient 3).
    """
    x0 = _as_base(x0)
    if len(x0) > 3:
        raise ValueError("interp3 acts on at most three points")
    x0 = x0.with_n(3)
    phi1, phi2 = pou_eval(POU3, min_sep(x0))
    if phi1 == 0.0:
        return FSet._raw(avg(x0)[None, :], 2, x0.spec)
    P = x0.points
    if len(P) == 1:
        return x0.with_n(2)
    trio = P if len(P) == 3 else np.vstack([P[:1], P])
    x1, x2, x3 = thin_label(trio, x0.p)
    R1 = np.array([0.5 * (x1 + x2), x3])
    if phi2 == 0.0:
        return FSet._raw(R1, 2, x0.spec)
    return FSet._raw(minkowski(phi1, R1, phi2, avg(x0)[None, :]), 2, x0.spec)


def homogeneous_extend(core: Callable[[FSet], FSet], x: FSet, n_core=None) -> FSet:
    """r(t x0 + v) = t R(x0) + v with v the lexicographically smallest point, t = diam."""
    nc = normalize(x, n_core)
    if nc.degenerate:
        return x
    out = core(nc.base)
    return FSet._raw(nc.t * out.points + nc.v, out.n, x.spec)


def r3(x: FSet) -> FSet:
    """Lipschitz retraction X(3) -> X(2)."""
    if len(x) > 3:
        raise ValueError(f"r3 is defined on X(3); got {len(x)} points")
    if len(x) == 1:
        return x.with_n(2)
    return homogeneous_extend(interp3, x, 3)


def _check_tau(tau):
    if not tau > 6.0:
        raise ValueError(f"tau must exceed 6, got {tau}")


def cluster_decompose(x0, tau: float = TAU):
    """Split a 2-thin normalized set into its two clusters (x', x'').

    Clusters are the points within 1/tau of each optimal two-center; x'
    holds the lexicographically smallest point.
    """
    _check_tau(tau)
    x0 = _as_base(x0)
    w = dist_to_x2(x0)
    if not w.radius < 1.0 / tau:
        raise PreconditionError(f"not 2-thin: distance to X(2) is {w.radius:.6g} >= 1/tau")
    if len(w.centers) == 1:
        raise PreconditionError("set is within 1/tau of a single point")
    D = kernels.cross(x0.points, np.array(w.centers), x0.p)
    near = D < 1.0 / tau
    if not np.all(near.sum(axis=1) == 1):
        raise PreconditionError("cluster balls do not partition the set")
    lab = np.argmax(near, axis=1)
    first = lab[0]
    xp = x0.points[lab == first]
    xpp = x0.points[lab != first]
    return FSet._raw(xp, x0.n, x0.spec), FSet._raw(xpp, x0.n, x0.spec)


def interp_n(x0, tau: float = TAU, cfg: SelectorConfig = DEFAULT) -> FSet:
    """Interpolation X(n) -> X(2) on a normalized central set.

    Blends the skeleton {s(x'), s(x'')} of the cluster decomposition with
    {s(x)} by the partition of unity on [1/(3 tau), 1/(2 tau)] evaluated
    at dist_H(x, X(2)); s is the Steiner point.
    """
    _check_tau(tau)
    x0 = _as_base(x0)
    phi1, phi2 = pou_eval(pou_n(tau), dist_to_x2(x0).radius)
    if phi1 == 0.0:
        return FSet._raw(steiner_point(x0, cfg)[None, :], 2, x0.spec)
    if len(x0) == 1:
        return x0.with_n(2)
    xp, xpp = cluster_decompose(x0, tau)
    R1 = np.array([steiner_point(xp, cfg), steiner_point(xpp, cfg)])
    if phi2 == 0.0:
        return FSet._raw(R1, 2, x0.spec)
    R2 = steiner_point(x0, cfg)[None, :]
    return FSet._raw(minkowski(phi1, R1, phi2, R2), 2, x0.spec)


def rn2(x: FSet, tau: float = TAU, cfg: SelectorConfig = DEFAULT) -> FSet:
    """Lipschitz retraction X(n) -> X(2)."""
    _check_tau(tau)
    if len(x) == 1:
        return x.with_n(2)
    return homogeneous_extend(lambda b: interp_n(b, tau, cfg), x)
