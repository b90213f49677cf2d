"""Piecewise-linear paths in X(n) built from relations.

Each leg of a :class:`QuasiPath` moves every related pair (a, b) along the
straight segment from a to b; the set at local time s is
{(1 - s) a + s b : (a, b) in R}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import CapacityError
from .fset import FSet, _check_same, hausdorff
from .norms import NormSpec
from .relations import Relation, decompose, proximal_relation, reduce


@dataclass(frozen=True)
class Leg:
    start: FSet
    end: FSet
    relation: Relation
    t0: float
    t1: float

    def _tracks(self):
        idx = np.array(self.relation.pairs)
        return self.start.points[idx[:, 0]], self.end.points[idx[:, 1]]

    def raw(self, t):
        """Track positions at global time t (duplicates kept)."""
        a, b = self._tracks()
        s = (t - self.t0) / (self.t1 - self.t0)
        return (1.0 - s) * a + s * b


@dataclass(frozen=True)
class QuasiPath:
    legs: tuple
    n: int
    spec: NormSpec

    @property
    def start(self) -> FSet:
        return self.legs[0].start

    @property
    def end(self) -> FSet:
        return self.legs[-1].end

    def _leg(self, t):
        for leg in self.legs:
            if t <= leg.t1:
                return leg
        return self.legs[-1]

    def __call__(self, t):
        return path_eval(self, t)

    def raw(self, t):
        return self._leg(t).raw(t)

    def to_dict(self) -> dict:
        return {"n": self.n, "legs": [
            {"t0": leg.t0, "t1": leg.t1, "pairs": leg.relation.to_list(),
             "start": leg.start.to_dict(), "end": leg.end.to_dict()}
            for leg in self.legs]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _leg(x, y, R, t0, t1, n):
    if not R.complete:
        raise ValueError("path legs need a complete relation")
    if len(R) > n:
        raise CapacityError(f"relation of size {len(R)} leaves X({n})")
    return Leg(x.with_n(n), y.with_n(n), R, float(t0), float(t1))


def path_from_relation(x: FSet, y: FSet, R: Relation, n=None) -> QuasiPath:
    """Single-leg path that slides every pair of ``R`` along its segment."""
    _check_same(x, y)
    n = max(x.n, y.n) if n is None else int(n)
    return QuasiPath((_leg(x, y, R, 0.0, 1.0, n),), n, x.spec)


def _identity(x):
    return Relation.between(x, x, [(i, i) for i in range(len(x))])


def constant_path(x: FSet) -> QuasiPath:
    return path_from_relation(x, x, _identity(x))


def _index_of(z: FSet):
    return {row.tobytes(): k for k, row in enumerate(z.points)}


def quasigeodesic(x: FSet, y: FSet) -> QuasiPath:
    """Path with d_H(g(t), g(t')) <= 2 |t - t'| d_H(x, y) through a proximal midpoint.

    From a reduced proximal relation with decomposition (f, g) the midpoint
    is z = x'' + y'. The first leg moves x' onto f(x') and keeps x'' fixed;
    the second keeps y' fixed and moves g(y'') onto y''. Legs meet at t = 1/2.
    """
    _check_same(x, y)
    if x.n != y.n:
        raise ValueError(f"ambient mismatch: X({x.n}) vs X({y.n})")
    n = x.n
    if x == y:
        return constant_path(x.with_n(n))
    R = reduce(proximal_relation(x, y))
    D = decompose(R)
    xpp = x.points[list(D.x_dprime)]
    yp = y.points[list(D.y_prime)]
    z = FSet._raw(np.vstack([xpp, yp]), n, x.spec)
    zi = _index_of(z)
    R1 = Relation.between(x, z, [(a, zi[y.points[b].tobytes()]) for a, b in D.f.items()]
                          + [(c, zi[x.points[c].tobytes()]) for c in D.x_dprime])
    R2 = Relation.between(z, y, [(zi[y.points[c].tobytes()], c) for c in D.y_prime]
                          + [(zi[x.points[a].tobytes()], b) for b, a in D.g.items()])
    if z == y:
        return QuasiPath((_leg(x, y, R1, 0.0, 1.0, n),), n, x.spec)
    if z == x:
        return QuasiPath((_leg(x, y, R2, 0.0, 1.0, n),), n, x.spec)
    return QuasiPath((_leg(x, z, R1, 0.0, 0.5, n), _leg(z, y, R2, 0.5, 1.0, n)), n, x.spec)


def geodesic_in_larger(x: FSet, y: FSet) -> QuasiPath:
    """Geodesic from x to y inside X(N), N = max(|x|, |y|, |x| + |y| - 2)."""
    _check_same(x, y)
    N = max(len(x), len(y), len(x) + len(y) - 2)
    if x == y:
        return path_from_relation(x, x, _identity(x), n=N)
    return path_from_relation(x, y, reduce(proximal_relation(x, y)), n=N)


def path_eval(path: QuasiPath, t: float) -> FSet:
    """The set on ``path`` at time t; leg endpoints are returned exactly."""
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    leg = path._leg(t)
    if t == leg.t0:
        return leg.start
    if t == leg.t1:
        return leg.end
    return FSet._raw(leg.raw(t), path.n, path.spec)


def _padded(path, ts):
    # one padded (G, K, d) array of raw track positions per grid time
    K = max(len(leg.relation) for leg in path.legs)
    P = np.zeros((len(ts), K, path.spec.dim))
    counts = np.zeros(len(ts), dtype=np.int64)
    for g, t in enumerate(ts):
        pts = path.raw(t)
        P[g, :len(pts)] = pts
        counts[g] = len(pts)
    return P, counts


def grid_distances(path: QuasiPath, ts) -> np.ndarray:
    """Matrix of d_H(path(t), path(t')) over the grid ``ts``."""
    P, counts = _padded(path, np.asarray(ts, dtype=np.float64))
    return kernels.hausdorff_matrix(P, counts, path.spec.p)


def grid_modulus(path: QuasiPath, grid_size: int = 101) -> float:
    """max over grid pairs t != t' of d_H(path(t), path(t')) / |t - t'|."""
    ts = np.linspace(0.0, 1.0, grid_size)
    D = grid_distances(path, ts)
    dt = np.abs(ts[:, None] - ts[None, :])
    np.fill_diagonal(dt, np.inf)
    return float((D / dt).max())


def path_length(path: QuasiPath, grid_size: int = 512) -> float:
    """Polygonal length over the uniform partition t_k = k / grid_size.

    Partitions for ``grid_size`` and ``2 * grid_size`` are nested, so the
    value is nondecreasing under doubling.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    ts = np.arange(grid_size + 1) / grid_size
    prev = path.raw(ts[0])
    total = 0.0
    for t in ts[1:]:
        cur = path.raw(t)
        total += kernels.hausdorff(prev, cur, path.spec.p)
        prev = cur
    return total


def lambda_of(path: QuasiPath, grid_size: int = 101) -> float:
    """Empirical quasigeodesic constant on a grid (0 for constant paths)."""
    dh = hausdorff(path.start, path.end)
    if dh == 0.0:
        return 0.0
    return grid_modulus(path, grid_size) / dh


def spaced_pair(n: int, m: float, direction=None, p=2.0):
    """Spaced pair of X(n) laid out on the line through ``direction``.

    x = {0, m-1, m+1, 2m+1, ..., (n-2)m+1} and
    y = {-1, 1, m, 2m+2, ..., (n-2)m+2}, both scaled by the unit vector
    ``direction`` (default: the real line). d_H(x, y) = 1.
    """
    if n < 3:
        raise ValueError("spaced pairs need n >= 3")
    if not m > 3:
        raise ValueError("spaced pairs need m > 3")
    xs = [0.0, m - 1.0, m + 1.0] + [(i - 2) * m + 1.0 for i in range(4, n + 1)]
    ys = [-1.0, 1.0, float(m)] + [(i - 2) * m + 2.0 for i in range(4, n + 1)]
    if direction is None:
        direction = np.array([1.0])
    u = np.asarray(direction, dtype=np.float64).reshape(-1)
    spec = NormSpec(p=p, dim=len(u))
    nu = float(kernels.cross(u[None, :], np.zeros((1, len(u))), spec.p)[0, 0])
    if abs(nu - 1.0) > 1e-12:
        raise ValueError("direction must be a unit vector in the chosen norm")
    x = FSet(np.outer(xs, u), n=n, spec=spec)
    y = FSet(np.outer(ys, u), n=n, spec=spec)
    return x, y


def spaced_windows(n: int, m: float):
    """Windows (lo, hi, quota) of the counting argument for ``spaced_pair(n, m)``.

    Any z within r < 1 of both sets has at least ``quota`` points within r
    of [lo, hi]; the quotas add up to n + 1.
    """
    wins = [(-1.0, 1.0, 2), (m - 1.0, m + 1.0, 2)]
    wins += [((k - 1) * m + 1.0, (k - 1) * m + 2.0, 1) for k in range(3, n)]
    return wins


def window_counts(z_coords, n: int, m: float, r: float):
    """Points of z (line coordinates) inside each r-widened window."""
    z = np.asarray(z_coords, dtype=np.float64).reshape(-1)
    return [int(np.sum((z >= lo - r) & (z <= hi + r))) for lo, hi, _ in spaced_windows(n, m)]
