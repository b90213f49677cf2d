"""Finite subsets of R^d under the Hausdorff metric.

An :class:`FSet` is an element of X(n): a nonempty set of at most ``n``
distinct points, stored in lexicographic order so that every derived
quantity is deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import kernels
from .chebyshev import cheb_center, two_center
from .norms import NormSpec

__all__ = [
    "FSet",
    "TwoCenterWitness",
    "hausdorff",
    "diam",
    "min_sep",
    "dist_to_x2",
    "cheb_center",
    "proximal_bijection",
]


def _canonical(arr):
    # exact dedup + lexicographic order; "+ 0.0" folds -0.0 into 0.0
    arr = arr + 0.0
    k = arr.shape[0]
    if k == 1:
        return arr
    if k <= 16:
        # python tuple sort beats lexsort on tiny inputs
        rows = sorted(set(map(tuple, arr.tolist())))
        return arr if len(rows) == k and _sorted_rows(arr, rows) else np.array(rows, dtype=np.float64)
    s = arr[np.lexsort(arr.T[::-1])]
    keep = np.empty(s.shape[0], dtype=bool)
    keep[0] = True
    np.any(s[1:] != s[:-1], axis=1, out=keep[1:])
    return s if keep.all() else s[keep]


def _sorted_rows(arr, rows):
    return arr.tolist() == [list(r) for r in rows]


class FSet:
    """A nonempty finite subset of R^d with at most ``n`` points.

    Parameters
    ----------
    points : array_like
        Shape (k, d), or a flat sequence of scalars read as points of R.
    n : int, optional
        Ambient cardinality bound; defaults to the number of distinct points.
    p : float or "inf", optional
        Norm exponent, ignored when ``spec`` is given.
    spec : NormSpec, optional
        Ambient norm; its dimension must match the points.

    Notes
    -----
    Duplicates are removed by exact coordinate equality. Two sets compare
    equal when they have the same points and norm; the ambient bound is
    not part of equality.
    """

    __slots__ = ("_pts", "_n", "_spec")

    def __init__(self, points, n=None, p=2.0, spec=None):
        arr = np.asarray(points, dtype=np.float64)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        elif arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ValueError("an FSet needs a nonempty (k, d) array of points")
        if not np.all(np.isfinite(arr)):
            raise ValueError("point coordinates must be finite")
        if spec is None:
            spec = NormSpec(p=p, dim=arr.shape[1])
        elif spec.dim != arr.shape[1]:
            raise ValueError(f"points have dimension {arr.shape[1]}, norm has {spec.dim}")
        pts = _canonical(arr)
        if n is None:
            n = pts.shape[0]
        if int(n) != n or n < 1:
            raise ValueError(f"ambient cardinality must be a positive integer, got {n!r}")
        if pts.shape[0] > n:
            raise ValueError(f"{pts.shape[0]} distinct points exceed the ambient bound n={n}")
        pts.setflags(write=False)
        self._pts = pts
        self._n = int(n)
        self._spec = spec

    @classmethod
    def _raw(cls, pts, n, spec):
        """Build from an already validated float array (dedups, skips checks)."""
        obj = cls.__new__(cls)
        pts = _canonical(pts)
        if pts.shape[0] > n:
            raise ValueError(f"{pts.shape[0]} distinct points exceed the ambient bound n={n}")
        pts.setflags(write=False)
        obj._pts, obj._n, obj._spec = pts, n, spec
        return obj

    @property
    def points(self) -> np.ndarray:
        return self._pts

    @property
    def n(self) -> int:
        return self._n

    @property
    def spec(self) -> NormSpec:
        return self._spec

    @property
    def p(self) -> float:
        return self._spec.p

    @property
    def dim(self) -> int:
        return self._spec.dim

    def __len__(self):
        return self._pts.shape[0]

    def __iter__(self):
        return iter(self._pts)

    def __eq__(self, other):
        if not isinstance(other, FSet):
            return NotImplemented
        return self._spec == other._spec and np.array_equal(self._pts, other._pts)

    def __hash__(self):
        return hash((self._spec, self._pts.tobytes()))

    def __repr__(self):
        pts = self._pts[:, 0].tolist() if self.dim == 1 else self._pts.tolist()
        return f"FSet({pts}, n={self._n}, p={self._spec.p_json()})"

    def with_n(self, n: int) -> "FSet":
        """The same point set viewed in X(n)."""
        return FSet._raw(self._pts, int(n), self._spec)

    def affine(self, t: float, v=0.0) -> "FSet":
        """The image {t*a + v : a in x}."""
        v = np.broadcast_to(np.asarray(v, dtype=np.float64), (self.dim,))
        return FSet._raw(t * self._pts + v, self._n, self._spec)

    def union(self, other: "FSet", n=None) -> "FSet":
        _check_same(self, other)
        pts = np.vstack([self._pts, other._pts])
        return FSet._raw(pts, n if n is not None else max(self._n, other._n, len(pts)), self._spec)

    def to_dict(self) -> dict:
        return {"n": self._n, "p": self._spec.p_json(), "points": self._pts.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj) -> "FSet":
        pts = np.asarray(obj["points"], dtype=np.float64)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        return cls(pts, n=obj.get("n"), p=obj.get("p", 2.0))

    @classmethod
    def from_json(cls, text: str) -> "FSet":
        return cls.from_dict(json.loads(text))


def _check_same(x: FSet, y: FSet):
    if x.spec != y.spec:
        raise ValueError(f"norm mismatch: {x.spec} vs {y.spec}")


def hausdorff(x: FSet, y: FSet) -> float:
    """Hausdorff distance max(sup_a d(a, y), sup_b d(b, x))."""
    _check_same(x, y)
    return kernels.hausdorff(x.points, y.points, x.p)


def diam(x: FSet) -> float:
    if len(x) == 1:
        return 0.0
    return float(kernels.pairwise(x.points, x.p).max())


def min_sep(x: FSet) -> float:
    """Minimum separation; 0 whenever x has fewer than n points."""
    if len(x) < x.n:
        return 0.0
    if len(x) == 1:
        # X(1) = X: no pairs to separate
        return np.inf
    D = kernels.pairwise(x.points, x.p)
    iu = np.triu_indices(len(x), 1)
    return float(D[iu].min())


@dataclass(frozen=True)
class TwoCenterWitness:
    """Optimal approximation of a set by at most two points.

    ``partition[i]`` is the index of the center assigned to ``x.points[i]``.
    """

    centers: tuple
    radius: float
    partition: tuple

    def as_fset(self, spec: NormSpec, n: int = 2) -> FSet:
        return FSet._raw(np.array(self.centers), n, spec)

    def cluster(self, x: FSet, label: int) -> np.ndarray:
        return x.points[np.asarray(self.partition) == label]


def dist_to_x2(x: FSet) -> TwoCenterWitness:
    """Hausdorff distance from x to X(2) with an optimal witness.

    Exhaustive over the 2^(k-1) splits of x into at most two clusters; the
    radius is the larger of the two cluster Chebyshev radii.
    """
    k = len(x)
    if k <= 2:
        return TwoCenterWitness(tuple(a.copy() for a in x.points), 0.0, tuple(range(k)))
    r, mask, c0, c1 = two_center(x.points, x.spec)
    part = (0,) + tuple((mask >> (j - 1)) & 1 for j in range(1, k))
    centers = (c0,) if c1 is None else (c0, c1)
    return TwoCenterWitness(centers, float(r), part)


def proximal_bijection(x: FSet, y: FSet):
    """Index bijection i -> sigma(i) with d(x_i, y_sigma(i)) <= d_H(x, y).

    Returned as a list of (i, sigma(i)) pairs when one of the sets is
    separated by more than twice the Hausdorff distance, else None.
    """
    _check_same(x, y)
    if len(x) != len(y):
        raise ValueError(f"cardinality mismatch: {len(x)} vs {len(y)}")
    D = kernels.cross(x.points, y.points, x.p)
    dh = float(max(D.min(axis=1).max(), D.min(axis=0).max()))
    if min_sep(x) > 2.0 * dh:
        sigma = np.argmin(D, axis=0)  # y_j sits in the ball around x_sigma(j)
        pairs = sorted((int(i), j) for j, i in enumerate(sigma))
    elif min_sep(y) > 2.0 * dh:
        sigma = np.argmin(D, axis=1)
        pairs = [(i, int(j)) for i, j in enumerate(sigma)]
    else:
        return None
    if len({j for _, j in pairs}) != len(pairs) or len({i for i, _ in pairs}) != len(pairs):
        return None
    return pairs
