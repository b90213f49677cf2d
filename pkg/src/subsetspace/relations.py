"""Index relations between two finite sets.

A relation R on x and y is a set of index pairs (i, j), meaning point
``x.points[i]`` is related to ``y.points[j]``. Indices rather than
coordinates are used so that equal points in x and y stay distinct.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .fset import FSet, _check_same

PROXIMAL_TOL = 1e-12


@dataclass(frozen=True)
class Relation:
    """Sorted, duplicate-free index pairs into sets of sizes ``n_left`` and ``n_right``."""

    pairs: tuple
    n_left: int
    n_right: int
    x: Optional[FSet] = field(default=None, compare=False, repr=False)
    y: Optional[FSet] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        pairs = tuple(sorted({(int(i), int(j)) for i, j in self.pairs}))
        for i, j in pairs:
            if not (0 <= i < self.n_left and 0 <= j < self.n_right):
                raise ValueError(f"pair {(i, j)} out of range for sizes {(self.n_left, self.n_right)}")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def between(cls, x: FSet, y: FSet, pairs) -> "Relation":
        return cls(tuple(pairs), len(x), len(y), x, y)

    def __len__(self):
        return len(self.pairs)

    def __contains__(self, pair):
        return tuple(pair) in set(self.pairs)

    def left_counts(self) -> np.ndarray:
        """|B_a| for every left index a."""
        c = np.zeros(self.n_left, dtype=int)
        for i, _ in self.pairs:
            c[i] += 1
        return c

    def right_counts(self) -> np.ndarray:
        """|A_b| for every right index b."""
        c = np.zeros(self.n_right, dtype=int)
        for _, j in self.pairs:
            c[j] += 1
        return c

    @property
    def complete(self) -> bool:
        return bool(self.left_counts().all() and self.right_counts().all())

    @property
    def reduced(self) -> bool:
        return self.complete and all(is_essential(self, pr) for pr in self.pairs)

    def without(self, pair) -> "Relation":
        return Relation(tuple(p for p in self.pairs if p != tuple(pair)),
                        self.n_left, self.n_right, self.x, self.y)

    def max_length(self) -> float:
        """Largest distance between related points (needs x and y attached)."""
        if self.x is None or self.y is None:
            raise ValueError("relation has no attached point sets")
        idx = np.array(self.pairs)
        d = kernels.cross(self.x.points, self.y.points, self.x.p)
        return float(d[idx[:, 0], idx[:, 1]].max())

    def to_list(self):
        return [list(p) for p in self.pairs]


def proximal_relation(x: FSet, y: FSet, tol: float = PROXIMAL_TOL) -> Relation:
    """All pairs at distance at most d_H(x, y) (+ ``tol``); always complete."""
    _check_same(x, y)
    D = kernels.cross(x.points, y.points, x.p)
    dh = max(D.min(axis=1).max(), D.min(axis=0).max())
    ii, jj = np.nonzero(D <= dh + tol)
    return Relation.between(x, y, zip(ii.tolist(), jj.tolist()))


def orders(R: Relation, pair):
    """Left and right orders (O_l, O_r) = (|A_b|, |B_a|) of ``pair`` = (a, b)."""
    a, b = int(pair[0]), int(pair[1])
    if (a, b) not in R:
        raise ValueError(f"{(a, b)} is not in the relation")
    o_l = sum(1 for _, j in R.pairs if j == b)
    o_r = sum(1 for i, _ in R.pairs if i == a)
    return o_l, o_r


def is_essential(R: Relation, pair) -> bool:
    o_l, o_r = orders(R, pair)
    return o_l == 1 or o_r == 1


def reduce(R: Relation) -> Relation:
    """A reduced complete subrelation of the complete relation ``R``.

    Repeatedly drops the lexicographically first inessential pair; one
    valid choice among the (generally many) reduced subrelations.
    """
    if not R.complete:
        raise ValueError("reduce needs a complete relation")
    pairs = list(R.pairs)
    lc = R.left_counts()
    rc = R.right_counts()
    while True:
        for k, (i, j) in enumerate(pairs):
            if lc[i] > 1 and rc[j] > 1:
                del pairs[k]
                lc[i] -= 1
                rc[j] -= 1
                break
        else:
            break
    return Relation(tuple(pairs), R.n_left, R.n_right, R.x, R.y)


@dataclass(frozen=True)
class Decomposition:
    """Splitting x = x' + x'', y = y' + y'' of a reduced complete relation.

    ``f`` maps x' onto y' and ``g`` maps y'' onto x''; the relation is
    {(a, f(a))} together with {(g(b), b)}.
    """

    x_prime: tuple
    x_dprime: tuple
    y_prime: tuple
    y_dprime: tuple
    f: dict
    g: dict
    n_left: int
    n_right: int

    def reassemble(self) -> Relation:
        pairs = [(a, b) for a, b in self.f.items()] + [(a, b) for b, a in self.g.items()]
        return Relation(tuple(pairs), self.n_left, self.n_right)


def decompose(R: Relation) -> Decomposition:
    """Surjection decomposition of a reduced complete relation.

    x' collects the left indices with exactly one correspondent (pairs
    that are one-to-one on both sides land here, so f absorbs them);
    y'' collects right indices with one correspondent not already hit
    that way.
    """
    if not R.reduced:
        raise ValueError("decompose needs a reduced complete relation")
    lc = R.left_counts()
    rc = R.right_counts()
    f = {i: j for i, j in R.pairs if lc[i] == 1}
    g = {j: i for i, j in R.pairs if rc[j] == 1 and not (lc[i] == 1)}
    x_prime = tuple(sorted(f))
    y_prime = tuple(sorted(set(f.values())))
    y_dprime = tuple(sorted(g))
    x_dprime = tuple(sorted(set(g.values())))
    return Decomposition(x_prime, x_dprime, y_prime, y_dprime,
                         dict(sorted(f.items())), dict(sorted(g.items())), R.n_left, R.n_right)
