"""Vectors of R^d under p-norms.

Points and functionals are plain float64 arrays of length ``dim``; a
functional acts on a point through the standard pairing ``sum(f * x)``.
The :class:`NormSpec` carries the exponent and dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NotUniqueError

INF = math.inf

SIDES = {"minus": -1, "-": -1, "plus": 1, "+": 1}


def _parse_p(p):
    if isinstance(p, str):
        if p.lower() in ("inf", "infinity", "max"):
            return INF
        p = float(p)
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise ValueError(f"norm exponent must be >= 1 or inf, got {p!r}")
    return p


@dataclass(frozen=True)
class NormSpec:
    """Exponent ``p`` in [1, inf] and ambient dimension ``dim``."""

    p: float = 2.0
    dim: int = 2

    def __post_init__(self):
        object.__setattr__(self, "p", _parse_p(self.p))
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))

    @property
    def dual_p(self) -> float:
        """Conjugate exponent q with 1/p + 1/q = 1."""
        if self.p == 1.0:
            return INF
        if self.p == INF:
            return 1.0
        return self.p / (self.p - 1.0)

    @property
    def smooth(self) -> bool:
        return 1.0 < self.p < INF

    def p_json(self):
        return "inf" if self.p == INF else self.p


def as_point(v, spec: NormSpec) -> np.ndarray:
    """Validate ``v`` as a point of R^dim and return it as a float64 array."""
    a = np.asarray(v, dtype=np.float64).reshape(-1)
    if a.shape[0] != spec.dim:
        raise ValueError(f"expected a point of dimension {spec.dim}, got {a.shape[0]}")
    if not np.all(np.isfinite(a)):
        raise ValueError("point coordinates must be finite")
    return a


def pnorm(v, p: float) -> float:
    a = np.abs(np.asarray(v, dtype=np.float64))
    if p == 2.0:
        return float(math.sqrt(float(np.dot(a, a))))
    if p == 1.0:
        return float(a.sum())
    if p == INF:
        return float(a.max()) if a.size else 0.0
    m = a.max() if a.size else 0.0
    if m == 0.0:
        return 0.0
    # scaled to avoid overflow for large p
    return float(m * np.sum((a / m) ** p) ** (1.0 / p))


def row_norms(V, p: float) -> np.ndarray:
    """p-norms of the rows of a 2-D array."""
    A = np.abs(V)
    if p == 2.0:
        return np.sqrt(np.einsum("ij,ij->i", A, A))
    if p == 1.0:
        return A.sum(axis=1)
    if p == INF:
        return A.max(axis=1)
    m = A.max(axis=1)
    safe = np.where(m > 0.0, m, 1.0)
    return m * np.sum((A / safe[:, None]) ** p, axis=1) ** (1.0 / p)


def norm(v, spec: NormSpec) -> float:
    return pnorm(as_point(v, spec), spec.p)


def dual_norm(f, spec: NormSpec) -> float:
    """Operator norm of the functional ``f``, i.e. its dual p-norm."""
    return pnorm(as_point(f, spec), spec.dual_p)


def pairing(x, f) -> float:
    return float(np.dot(np.asarray(x, dtype=np.float64), np.asarray(f, dtype=np.float64)))


def norming_functional(y, spec: NormSpec) -> np.ndarray:
    """The functional ``f`` with ``||f||_* = ||y||`` and ``f(y) = ||y||^2``.

    Unique for 1 < p < inf. For p in {1, inf} the duality set is a face of a
    ball rather than a point; use :func:`semi_inner` there.
    """
    y = as_point(y, spec)
    ny = pnorm(y, spec.p)
    if ny == 0.0:
        raise DomainError("the zero vector has no normalized norming functional here")
    if not spec.smooth:
        raise NotUniqueError(f"norming functionals are not unique for p={spec.p_json()}")
    p = spec.p
    if p == 2.0:
        return y.copy()
    # |y_i|^(p-1) * ||y||^(2-p), written as ||y|| * (|y_i|/||y||)^(p-1) for scale safety
    return np.sign(y) * (np.abs(y) / ny) ** (p - 1.0) * ny


def _duality_extremes_pairings(x, y, spec):
    """Pairings <x, z*> over the extreme points of the duality set of ``y``."""
    ny = pnorm(y, spec.p)
    if spec.p == 1.0:
        zero = y == 0.0
        base = float(np.dot(np.sign(y[~zero]), x[~zero]))
        slack = float(np.abs(x[zero]).sum())
        return ny * (base - slack), ny * (base + slack)
    # p = inf: convex weights over the coordinates achieving the max
    a = np.abs(y)
    top = a == a.max()
    vals = np.sign(y[top]) * x[top]
    return ny * float(vals.min()), ny * float(vals.max())


def semi_inner(x, y, side: str, spec: NormSpec) -> float:
    """Lower (``side='minus'``) or upper (``'plus'``) semi-inner product <x, y>.

    These are the inf and sup of <x, z*> over norming functionals z* of
    ``y``; equivalently ``||y||`` times the left or right derivative of
    ``t -> ||y + t x||`` at 0.
    """
    if side not in SIDES:
        raise ValueError(f"side must be 'minus' or 'plus', got {side!r}")
    x = as_point(x, spec)
    y = as_point(y, spec)
    if pnorm(y, spec.p) == 0.0:
        raise DomainError("semi-inner products need a nonzero second argument")
    if spec.smooth:
        return pairing(x, norming_functional(y, spec))
    lo, hi = _duality_extremes_pairings(x, y, spec)
    return lo if SIDES[side] < 0 else hi


def radial(x, spec: NormSpec) -> np.ndarray:
    """Radial projection x / ||x|| onto the unit sphere."""
    x = as_point(x, spec)
    nx = pnorm(x, spec.p)
    if nx == 0.0:
        raise DomainError("radial projection is undefined at 0")
    return x / nx
