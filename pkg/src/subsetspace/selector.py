"""Steiner point selector X(n) -> X.

The Steiner point of K = Conv(x) is s(K) = d * E_u[h_K(u) u], u uniform on
the Euclidean unit sphere and h_K the support function. It lies in K, is
affine in K under Minkowski operations and is Lipschitz for the Hausdorff
metric. The expectation is replaced by a deterministic quadrature over an
antithetic direction set {u_k} + {-u_k}, so that centrally symmetric
pieces cancel exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError
from scipy.special import ndtri
from scipy.stats import qmc

from .fset import FSet, _check_same

MIN_SAMPLES = 1000
RANK_TOL = 1e-12


@dataclass(frozen=True)
class SelectorConfig:
    """Quadrature size and seed for the direction set."""

    sphere_samples: int = 4096
    seed: int = 0

    def __post_init__(self):
        if int(self.sphere_samples) < MIN_SAMPLES:
            raise ValueError(f"sphere_samples must be >= {MIN_SAMPLES}")


DEFAULT = SelectorConfig()


@lru_cache(maxsize=32)
def half_directions(dim: int, samples: int, seed: int) -> np.ndarray:
    """Half of an antithetic unit-direction set; the other half is its negation.

    d = 1 uses {+1}; d = 2 uses equally spaced angles on a half circle with
    a seeded offset; d >= 3 maps scrambled Sobol points through the normal
    quantile and normalizes. Returned read-only.
    """
    half = max(1, (samples + 1) // 2)
    if dim == 1:
        U = np.ones((1, 1))
    elif dim == 2:
        rng = np.random.default_rng(seed)
        step = math.pi / half
        ang = rng.uniform(0.0, step) + step * np.arange(half)
        U = np.column_stack([np.cos(ang), np.sin(ang)])
    else:
        m = max(1, math.ceil(math.log2(half)))
        pts = qmc.Sobol(dim, scramble=True, seed=seed).random_base2(m)
        pts = np.clip(pts, 1e-15, 1.0 - 1e-15)
        G = ndtri(pts)
        U = G / np.linalg.norm(G, axis=1, keepdims=True)
    U.setflags(write=False)
    return U


def _basis(Y):
    """Orthonormal basis (d, r) of the span of the rows of Y with a fixed sign."""
    _, S, Vt = np.linalg.svd(Y, full_matrices=False)
    if S[0] == 0.0:
        return np.zeros((Y.shape[1], 0))
    r = int(np.sum(S > RANK_TOL * S[0]))
    V = Vt[:r].T.copy()
    # largest-magnitude component of each basis vector made positive
    piv = np.argmax(np.abs(V), axis=0)
    V *= np.sign(V[piv, np.arange(r)])
    return V


def _quadrature(W, cfg):
    r = W.shape[1]
    U = half_directions(r, cfg.sphere_samples, cfg.seed)
    H = W @ U.T
    # h(u) - h(-u) = max_i <w_i, u> + min_i <w_i, u>
    diff = H.max(axis=0) + H.min(axis=0)
    return (r / (2.0 * U.shape[0])) * (diff @ U)


def _face_candidates(F, c):
    """Exact nearest point of c on the simplex with vertex rows F.

    Enumerates faces: the nearest point is the affine projection onto the
    face whose relative interior contains it.
    """
    best, best_d = F[0], math.inf
    m = F.shape[0]
    for k in range(1, m + 1):
        for idx in combinations(range(m), k):
            Q = F[list(idx)]
            if k == 1:
                q = Q[0]
            else:
                D = (Q[1:] - Q[0]).T
                lam, *_ = np.linalg.lstsq(D, c - Q[0], rcond=None)
                if lam.min() < 0.0 or lam.sum() > 1.0:
                    continue
                q = Q[0] + D @ lam
            d = float(np.sum((q - c) ** 2))
            if d < best_d:
                best, best_d = q, d
    return best, best_d


def project_to_hull(W, c):
    """The point of Conv(W) nearest to c in the Euclidean sense.

    Exact up to roundoff: faces of the (triangulated) hull are searched with
    affine least squares, or all Caratheodory subsets if qhull cannot build it.
    """
    W = np.asarray(W, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    k, r = W.shape
    if k <= r + 1:
        return _face_candidates(W, c)[0]
    try:
        hull = ConvexHull(W, qhull_options="Qt")
        if (hull.equations[:, :-1] @ c + hull.equations[:, -1]).max() <= 0.0:
            return c.copy()
        faces = [W[s] for s in hull.simplices]
    except QhullError:
        faces = [W[list(s)] for s in combinations(range(k), r + 1)]
    return min((_face_candidates(F, c) for F in faces), key=lambda t: t[1])[0]


def _inside(W, c):
    if W.shape[0] <= W.shape[1]:
        return False
    try:
        eq = ConvexHull(W).equations
    except QhullError:
        return False
    # roundoff-scale slack so a point on a facet is not sent to the projection
    tol = 1e-12 * max(1.0, float(np.abs(W).max()))
    return bool((eq[:, :-1] @ c + eq[:, -1]).max() <= tol)


def steiner_point(x: FSet, cfg: SelectorConfig = DEFAULT) -> np.ndarray:
    """Quadrature Steiner point of Conv(x).

    Computed in an orthonormal frame of the affine hull of x centred at the
    centroid (the Steiner point is intrinsic); segments use the exact
    midpoint. A roundoff-level excursion outside the hull is projected back.
    """
    pts = x.points
    if len(pts) == 1:
        return pts[0].copy()
    shift = pts.mean(axis=0)
    Y = pts - shift
    V = _basis(Y)
    r = V.shape[1]
    if r == 0:
        return shift
    W = Y if r == Y.shape[1] else Y @ V
    if r == 1:
        c = 0.5 * (W.min(axis=0) + W.max(axis=0))
    else:
        c = _quadrature(W, cfg)
        if not _inside(W, c):
            c = project_to_hull(W, c)
    return shift + (c if W is Y else V @ c)


def selector_retraction(x: FSet, cfg: SelectorConfig = DEFAULT) -> FSet:
    """{s(x)} as an element of X(1); singletons map to themselves."""
    if len(x) == 1:
        return x.with_n(1)
    return FSet._raw(steiner_point(x, cfg)[None, :], 1, x.spec)


def in_convex_hull(points, c, tol: float = 1e-9) -> bool:
    """Feasibility of c = sum l_i x_i with l >= 0, sum l = 1 (coordinatewise tol)."""
    P = np.atleast_2d(np.asarray(points, dtype=np.float64))
    c = np.asarray(c, dtype=np.float64).reshape(-1)
    k, d = P.shape
    A_ub = np.vstack([P.T, -P.T])
    b_ub = np.concatenate([c + tol, -(c - tol)])
    res = linprog(np.zeros(k), A_ub=A_ub, b_ub=b_ub, A_eq=np.ones((1, k)), b_eq=[1.0],
                  bounds=[(0, None)] * k, method="highs")
    return res.status == 0


def hull_hausdorff(x: FSet, y: FSet, cfg: SelectorConfig = DEFAULT) -> float:
    """d_H(Conv x, Conv y) from support functions on sampled dual-unit directions.

    Uses sup over ||f||_* = 1 of |h_x(f) - h_y(f)|; sampling makes this a
    lower estimate (exact in dimension 1).
    """
    _check_same(x, y)
    U = half_directions(x.dim, cfg.sphere_samples, cfg.seed)
    U = np.vstack([U, -U])
    q = x.spec.dual_p
    F = U / np.linalg.norm(U, ord=q, axis=1)[:, None]
    hx = (x.points @ F.T).max(axis=0)
    hy = (y.points @ F.T).max(axis=0)
    return float(np.abs(hx - hy).max())
