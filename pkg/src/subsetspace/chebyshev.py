"""Chebyshev centers: minimize c -> max_i ||c - x_i||_p over R^d.

Direct solvers handle d = 1, p = 2 (minimum enclosing ball) and p = inf
(coordinatewise midrange); p = 1 in the plane is rotated onto p = inf.
The remaining norms go through a linear program (p = 1) or an epigraph
SLSQP solve started from the Euclidean center.
"""

import math

import numpy as np
from scipy.optimize import linprog, minimize

from . import kernels
from .norms import INF, NormSpec

_DIRECT_MAX_K = 20
_DIRECT_MAX_DIM = 4

# l1 in the plane is linearly isometric to l-inf: |a| + |b| = max(|a + b|, |a - b|)
_ROT = np.array([[1.0, 1.0], [1.0, -1.0]])
_ROT_INV = 0.5 * _ROT


def _max_dist(c, pts, p):
    return float(kernels.cross(c[None, :], pts, p).max())


def has_direct_solver(spec: NormSpec, k: int) -> bool:
    if k > _DIRECT_MAX_K:
        return False
    if spec.dim == 1 or spec.p == INF:
        return True
    return spec.p == 2.0 and spec.dim <= _DIRECT_MAX_DIM


def _lp_l1(Y):
    k, d = Y.shape
    # variables: c (d), t (k*d), r
    nv = d + k * d + 1
    cost = np.zeros(nv)
    cost[-1] = 1.0
    rows, rhs = [], []
    for i in range(k):
        for j in range(d):
            tij = d + i * d + j
            row = np.zeros(nv)
            row[j], row[tij] = 1.0, -1.0
            rows.append(row)
            rhs.append(Y[i, j])
            row = np.zeros(nv)
            row[j], row[tij] = -1.0, -1.0
            rows.append(row)
            rhs.append(-Y[i, j])
        row = np.zeros(nv)
        row[d + i * d: d + (i + 1) * d] = 1.0
        row[-1] = -1.0
        rows.append(row)
        rhs.append(0.0)
    bounds = [(None, None)] * d + [(0, None)] * (k * d) + [(0, None)]
    res = linprog(cost, A_ub=np.array(rows), b_ub=np.array(rhs), bounds=bounds,
                  method="highs", options={"primal_feasibility_tolerance": 1e-10,
                                           "dual_feasibility_tolerance": 1e-10})
    if not res.success:
        raise RuntimeError(f"Chebyshev LP failed: {res.message}")
    return res.x[:d]


def _slsqp(Y, p):
    c0, _ = kernels.min_ball_l2(Y) if Y.shape[1] <= _DIRECT_MAX_DIM else (Y.mean(axis=0), None)
    z0 = np.append(c0, _max_dist(c0, Y, p))

    def grad_dist(c, y):
        v = c - y
        a = np.abs(v)
        nrm = np.sum(a ** p) ** (1.0 / p)
        if nrm == 0.0:
            return np.zeros_like(v)
        return np.sign(v) * (a / nrm) ** (p - 1.0)

    cons = []
    for y in Y:
        cons.append({
            "type": "ineq",
            "fun": lambda z, y=y: z[-1] - np.sum(np.abs(z[:-1] - y) ** p) ** (1.0 / p),
            "jac": lambda z, y=y: np.append(-grad_dist(z[:-1], y), 1.0),
        })
    res = minimize(lambda z: z[-1], z0, jac=lambda z: np.eye(len(z))[-1],
                   constraints=cons, method="SLSQP",
                   options={"ftol": 1e-15, "maxiter": 1000})
    c = res.x[:-1]
    # SLSQP may stop short; keep whichever of start/finish is better
    return c if _max_dist(c, Y, p) <= _max_dist(c0, Y, p) else c0


def cheb_center(points, spec: NormSpec):
    """Chebyshev center and radius of a nonempty finite point list.

    Solved in coordinates centred at the centroid, then shifted back.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if pts.shape[1] != spec.dim:
        raise ValueError("points do not match the norm dimension")
    if pts.shape[0] == 1:
        return pts[0].copy(), 0.0
    shift = pts.mean(axis=0)
    Y = pts - shift
    p = spec.p
    if has_direct_solver(spec, len(Y)):
        c, _ = kernels.small_ball(Y, p)
    elif p == 1.0 and spec.dim == 2:
        c, _ = kernels.small_ball(Y @ _ROT.T, INF)
        c = _ROT_INV @ c
    elif p == 1.0:
        c = _lp_l1(Y)
    elif p == 2.0:
        c, _ = kernels._pykernels.min_ball_l2(Y)
    elif p == INF:
        c, _ = kernels._pykernels.small_ball(Y, INF)
    else:
        c = _slsqp(Y, p)
    return c + shift, _max_dist(c, Y, p)


def two_center(points, spec: NormSpec):
    """Exhaustive split into at most two clusters minimizing the larger radius.

    Returns (radius, mask, center0, center1) in the kernel convention: the
    first point is in cluster 0, bit j-1 of ``mask`` marks point j as
    cluster 1, and ``center1`` is None for the one-cluster split.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    k = pts.shape[0]
    if k > _DIRECT_MAX_K:
        raise ValueError(f"exhaustive two-center search is limited to {_DIRECT_MAX_K} points")
    shift = pts.mean(axis=0)
    Y = pts - shift
    if has_direct_solver(spec, k):
        r, mask, c0, c1 = kernels.two_center(Y, spec.p)
        return r, mask, c0 + shift, (None if c1 is None else c1 + shift)
    if spec.p == 1.0 and spec.dim == 2:
        r, mask, c0, c1 = kernels.two_center(Y @ _ROT.T, INF)
        c0 = _ROT_INV @ c0 + shift
        c1 = None if c1 is None else _ROT_INV @ c1 + shift
        return r, mask, c0, c1
    best = (math.inf, 0, None, None)
    for mask in range(1 << (k - 1)):
        side = np.zeros(k, dtype=bool)
        side[1:] = [(mask >> (j - 1)) & 1 for j in range(1, k)]
        c0, r0 = cheb_center(Y[~side], spec)
        if r0 >= best[0] * (1.0 - 1e-12):
            continue
        c1, r1 = (None, 0.0)
        if side.any():
            c1, r1 = cheb_center(Y[side], spec)
        r = max(r0, r1)
        if r < best[0] * (1.0 - 1e-12):
            best = (r, mask, c0 + shift, None if c1 is None else c1 + shift)
    return best
