"""Pure numpy implementations of the hot kernels.

Same signatures and return conventions as the compiled ``_kernels`` module;
used when the extension is not built or when ``SUBSETSPACE_BACKEND=python``.
"""

import math

import numpy as np

COLLIDED, REACHED, MAXSTEPS = 0, 1, 2


def _norms(v, p):
    # norms along the last axis
    if p == 2.0:
        return np.sqrt(np.einsum("...i,...i->...", v, v))
    if p == 1.0:
        return np.abs(v).sum(axis=-1)
    if p == math.inf:
        return np.abs(v).max(axis=-1)
    return (np.abs(v) ** p).sum(axis=-1) ** (1.0 / p)


def pairwise(a, p):
    a = np.asarray(a, dtype=np.float64)
    return _norms(a[:, None, :] - a[None, :, :], p)


def cross(a, b, p):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return _norms(a[:, None, :] - b[None, :, :], p)


def hausdorff(a, b, p):
    D = cross(a, b, p)
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


def hausdorff_matrix(P, counts, p):
    """All pairwise Hausdorff distances between padded point sets.

    ``P`` has shape (G, K, d); set g consists of ``P[g, :counts[g]]``.
    """
    P = np.asarray(P, dtype=np.float64)
    counts = np.asarray(counts, dtype=np.int64)
    G, K, _ = P.shape
    valid = np.arange(K)[None, :] < counts[:, None]
    out = np.zeros((G, G))
    for g in range(G):
        D = _norms(P[g][None, :, None, :] - P[:, None, :, :], p)  # (G, K, K)
        # padded rows of set g and padded columns of the others never win a min
        D = np.where(valid[:, None, :], D, np.inf)
        fwd = np.where(valid[g][None, :], D.min(axis=2), -np.inf).max(axis=1)
        D2 = np.where(valid[g][None, :, None], D, np.inf)
        bwd = np.where(valid, D2.min(axis=1), -np.inf).max(axis=1)
        out[g] = np.maximum(fwd, bwd)
    return out


def flow_field(u, p):
    u = np.asarray(u, dtype=np.float64)
    n = u.shape[0]
    diff = u[:, None, :] - u[None, :, :]
    dist = _norms(diff, p)
    off = ~np.eye(n, dtype=bool)
    if np.any(dist[off] == 0.0):
        raise ValueError("flow field is undefined at coincident points")
    np.fill_diagonal(dist, 1.0)
    return (diff / dist[:, :, None]).sum(axis=1)


def _batch_field(U, p):
    n = U.shape[1]
    diff = U[:, :, None, :] - U[:, None, :, :]
    dist = _norms(diff, p)
    idx = np.arange(n)
    dist[:, idx, idx] = 1.0
    return (diff / dist[..., None]).sum(axis=2)


def _batch_sep(U, p):
    n = U.shape[1]
    iu, ju = np.triu_indices(n, 1)
    return _norms(U[:, iu, :] - U[:, ju, :], p).min(axis=1)


def integrate(U0, p, eps, theta, max_steps, t_end, record):
    """Classical RK4 on du/dt = -J(u) for a batch of configurations.

    All members advance in lockstep with h = theta * sep / (4 (n - 1)), sep
    being the smallest separation over the batch; stops when that separation
    drops to ``eps``, at ``t_end``, or after ``max_steps`` steps.
    Returns (t, U, steps, status, max_speed, trace) with trace a tuple of
    (times, states, separations) lists when ``record`` is set, else None.
    """
    U = np.array(U0, dtype=np.float64, copy=True)
    n = U.shape[1]
    t = 0.0
    steps = 0
    max_speed = 0.0
    times, states, seps = [], [], []
    while True:
        sep_b = _batch_sep(U, p)
        sep = float(sep_b.min())
        if record:
            times.append(t)
            states.append(U.copy())
            seps.append(sep_b.copy())
        if sep <= eps:
            status = COLLIDED
            break
        if t >= t_end:
            status = REACHED
            break
        if steps >= max_steps:
            status = MAXSTEPS
            break
        h = theta * sep / (4.0 * (n - 1))
        clipped = t + h >= t_end
        if clipped:
            h = t_end - t
        k1 = -_batch_field(U, p)
        k2 = -_batch_field(U + 0.5 * h * k1, p)
        k3 = -_batch_field(U + 0.5 * h * k2, p)
        k4 = -_batch_field(U + h * k3, p)
        inc = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if h > 0.0:
            max_speed = max(max_speed, float(_norms(inc, p).max()) / h)
        U += inc
        t = t_end if clipped else t + h
        steps += 1
    trace = (times, states, seps) if record else None
    return t, U, steps, status, max_speed, trace


def _ball_through(R):
    # smallest ball with every point of R on its boundary, centred in aff(R)
    p0 = R[0]
    if len(R) == 1:
        return p0.copy(), 0.0
    V = np.array([q - p0 for q in R[1:]])
    G = V @ V.T
    lam = np.linalg.lstsq(G, 0.5 * np.diag(G), rcond=None)[0]
    c = p0 + lam @ V
    return c, float(max(np.linalg.norm(q - c) for q in R))


def _welzl(P, R, d):
    if not P or len(R) == d + 1:
        if not R:
            return None, -1.0
        return _ball_through(R)
    q = P[-1]
    c, r = _welzl(P[:-1], R, d)
    if c is not None and np.linalg.norm(q - c) <= r * (1.0 + 1e-12) + 1e-300:
        return c, r
    return _welzl(P[:-1], R + [q], d)


def min_ball_l2(pts):
    """Euclidean minimum enclosing ball (Welzl's recursion)."""
    pts = np.asarray(pts, dtype=np.float64)
    if pts.shape[0] == 1:
        return pts[0].copy(), 0.0
    c, r = _welzl(list(pts), [], pts.shape[1])
    return c, float(np.linalg.norm(pts - c, axis=1).max())


def _midrange(pts):
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    return 0.5 * (lo + hi), float(0.5 * (hi - lo).max())


def small_ball(pts, p):
    """Chebyshev center for the norms with a direct solver (d = 1, p = 2, p = inf)."""
    pts = np.asarray(pts, dtype=np.float64)
    if pts.shape[0] == 1:
        return pts[0].copy(), 0.0
    if pts.shape[1] == 1 or p == math.inf:
        return _midrange(pts)
    if p == 2.0:
        return min_ball_l2(pts)
    raise ValueError(f"no direct Chebyshev solver for p={p} in dimension {pts.shape[1]}")


def two_center(pts, p):
    """Exhaustive best split of ``pts`` into at most two clusters.

    Element 0 always sits in cluster 0; bit j-1 of the mask puts element j
    in cluster 1. Returns (radius, mask, center0, center1); center1 is None
    for the single-cluster split. Ties keep the earliest mask.
    """
    pts = np.asarray(pts, dtype=np.float64)
    k = pts.shape[0]
    best, best_mask = math.inf, 0
    for mask in range(1 << (k - 1)):
        side = np.zeros(k, dtype=bool)
        side[1:] = [(mask >> (j - 1)) & 1 for j in range(1, k)]
        r0 = small_ball(pts[~side], p)[1]
        if r0 >= best * (1.0 - 1e-12):
            continue
        r = r0
        if side.any():
            r = max(r, small_ball(pts[side], p)[1])
        if r < best * (1.0 - 1e-12):
            best, best_mask = r, mask
    side = np.zeros(k, dtype=bool)
    side[1:] = [(best_mask >> (j - 1)) & 1 for j in range(1, k)]
    c0 = small_ball(pts[~side], p)[0]
    c1 = small_ball(pts[side], p)[0] if side.any() else None
    return best, best_mask, c0, c1
