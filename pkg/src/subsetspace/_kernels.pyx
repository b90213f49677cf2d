# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels. Mirrors ``_pykernels`` call for call."""

import numpy as np

from libc.math cimport fabs, sqrt, pow, INFINITY

cdef enum:
    MAXK = 64

cdef enum NormKind:
    K_ONE = 0
    K_TWO = 1
    K_INF = 2
    K_GEN = 3

COLLIDED, REACHED, MAXSTEPS = 0, 1, 2


cdef inline NormKind _kind(double p) noexcept:
    if p == 1.0:
        return K_ONE
    if p == 2.0:
        return K_TWO
    if p == INFINITY:
        return K_INF
    return K_GEN


cdef inline double _dist(const double* a, const double* b, Py_ssize_t d,
                         NormKind kind, double p) noexcept nogil:
    cdef Py_ssize_t k
    cdef double s = 0.0, t
    if kind == K_TWO:
        for k in range(d):
            t = a[k] - b[k]
            s += t * t
        return sqrt(s)
    if kind == K_ONE:
        for k in range(d):
            s += fabs(a[k] - b[k])
        return s
    if kind == K_INF:
        for k in range(d):
            t = fabs(a[k] - b[k])
            if t > s:
                s = t
        return s
    for k in range(d):
        s += pow(fabs(a[k] - b[k]), p)
    return pow(s, 1.0 / p)


cdef inline double _haus(const double* a, Py_ssize_t na, const double* b, Py_ssize_t nb,
                         Py_ssize_t d, NormKind kind, double p) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double best, m, fwd = 0.0, bwd = 0.0, t
    for i in range(na):
        m = INFINITY
        for j in range(nb):
            t = _dist(a + i * d, b + j * d, d, kind, p)
            if t < m:
                m = t
        if m > fwd:
            fwd = m
    for j in range(nb):
        m = INFINITY
        for i in range(na):
            t = _dist(a + i * d, b + j * d, d, kind, p)
            if t < m:
                m = t
        if m > bwd:
            bwd = m
    return fwd if fwd > bwd else bwd


def pairwise(a, double p):
    cdef const double[:, ::1] A = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t n = A.shape[0], d = A.shape[1], i, j
    cdef NormKind kind = _kind(p)
    out = np.zeros((n, n))
    cdef double[:, ::1] O = out
    for i in range(n):
        for j in range(i + 1, n):
            O[i, j] = _dist(&A[i, 0], &A[j, 0], d, kind, p)
            O[j, i] = O[i, j]
    return out


def cross(a, b, double p):
    cdef const double[:, ::1] A = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:, ::1] B = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t na = A.shape[0], nb = B.shape[0], d = A.shape[1], i, j
    cdef NormKind kind = _kind(p)
    out = np.empty((na, nb))
    cdef double[:, ::1] O = out
    for i in range(na):
        for j in range(nb):
            O[i, j] = _dist(&A[i, 0], &B[j, 0], d, kind, p)
    return out


def hausdorff(a, b, double p):
    cdef const double[:, ::1] A = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:, ::1] B = np.ascontiguousarray(b, dtype=np.float64)
    return _haus(&A[0, 0], A.shape[0], &B[0, 0], B.shape[0], A.shape[1], _kind(p), p)


def hausdorff_matrix(P, counts, double p):
    cdef const double[:, :, ::1] Q = np.ascontiguousarray(P, dtype=np.float64)
    cdef long[::1] c = np.ascontiguousarray(counts, dtype=np.int64)
    cdef Py_ssize_t G = Q.shape[0], d = Q.shape[2], g, h
    cdef NormKind kind = _kind(p)
    out = np.zeros((G, G))
    cdef double[:, ::1] O = out
    with nogil:
        for g in range(G):
            for h in range(g + 1, G):
                O[g, h] = _haus(&Q[g, 0, 0], c[g], &Q[h, 0, 0], c[h], d, kind, p)
                O[h, g] = O[g, h]
    return out


cdef int _field(const double* u, double* out, Py_ssize_t n, Py_ssize_t d,
                NormKind kind, double p, double sign) noexcept nogil:
    # out = sign * J(u); returns -1 on coincident points
    cdef Py_ssize_t i, j, k
    cdef double r, t
    for k in range(n * d):
        out[k] = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            r = _dist(u + i * d, u + j * d, d, kind, p)
            if r == 0.0:
                return -1
            for k in range(d):
                t = sign * (u[i * d + k] - u[j * d + k]) / r
                out[i * d + k] += t
                out[j * d + k] -= t
    return 0


cdef double _sep(const double* u, Py_ssize_t n, Py_ssize_t d, NormKind kind, double p) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double m = INFINITY, t
    for i in range(n):
        for j in range(i + 1, n):
            t = _dist(u + i * d, u + j * d, d, kind, p)
            if t < m:
                m = t
    return m


def flow_field(u, double p):
    cdef const double[:, ::1] U = np.ascontiguousarray(u, dtype=np.float64)
    out = np.empty((U.shape[0], U.shape[1]))
    cdef double[:, ::1] O = out
    if _field(&U[0, 0], &O[0, 0], U.shape[0], U.shape[1], _kind(p), p, 1.0) != 0:
        raise ValueError("flow field is undefined at coincident points")
    return out


def integrate(U0, double p, double eps, double theta, long max_steps, double t_end, bint record):
    """Lockstep RK4 on du/dt = -J(u); see ``_pykernels.integrate``."""
    U_arr = np.array(U0, dtype=np.float64, copy=True, order="C")
    cdef double[:, :, ::1] U = U_arr
    cdef Py_ssize_t B = U.shape[0], n = U.shape[1], d = U.shape[2]
    cdef Py_ssize_t m = n * d, b, k, i
    cdef NormKind kind = _kind(p)
    work = np.empty((6, B, n, d))
    cdef double[:, :, :, ::1] W = work
    sep_arr = np.empty(B)
    cdef double[::1] sepb = sep_arr
    cdef double t = 0.0, h, sep, speed, max_speed = 0.0, s
    cdef long steps = 0
    cdef int status
    cdef bint clipped
    cdef double* u
    cdef double* k1
    cdef double* k2
    cdef double* k3
    cdef double* k4
    cdef double* tmp
    times, states, seps = [], [], []
    while True:
        sep = INFINITY
        for b in range(B):
            sepb[b] = _sep(&U[b, 0, 0], n, d, kind, p)
            if sepb[b] < sep:
                sep = sepb[b]
        if record:
            times.append(t)
            states.append(U_arr.copy())
            seps.append(sep_arr.copy())
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
        with nogil:
            for b in range(B):
                u = &U[b, 0, 0]
                k1 = &W[0, b, 0, 0]
                k2 = &W[1, b, 0, 0]
                k3 = &W[2, b, 0, 0]
                k4 = &W[3, b, 0, 0]
                tmp = &W[4, b, 0, 0]
                _field(u, k1, n, d, kind, p, -1.0)
                for k in range(m):
                    tmp[k] = u[k] + 0.5 * h * k1[k]
                _field(tmp, k2, n, d, kind, p, -1.0)
                for k in range(m):
                    tmp[k] = u[k] + 0.5 * h * k2[k]
                _field(tmp, k3, n, d, kind, p, -1.0)
                for k in range(m):
                    tmp[k] = u[k] + h * k3[k]
                _field(tmp, k4, n, d, kind, p, -1.0)
                for k in range(m):
                    tmp[k] = (h / 6.0) * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k])
                if h > 0.0:
                    for i in range(n):
                        # zero vector as reference point for the norm
                        for k in range(d):
                            k1[k] = 0.0
                        s = _dist(tmp + i * d, k1, d, kind, p) / h
                        if s > max_speed:
                            max_speed = s
                for k in range(m):
                    u[k] += tmp[k]
        t = t_end if clipped else t + h
        steps += 1
    trace = (times, states, seps) if record else None
    return t, U_arr, steps, status, max_speed, trace


# -- Chebyshev centers ---------------------------------------------------------

cdef int _solve(double* G, double* rhs, Py_ssize_t m) noexcept nogil:
    # in-place Gaussian elimination with partial pivoting; solution in rhs
    cdef Py_ssize_t i, j, k, piv
    cdef double a, f, scale = 0.0
    for i in range(m):
        if fabs(G[i * m + i]) > scale:
            scale = fabs(G[i * m + i])
    for k in range(m):
        piv = k
        for i in range(k + 1, m):
            if fabs(G[i * m + k]) > fabs(G[piv * m + k]):
                piv = i
        if fabs(G[piv * m + k]) <= 1e-13 * scale:
            return -1
        if piv != k:
            for j in range(m):
                a = G[k * m + j]
                G[k * m + j] = G[piv * m + j]
                G[piv * m + j] = a
            a = rhs[k]
            rhs[k] = rhs[piv]
            rhs[piv] = a
        for i in range(k + 1, m):
            f = G[i * m + k] / G[k * m + k]
            for j in range(k, m):
                G[i * m + j] -= f * G[k * m + j]
            rhs[i] -= f * rhs[k]
    for k in range(m - 1, -1, -1):
        a = rhs[k]
        for j in range(k + 1, m):
            a -= G[k * m + j] * rhs[j]
        rhs[k] = a / G[k * m + k]
    return 0


cdef double _ball_l2(const double* pts, const Py_ssize_t* idx, Py_ssize_t k, Py_ssize_t d,
                     double* center) noexcept nogil:
    # brute force over support sets of size <= d + 1 (k and d are small)
    cdef Py_ssize_t s, i, j, q, ms, top
    cdef Py_ssize_t comb[MAXK]
    cdef double G[MAXK * MAXK]
    cdef double rhs[MAXK]
    cdef double c[MAXK]
    cdef double V[MAXK * MAXK]
    cdef double r, t, best = INFINITY
    cdef const double* p0
    cdef bint ok
    if k == 1:
        for q in range(d):
            center[q] = pts[idx[0] * d + q]
        return 0.0
    top = d + 1 if d + 1 < k else k
    for s in range(2, top + 1):
        for i in range(s):
            comb[i] = i
        while True:
            ms = s - 1
            p0 = pts + idx[comb[0]] * d
            for i in range(ms):
                for q in range(d):
                    V[i * d + q] = pts[idx[comb[i + 1]] * d + q] - p0[q]
            for i in range(ms):
                for j in range(ms):
                    t = 0.0
                    for q in range(d):
                        t += V[i * d + q] * V[j * d + q]
                    G[i * ms + j] = t
                rhs[i] = 0.0
            for i in range(ms):
                rhs[i] = 0.5 * G[i * ms + i]
            if _solve(G, rhs, ms) == 0:
                for q in range(d):
                    c[q] = p0[q]
                    for i in range(ms):
                        c[q] += rhs[i] * V[i * d + q]
                r = 0.0
                for i in range(s):
                    t = _dist(c, pts + idx[comb[i]] * d, d, K_TWO, 2.0)
                    if t > r:
                        r = t
                if r < best:
                    ok = True
                    for i in range(k):
                        if _dist(c, pts + idx[i] * d, d, K_TWO, 2.0) > r * (1.0 + 1e-12) + 1e-300:
                            ok = False
                            break
                    if ok:
                        best = r
                        for q in range(d):
                            center[q] = c[q]
            # next combination
            i = s - 1
            while i >= 0 and comb[i] == k - s + i:
                i -= 1
            if i < 0:
                break
            comb[i] += 1
            for j in range(i + 1, s):
                comb[j] = comb[j - 1] + 1
    return best


cdef double _midrange(const double* pts, const Py_ssize_t* idx, Py_ssize_t k, Py_ssize_t d,
                      double* center) noexcept nogil:
    cdef Py_ssize_t i, q
    cdef double lo, hi, v, r = 0.0
    for q in range(d):
        lo = INFINITY
        hi = -INFINITY
        for i in range(k):
            v = pts[idx[i] * d + q]
            if v < lo:
                lo = v
            if v > hi:
                hi = v
        center[q] = 0.5 * (lo + hi)
        if 0.5 * (hi - lo) > r:
            r = 0.5 * (hi - lo)
    return r


cdef double _small_ball(const double* pts, const Py_ssize_t* idx, Py_ssize_t k, Py_ssize_t d,
                        NormKind kind, double* center) noexcept nogil:
    cdef Py_ssize_t q
    if k == 1:
        for q in range(d):
            center[q] = pts[idx[0] * d + q]
        return 0.0
    if d == 1 or kind == K_INF:
        return _midrange(pts, idx, k, d, center)
    return _ball_l2(pts, idx, k, d, center)


def _check_small(Py_ssize_t k, Py_ssize_t d, double p):
    if k > 20 or d + 1 > MAXK or k > MAXK:
        raise ValueError("point set too large for the compiled Chebyshev solver")
    if not (d == 1 or p == 2.0 or p == INFINITY):
        raise ValueError(f"no direct Chebyshev solver for p={p} in dimension {d}")


def small_ball(pts, double p):
    cdef const double[:, ::1] A = np.ascontiguousarray(pts, dtype=np.float64)
    cdef Py_ssize_t k = A.shape[0], d = A.shape[1], i
    _check_small(k, d, p)
    cdef Py_ssize_t idx[MAXK]
    for i in range(k):
        idx[i] = i
    center = np.empty(d)
    cdef double[::1] C = center
    cdef double r = _small_ball(&A[0, 0], idx, k, d, _kind(p), &C[0])
    return center, r


def min_ball_l2(pts):
    return small_ball(pts, 2.0)


def two_center(pts, double p):
    """Exhaustive two-cluster split; see ``_pykernels.two_center``."""
    cdef const double[:, ::1] A = np.ascontiguousarray(pts, dtype=np.float64)
    cdef Py_ssize_t k = A.shape[0], d = A.shape[1], j, n0, n1
    _check_small(k, d, p)
    cdef NormKind kind = _kind(p)
    cdef Py_ssize_t i0[MAXK]
    cdef Py_ssize_t i1[MAXK]
    cdef double cbuf[MAXK]
    cdef double best = INFINITY, r0, r1, r
    cdef long mask, best_mask = 0, nmask = 1 << (k - 1)
    with nogil:
        for mask in range(nmask):
            i0[0] = 0
            n0 = 1
            n1 = 0
            for j in range(1, k):
                if (mask >> (j - 1)) & 1:
                    i1[n1] = j
                    n1 += 1
                else:
                    i0[n0] = j
                    n0 += 1
            r0 = _small_ball(&A[0, 0], i0, n0, d, kind, cbuf)
            if r0 >= best * (1.0 - 1e-12):
                continue
            r = r0
            if n1 > 0:
                r1 = _small_ball(&A[0, 0], i1, n1, d, kind, cbuf)
                if r1 > r:
                    r = r1
            if r < best * (1.0 - 1e-12):
                best = r
                best_mask = mask
    i0[0] = 0
    n0 = 1
    n1 = 0
    for j in range(1, k):
        if (best_mask >> (j - 1)) & 1:
            i1[n1] = j
            n1 += 1
        else:
            i0[n0] = j
            n0 += 1
    c0 = np.empty(d)
    cdef double[::1] C0 = c0
    _small_ball(&A[0, 0], i0, n0, d, kind, &C0[0])
    c1 = None
    cdef double[::1] C1
    if n1 > 0:
        c1 = np.empty(d)
        C1 = c1
        _small_ball(&A[0, 0], i1, n1, d, kind, &C1[0])
    return best, best_mask, c0, c1
