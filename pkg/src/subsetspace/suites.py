"""Property suites run by :func:`subsetspace.harness.verify`.

Each suite takes a :class:`RunConfig` and returns a list of
:class:`Check` records. ``cfg.samples`` sets the number of random draws;
sizes of the fixed-instance checks (closed forms, spaced pairs) do not
depend on it.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from . import kernels
from .flow import (collision_time_bounds, flow_until, integrate_pair, integrate_to_collision,
                   holder_retraction)
from .fset import (FSet, diam, dist_to_x2, hausdorff, min_sep, proximal_bijection)
from .harness import (Check, RunConfig, estimate_holder, estimate_lipschitz, rng_for,
                      sample_fset, sample_pair, witness_dict)
from .norms import NormSpec, norm, radial, semi_inner
from .paths import (grid_distances, path_eval, path_from_relation, quasigeodesic,
                    spaced_pair, window_counts, spaced_windows)
from .relations import Relation, decompose, proximal_relation, reduce
from .retract import (POU3, TAU, avg, interp3, interp_n, minkowski, pou_eval, r2, r3, rn2,
                      thin_label)
from .selector import hull_hausdorff, in_convex_hull, selector_retraction, steiner_point

# anchors: short descriptive names of the statement each check exercises
A_HAUS = "Hausdorff metric on finite subsets"
A_DELTA = "minimum separation is 2-Lipschitz"
A_DIAM = "diameter is 2-Lipschitz"
A_X2 = "distance to X(2) and its two-center witness"
A_PROX = "proximal bijection for well-separated sets"
A_SEMI = "semi-inner products as one-sided derivatives of the norm"
A_RADIAL = "semi-monotonicity of the radial projection"
A_DW = "Dunkl-Williams type bound for the radial projection"
A_RED = "reduction of finite complete relations"
A_DEC = "characterization of reduced complete relations"
A_QG = "2-quasiconvexity of X(n)"
A_RELPATH = "quasigeodesics from complete relations"
A_GEO2 = "X(2) is geodesic"
A_SPACED = "spaced pairs in X(n)"
A_SHARP = "sharpness of the quasiconvexity constant"
A_SEL = "affine Lipschitz selector via the Steiner point"
A_HULL = "convex hulls do not increase Hausdorff distance"
A_R2 = "1-Lipschitz retraction X(2) -> X by averaging"
A_R3 = "Lipschitz retraction X(3) -> X(2) with constant 731"
A_STRIPS = "strip-wise Lipschitz constants of the X(3) interpolation"
A_THIN = "thin-set map moves points by at most half the separation"
A_EXT = "homogeneous Lipschitz extension"
A_RN2 = "Lipschitz retraction X(n) -> X(2) via skeleton interpolation"
A_RETR = "retraction identities"
A_FLOW = "collision flow closed forms"
A_TBOUND = "bounds on the collision time"
A_TTRANS = "time translation of the collision time"
A_DECAY = "closest pair approaches at rate at least 2"
A_PROXF = "flow retraction stays near its input"
A_PAIR = "paired-flow distance growth"
A_SPEED = "flow speed bound n-1"
A_HOLDER = "Hölder estimate for the flow retraction"

P_VALUES = (1.0, 1.5, 2.0, 4.0, math.inf)


def _chk(name, anchor, samples, worst, passed, witness=None, bound=None):
    return Check(name, anchor, samples, worst, bool(passed), witness, bound)


# ------------------------------------------------------------ normed core

def _vec_pair(rng, spec):
    x = rng.normal(size=spec.dim)
    y = rng.normal(size=spec.dim)
    # a third of the time place y on a kink of a non-smooth norm
    if not spec.smooth and spec.dim > 1 and rng.uniform() < 1 / 3:
        if spec.p == 1.0:
            y[rng.integers(spec.dim)] = 0.0
        else:
            i, j = rng.choice(spec.dim, 2, replace=False)
            y[j] = abs(y[i]) * rng.choice([-1.0, 1.0])
    return x, y


def suite_semi_inner(cfg: RunConfig):
    spec = cfg.spec
    h = 1e-7
    tol = cfg.tol("derivative", 1e-5)
    worst_d = worst_o = worst_cs = 0.0
    wit = None
    for i in range(cfg.samples):
        rng = rng_for(cfg, i, 101)
        x, y = _vec_pair(rng, spec)
        ny = norm(y, spec)
        lo = semi_inner(x, y, "minus", spec)
        hi = semi_inner(x, y, "plus", spec)
        dq_plus = ny * (norm(y + h * x, spec) - ny) / h
        dq_minus = ny * (norm(y - h * x, spec) - ny) / -h
        err = max(abs(hi - dq_plus), abs(lo - dq_minus))
        if err > worst_d:
            worst_d, wit = err, {"x": x.tolist(), "y": y.tolist()}
        gap = lo - hi if not spec.smooth else abs(lo - hi)
        worst_o = max(worst_o, gap)
        worst_cs = max(worst_cs, max(abs(lo), abs(hi)) - norm(x, spec) * ny)
    return [
        _chk("one-sided derivative match", A_SEMI, cfg.samples, worst_d, worst_d <= tol, wit, tol),
        _chk("lower <= upper (equal when smooth)", A_SEMI, cfg.samples, worst_o, worst_o <= 1e-12, None, 1e-12),
        _chk("Cauchy-Schwarz type bound", A_SEMI, cfg.samples, worst_cs, worst_cs <= 1e-12, None, 1e-12),
    ]


def suite_radial(cfg: RunConfig):
    spec = cfg.spec
    min_si = math.inf
    worst_dw = -math.inf
    wit_m = wit_dw = None
    for i in range(cfg.samples):
        rng = rng_for(cfg, i, 102)
        x, y = _vec_pair(rng, spec)
        if rng.uniform() < 0.3:  # nearby pairs probe the local behaviour
            y = x + rng.normal(size=spec.dim) * 10.0 ** rng.uniform(-6, 0)
        if norm(x - y, spec) == 0.0:
            continue
        si = semi_inner(radial(x, spec) - radial(y, spec), x - y, "minus", spec)
        if si < min_si:
            min_si, wit_m = si, {"x": x.tolist(), "y": y.tolist()}
        lhs = norm(radial(x, spec) - radial(y, spec), spec)
        rhs = 2.0 * norm(x - y, spec) / max(norm(x, spec), norm(y, spec))
        if lhs - rhs > worst_dw:
            worst_dw, wit_dw = lhs - rhs, {"x": x.tolist(), "y": y.tolist()}
    return [
        _chk("radial semi-monotonicity", A_RADIAL, cfg.samples, min_si, min_si >= -1e-9, wit_m, -1e-9),
        _chk("Dunkl-Williams bound", A_DW, cfg.samples, worst_dw, worst_dw <= 1e-12, wit_dw, 1e-12),
    ]


# ------------------------------------------------------------ fset metric

def _lip_pairs(cfg, fn):
    worst, wit = -math.inf, None
    for i in range(cfg.samples):
        x, y, _ = sample_pair(cfg, i)
        if len(x) < cfg.n or len(y) < cfg.n:
            continue
        ex = abs(fn(x) - fn(y)) - 2.0 * hausdorff(x, y)
        if ex > worst:
            worst, wit = ex, witness_dict(x, y)
    return worst, wit


def suite_delta_2lip(cfg: RunConfig):
    worst, wit = _lip_pairs(cfg, min_sep)
    return [_chk("|delta(x) - delta(y)| <= 2 d_H", A_DELTA, cfg.samples, worst, worst <= 1e-12, wit, 1e-12)]


def suite_diam_2lip(cfg: RunConfig):
    worst, wit = _lip_pairs(cfg, diam)
    return [_chk("|diam(x) - diam(y)| <= 2 d_H", A_DIAM, cfg.samples, worst, worst <= 1e-12, wit, 1e-12)]


def suite_metric(cfg: RunConfig):
    sym = tri = 0.0
    for i in range(cfg.samples):
        x, y, _ = sample_pair(cfg, i)
        z, _, _ = sample_pair(cfg, i + cfg.samples)
        sym = max(sym, abs(hausdorff(x, y) - hausdorff(y, x)))
        tri = max(tri, hausdorff(x, z) - hausdorff(x, y) - hausdorff(y, z))
    return [_chk("symmetry", A_HAUS, cfg.samples, sym, sym == 0.0, None, 0.0),
            _chk("triangle inequality", A_HAUS, cfg.samples, tri, tri <= 1e-12, None, 1e-12)]


def suite_x2_witness(cfg: RunConfig, z_per_set: int = 1000):
    spec = cfg.spec
    worst_opt = -math.inf
    worst_fit = 0.0
    sets = max(1, min(cfg.samples, 50))
    wit = None
    for i in range(sets):
        x, _, _ = sample_pair(cfg, i)
        w = dist_to_x2(x)
        z_star = w.as_fset(spec)
        worst_fit = max(worst_fit, abs(hausdorff(x, z_star) - w.radius))
        rng = rng_for(cfg, i, 103)
        C = np.array(w.centers)
        for j in range(z_per_set):
            if j % 2:
                pts = rng.uniform(-cfg.box, cfg.box, size=(2, spec.dim))
            else:
                base = C if len(C) == 2 else np.vstack([C, C])
                pts = base + rng.normal(size=base.shape) * w.radius * 10.0 ** rng.uniform(-3, 0)
            ex = w.radius - hausdorff(x, FSet._raw(pts, 2, spec))
            if ex > worst_opt:
                worst_opt, wit = ex, witness_dict(x, z=FSet._raw(pts, 2, spec))
    return [
        _chk("witness attains its radius", A_X2, sets, worst_fit, worst_fit <= 1e-9, None, 1e-9),
        _chk("radius <= d_H(x, z) for z in X(2)", A_X2, sets * z_per_set, worst_opt, worst_opt <= 1e-9, wit, 1e-9),
    ]


def engineered_separated_pair(cfg: RunConfig, index: int):
    """x of full cardinality and y within d_H < delta(x)/2 (shuffled labels)."""
    rng = rng_for(cfg, index, 104)
    spec = cfg.spec
    while True:
        x = FSet._raw(rng.uniform(-cfg.box, cfg.box, size=(cfg.n, spec.dim)), cfg.n, spec)
        if len(x) == cfg.n:
            break
    rad = 0.5 * min_sep(x) * rng.uniform(0.0, 0.999)
    pts = x.points.copy()
    for k in range(len(pts)):
        v = rng.normal(size=spec.dim)
        pts[k] += v / np.linalg.norm(v, ord=spec.p) * rad * rng.uniform()
    rng.shuffle(pts)
    return x, FSet._raw(pts, cfg.n, spec)


def suite_proximal_bijection(cfg: RunConfig):
    missing = 0
    worst = -math.inf
    wit = None
    for i in range(cfg.samples):
        x, y = engineered_separated_pair(cfg, i)
        if len(y) < cfg.n or not min_sep(x) > 2 * hausdorff(x, y):
            continue
        pairs = proximal_bijection(x, y)
        if pairs is None or sorted(j for _, j in pairs) != list(range(cfg.n)):
            missing += 1
            wit = witness_dict(x, y)
            continue
        D = kernels.cross(x.points, y.points, x.p)
        ex = max(D[i_, j_] for i_, j_ in pairs) - hausdorff(x, y)
        if ex > worst:
            worst = ex
    return [_chk("bijection exists when delta > 2 d_H", A_PROX, cfg.samples, float(missing), missing == 0, wit, 0.0),
            _chk("bijection is proximal", A_PROX, cfg.samples, worst, worst <= 1e-12, None, 1e-12)]


# --------------------------------------------------------------- relations

def random_relation(rng, max_side=5, max_pairs=14):
    """Random complete relation with both sides of size <= max_side."""
    while True:
        a = int(rng.integers(1, max_side + 1))
        b = int(rng.integers(1, max_side + 1))
        M = rng.uniform(size=(a, b)) < rng.uniform(0.1, 0.9)
        for i in range(a):
            if not M[i].any():
                M[i, rng.integers(b)] = True
        for j in range(b):
            if not M[:, j].any():
                M[rng.integers(a), j] = True
        if M.sum() <= max_pairs:
            ii, jj = np.nonzero(M)
            return Relation(tuple(zip(ii.tolist(), jj.tolist())), a, b)


def brute_force_reduced(R: Relation):
    """All reduced complete subrelations of R, and the minimum complete size."""
    P = np.array(R.pairs)
    m = len(P)
    masks = np.arange(1 << m, dtype=np.int64)
    inc = ((masks[:, None] >> np.arange(m)) & 1).astype(bool)  # (2^m, m)
    L = np.zeros((m, R.n_left), dtype=np.int64)
    L[np.arange(m), P[:, 0]] = 1
    Rt = np.zeros((m, R.n_right), dtype=np.int64)
    Rt[np.arange(m), P[:, 1]] = 1
    lc = inc @ L  # |B_a| per subset
    rc = inc @ Rt  # |A_b| per subset
    complete = (lc > 0).all(axis=1) & (rc > 0).all(axis=1)
    # essential: every chosen pair has a side of count 1
    ol = rc[:, P[:, 1]]
    orr = lc[:, P[:, 0]]
    ess = ~inc | (ol == 1) | (orr == 1)
    reduced = complete & ess.all(axis=1)
    found = {tuple(map(tuple, P[inc[k]])) for k in np.nonzero(reduced)[0]}
    min_complete = int(inc[complete].sum(axis=1).min())
    return found, min_complete


def suite_relations(cfg: RunConfig):
    bad_red = bad_idem = bad_bf = bad_size = bad_rt = 0
    wit = None
    for i in range(cfg.samples):
        rng = rng_for(cfg, i, 105)
        R = random_relation(rng)
        Rr = reduce(R)
        ok = set(Rr.pairs) <= set(R.pairs) and Rr.reduced
        bad_red += not ok
        bad_idem += reduce(Rr) != Rr
        found, min_complete = brute_force_reduced(R)
        if Rr.pairs not in found:
            bad_bf += 1
            wit = {"pairs": [list(p) for p in R.pairs], "n_left": R.n_left, "n_right": R.n_right}
        N = max(R.n_left, R.n_right, R.n_left + R.n_right - 2)
        bad_size += any(len(s) > N for s in found) or min_complete > len(Rr)
        D = decompose(Rr)
        rt = D.reassemble() == Rr
        cover = (sorted(D.x_prime + D.x_dprime) == list(range(R.n_left))
                 and sorted(D.y_prime + D.y_dprime) == list(range(R.n_right))
                 and set(D.f.values()) == set(D.y_prime) and set(D.g.values()) == set(D.x_dprime))
        bad_rt += not (rt and cover)
    n = cfg.samples
    return [
        _chk("reduce gives a reduced complete subrelation", A_RED, n, float(bad_red), bad_red == 0),
        _chk("reduce is idempotent", A_RED, n, float(bad_idem), bad_idem == 0),
        _chk("reduce output among brute-force reduced subrelations", A_RED, n, float(bad_bf), bad_bf == 0, wit),
        _chk("reduced size <= max(|x|, |y|, |x|+|y|-2)", A_RED, n, float(bad_size), bad_size == 0),
        _chk("decompose round trip and surjectivity", A_DEC, n, float(bad_rt), bad_rt == 0),
    ]


# ------------------------------------------------------------------- paths

GRID = 101


def _grid_excess(path, lam, dh, grid=GRID, mode="upper"):
    ts = np.linspace(0.0, 1.0, grid)
    D = grid_distances(path, ts)
    B = lam * np.abs(ts[:, None] - ts[None, :]) * dh
    return float(np.max(D - B) if mode == "upper" else np.max(np.abs(D - B)))


def suite_quasigeodesic(cfg: RunConfig):
    worst = -math.inf
    worst_cap = 0
    wit = None
    ends = 0
    for i in range(cfg.samples):
        x, y, _ = sample_pair(cfg, i)
        g = quasigeodesic(x, y)
        dh = hausdorff(x, y)
        ex = _grid_excess(g, 2.0, dh)
        if ex > worst:
            worst, wit = ex, witness_dict(x, y)
        worst_cap = max(worst_cap, max(len(leg.relation) for leg in g.legs) - cfg.n)
        ends += not (path_eval(g, 0.0) == x and path_eval(g, 1.0) == y)
    return [
        _chk("d_H(g(t), g(t')) <= 2|t-t'| d_H(x, y) on grid", A_QG, cfg.samples, worst, worst <= 1e-9, wit, 1e-9),
        _chk("path stays in X(n)", A_QG, cfg.samples, float(worst_cap), worst_cap <= 0),
        _chk("endpoints exact", A_QG, cfg.samples, float(ends), ends == 0),
    ]


def suite_relation_leg(cfg: RunConfig):
    worst = -math.inf
    wit = None
    for i in range(cfg.samples):
        x, y, _ = sample_pair(cfg, i)
        dh = hausdorff(x, y)
        if dh < 1e-12:
            continue
        R = proximal_relation(x, y)
        g = path_from_relation(x, y, R, n=len(R))
        lam = R.max_length() / dh
        ex = _grid_excess(g, lam, dh)
        if ex > worst:
            worst, wit = ex, witness_dict(x, y)
    return [_chk("relation leg modulus lambda |t-t'| d_H", A_RELPATH, cfg.samples, worst, worst <= 1e-9, wit, 1e-9)]


def suite_x2_geodesic(cfg: RunConfig):
    c2 = cfg.replace(n=2)
    worst = 0.0
    wit = None
    for i in range(cfg.samples):
        x, y, _ = sample_pair(c2, i)
        rng = rng_for(cfg, i, 106)
        if rng.uniform() < 0.25:
            x = FSet._raw(x.points[:1], 2, x.spec)
        g = quasigeodesic(x, y)
        ex = _grid_excess(g, 1.0, hausdorff(x, y), mode="abs")
        if ex > worst:
            worst, wit = ex, witness_dict(x, y)
    return [_chk("geodesic identity in X(2)", A_GEO2, cfg.samples, worst, worst <= 1e-9, wit, 1e-9)]


def _spaced_ns(cfg):
    return range(3, 9)


def _spaced_anchors(x, y, n, m):
    xs, ys = x.points[:, 0], y.points[:, 0]
    centers = [0.5 * (lo + hi) for lo, hi, _ in spaced_windows(n, m)]
    return np.unique(np.concatenate([xs, ys, 0.5 * (xs[:, None] + ys[None, :]).ravel(), centers]))


def suite_spaced(cfg: RunConfig, z_per_pair=None):
    """Random z against every spaced pair.

    Half of the z are uniform in the bounding box; the other half are built
    from anchor points (window centres, points of x and y, their midpoints)
    plus jitter, so near-optimal candidates with r close to 1 are common.
    """
    z_per_pair = cfg.samples if z_per_pair is None else z_per_pair
    best = math.inf
    wit = None
    quota_bad = 0
    for n in _spaced_ns(cfg):
        x, y = spaced_pair(n, 4.0)
        anchors = _spaced_anchors(x, y, n, 4.0)
        lo, hi = anchors.min() - 1.0, anchors.max() + 1.0
        rng = rng_for(cfg, n, 107)
        for j in range(z_per_pair):
            k = int(rng.integers(1, n + 1))
            if j % 2:  # uniform in the bounding box
                z = rng.uniform(lo, hi, size=k)
            else:
                z = rng.choice(anchors, size=k) + rng.uniform(-1, 1, size=k) * 10.0 ** rng.uniform(-4, 0, size=k)
            z = FSet._raw(z[:, None], n, x.spec)
            r = max(hausdorff(x, z), hausdorff(z, y))
            if r < best:
                best, wit = r, witness_dict(x, y, z=z)
            if r < 1.0:
                counts = window_counts(z.points[:, 0], n, 4.0, r)
                quota_bad += all(c >= q for c, (_, _, q) in zip(counts, spaced_windows(n, 4.0)))
    total = len(_spaced_ns(cfg)) * z_per_pair
    return [_chk("max(d_H(x,z), d_H(z,y)) >= d_H(x,y)", A_SPACED, total, best, best >= 1.0 - 1e-12, wit, 1.0 - 1e-12),
            _chk("window quotas cannot all be met", A_SPACED, total, float(quota_bad), quota_bad == 0)]


def suite_spaced_sharpness(cfg: RunConfig):
    worst = math.inf
    quota_ok = True
    for n in _spaced_ns(cfg):
        x, y = spaced_pair(n, 4.0)
        g = quasigeodesic(x, y)
        z = path_eval(g, 0.5)
        r = max(hausdorff(x, z), hausdorff(z, y))
        lam = 2.0 * r / hausdorff(x, y)
        worst = min(worst, lam)
        wins = spaced_windows(n, 4.0)
        quota_ok &= sum(q for _, _, q in wins) == n + 1 and len(z) <= n
    return [_chk("midpoint forces lambda >= 2", A_SHARP, len(_spaced_ns(cfg)), worst, worst >= 2.0 - 1e-6, None, 2.0 - 1e-6),
            _chk("window quotas exceed n", A_SPACED, len(_spaced_ns(cfg)), None, quota_ok)]


# ---------------------------------------------------------------- selector

def suite_selector(cfg: RunConfig):
    sc = cfg.selector
    worst_t = worst_s = 0.0
    bad_mem = 0
    worst_hull = -math.inf
    wit_mem = None
    for i in range(cfg.samples):
        x, y, _ = sample_pair(cfg, i)
        rng = rng_for(cfg, i, 108)
        w = rng.uniform(-cfg.box, cfg.box, size=cfg.dim)
        t = 10.0 ** rng.uniform(-1, 1)
        s = steiner_point(x, sc)
        worst_t = max(worst_t, float(np.abs(steiner_point(x.affine(1.0, w), sc) - (s + w)).max()))
        worst_s = max(worst_s, float(np.abs(steiner_point(x.affine(t, w), sc) - (t * s + w)).max()))
        if not in_convex_hull(x.points, s, 1e-9):
            bad_mem += 1
            wit_mem = witness_dict(x)
        worst_hull = max(worst_hull, hull_hausdorff(x, y, sc) - hausdorff(x, y))
    n = cfg.samples
    return [
        _chk("translation equivariance", A_SEL, n, worst_t, worst_t <= 1e-12 * max(1.0, cfg.box) * 10, None),
        _chk("scale equivariance", A_SEL, n, worst_s, worst_s <= 1e-9, None, 1e-9),
        _chk("s(x) in Conv(x)", A_SEL, n, float(bad_mem), bad_mem == 0, wit_mem),
        _chk("d_H(Conv x, Conv y) <= d_H(x, y)", A_HULL, n, worst_hull, worst_hull <= 1e-9, None, 1e-9),
    ]


def _stable(est, name, anchor, limit=0.05):
    stab = est.stability()
    wit = witness_dict(*est.witness) if est.witness else None
    return _chk(name, anchor, len(est.ratios), est.max_ratio,
                math.isfinite(est.max_ratio) and stab < limit, wit, None)


def suite_selector_lipschitz(cfg: RunConfig):
    est = estimate_lipschitz("selector", cfg)
    return [_stable(est, "selector Lipschitz ratio finite and stable", A_SEL)]


# ---------------------------------------------------------------- retracts

def suite_retraction_identity(cfg: RunConfig):
    spec = cfg.spec
    sc = cfg.selector
    worst = {"r2": 0.0, "r3": 0.0, "rn2": 0.0, "selector": 0.0, "flow": 0.0}
    for i in range(cfg.samples):
        rng = rng_for(cfg, i, 109)
        P = rng.uniform(-cfg.box, cfg.box, size=(2, spec.dim))
        one = FSet._raw(P[:1], 1, spec)
        two = FSet._raw(P, 2, spec)
        worst["r2"] = max(worst["r2"], hausdorff(r2(one), one))
        worst["selector"] = max(worst["selector"], hausdorff(selector_retraction(one, sc), one))
        worst["r3"] = max(worst["r3"], hausdorff(r3(two.with_n(3)), two))
        worst["rn2"] = max(worst["rn2"], hausdorff(rn2(two.with_n(max(cfg.n, 2)), cfg.tau, sc), two))
        n = max(cfg.n, 2)
        sub = FSet._raw(rng.uniform(-cfg.box, cfg.box, size=(n - 1, spec.dim)), n, spec)
        worst["flow"] = max(worst["flow"], hausdorff(holder_retraction(sub, cfg.flow), sub))
    tol = {"r2": 0.0, "selector": 0.0, "r3": 1e-12, "rn2": 1e-9, "flow": 0.0}
    return [_chk(f"{k} is the identity on its target", A_RETR, cfg.samples, v, v <= tol[k], None, tol[k])
            for k, v in worst.items()]


def suite_r2(cfg: RunConfig):
    est = estimate_lipschitz("r2", cfg.replace(n=2))
    wit = witness_dict(*est.witness) if est.witness else None
    return [_chk("r2 ratio <= 1", A_R2, est.counted, est.max_ratio, est.max_ratio <= 1 + 1e-9, wit, 1 + 1e-9)]


def suite_r3(cfg: RunConfig):
    est = estimate_lipschitz("r3", cfg.replace(n=3))
    wit = witness_dict(*est.witness) if est.witness else None
    return [_chk("r3 ratio <= 731", A_R3, est.counted, est.max_ratio, est.max_ratio <= 731.0, wit, 731.0)]


STRIPS = (("delta <= 1/5", 0.0, 1 / 5, 3.0),
          ("1/6 <= delta <= 1/3", 1 / 6, 1 / 3, 44.0),
          ("delta >= 1/4", 1 / 4, 1.0, 9.0))


def normalized_triple(rng, spec, lo, hi):
    """Normalized central triple {0, a, b} with minimum separation in [lo, hi]."""
    while True:
        P = rng.normal(size=(3, spec.dim))
        x = FSet._raw(P, 3, spec)
        if len(x) < 3:
            continue
        t = diam(x)
        base = FSet._raw((x.points - x.points[0]) / t, 3, spec)
        d = min_sep(base)
        if lo <= d <= hi:
            return base


def _renormalize(pts, spec):
    x = FSet._raw(pts, 3, spec)
    if len(x) < 3:
        return None
    return FSet._raw((x.points - x.points[0]) / diam(x), 3, spec)


def strip_ratios(cfg: RunConfig, lo, hi):
    """Ratios d_H(R x, R y) / d_H(x, y) of the X(3) interpolation inside one strip."""
    spec = cfg.spec
    worst, wit = 0.0, None
    count = 0
    for i in range(cfg.samples):
        rng = rng_for(cfg, i, 110 + int(lo * 1000))
        # aim a third of the samples at the blending window [1/5, 1/4]
        if rng.uniform() < 1 / 3:
            a, b = max(lo, 1 / 5 - 0.02), min(hi, 1 / 4 + 0.02)
            if a >= b:
                a, b = lo, hi
        else:
            a, b = lo, hi
        x = normalized_triple(rng, spec, a, b)
        eps = 10.0 ** rng.uniform(-6, -1)
        y = _renormalize(x.points + rng.normal(size=x.points.shape) * eps, spec)
        if y is None or not lo <= min_sep(y) <= hi:
            continue
        dh = hausdorff(x, y)
        if dh < 1e-12:
            continue
        count += 1
        r = hausdorff(interp3(x), interp3(y)) / dh
        if r > worst:
            worst, wit = r, witness_dict(x, y)
    return worst, wit, count


def suite_r3_strips(cfg: RunConfig):
    out = []
    for name, lo, hi, bound in STRIPS:
        worst, wit, count = strip_ratios(cfg, lo, hi)
        out.append(_chk(f"strip {name}: ratio <= {bound:g}", A_STRIPS, count, worst,
                        worst <= bound + 1e-6, wit, bound + 1e-6))
    return out


def suite_interp3_pieces(cfg: RunConfig):
    spec = cfg.spec
    worst_f = worst_avg = worst_thin = 0.0
    for i in range(cfg.samples):
        rng = rng_for(cfg, i, 111)
        x = normalized_triple(rng, spec, 0.0, 1 / 3)
        d = min_sep(x)
        x1, x2, x3 = thin_label(x.points, spec.p)
        f = FSet._raw(np.array([0.5 * (x1 + x2), x3]), 2, spec)
        worst_thin = max(worst_thin, hausdorff(f, x) - d / 2)
        if d <= 1 / 5:
            worst_f = max(worst_f, hausdorff(interp3(x), f))
        y = normalized_triple(rng, spec, 1 / 4, 1.0)
        worst_avg = max(worst_avg, hausdorff(interp3(y), FSet._raw(avg(y)[None], 1, spec)))
    return [
        _chk("interp3 = thin map where delta <= 1/5", A_STRIPS, cfg.samples, worst_f, worst_f <= 1e-12, None, 1e-12),
        _chk("interp3 = Avg where delta >= 1/4", A_STRIPS, cfg.samples, worst_avg, worst_avg <= 1e-12, None, 1e-12),
        _chk("d_H(f(x), x) <= delta/2 on thin sets", A_THIN, cfg.samples, worst_thin, worst_thin <= 1e-12, None, 1e-12),
    ]


def _extend_at(core, x, v):
    t = diam(x)
    base = FSet._raw((x.points - v) / t, x.n, x.spec)
    return FSet._raw(t * core(base).points + v, 2, x.spec)


def suite_extension(cfg: RunConfig):
    sc = cfg.selector
    worst = {"r3": 0.0, "rn2": 0.0}
    worst_aff = 0.0
    for i in range(cfg.samples):
        rng = rng_for(cfg, i, 112)
        x3 = sample_fset(cfg.replace(n=3), "thin", i)
        xn, _, _ = sample_pair(cfg, i)
        for key, x, core, full in (("r3", x3, interp3, r3(x3)),
                                   ("rn2", xn, lambda b: interp_n(b, cfg.tau, sc), rn2(xn, cfg.tau, sc))):
            if len(x) < 2:
                continue
            v = x.points[int(rng.integers(len(x)))]
            worst[key] = max(worst[key], hausdorff(_extend_at(core, x, v), full))
        w = rng.uniform(-cfg.box, cfg.box, size=cfg.dim)
        t = 10.0 ** rng.uniform(-1, 1)
        worst_aff = max(worst_aff, hausdorff(rn2(xn.affine(t, w), cfg.tau, sc),
                                             rn2(xn, cfg.tau, sc).affine(t, w)))
    return [
        _chk("r3 independent of base point", A_EXT, cfg.samples, worst["r3"], worst["r3"] <= 1e-9, None, 1e-9),
        _chk("rn2 independent of base point", A_EXT, cfg.samples, worst["rn2"], worst["rn2"] <= 1e-9, None, 1e-9),
        _chk("rn2 affine equivariance", A_EXT, cfg.samples, worst_aff, worst_aff <= 1e-9, None, 1e-9),
    ]


def suite_rn2(cfg: RunConfig):
    est = estimate_lipschitz("rn2", cfg)
    return [_stable(est, "rn2 Lipschitz ratio finite and stable", A_RN2)]


# -------------------------------------------------------------------- flow

def suite_flow_closed_form(cfg: RunConfig):
    fc = cfg.flow
    tol = fc.time_tol
    out = []
    for pts, T, ret in (([0.0, 1.0], 0.5, [0.5]), ([-1.0, 0.0, 1.0], 0.5, [0.0])):
        x = FSet(pts)
        res = integrate_to_collision(x, fc)
        err = abs(res.T - T)
        rerr = hausdorff(res.retract, FSet(ret))
        out.append(_chk(f"T({pts}) = {T}", A_FLOW, 1, err, err <= tol, None, tol))
        out.append(_chk(f"r({pts}) = {ret}", A_FLOW, 1, rerr, rerr <= tol, None, tol))
    # collinear data stay collinear: the field lies in the affine span
    x = FSet([[0.0, 0.0], [1.0, 2.0], [3.0, 6.0]])
    res = integrate_to_collision(x, fc, record=True)
    S = res.diagnostics["states"]
    off = float(np.abs(2.0 * S[..., 0] - S[..., 1]).max())
    out.append(_chk("trajectory stays in the affine span", A_FLOW, 1, off, off <= 1e-12, None, 1e-12))
    return out


def _flow_instance(cfg, index, code=120):
    rng = rng_for(cfg, index, code)
    n = int(rng.integers(3, 6)) if cfg.n < 3 else cfg.n
    spec = cfg.spec
    while True:
        x = FSet._raw(rng.uniform(-cfg.box, cfg.box, size=(n, spec.dim)), n, spec)
        if len(x) == n:
            return x


def suite_collision_time(cfg: RunConfig, ns=(3, 4, 5)):
    fc = cfg.flow
    tol = fc.time_tol
    worst = -math.inf
    worst_tt = 0.0
    worst_speed = -math.inf
    wit = None
    count = 0
    for n in ns:
        c = cfg.replace(n=n)
        for i in range(cfg.samples):
            x = _flow_instance(c, i)
            lo, hi = collision_time_bounds(x)
            res = integrate_to_collision(x, fc)
            ex = max(lo - res.T, res.T - hi)
            if ex > worst:
                worst, wit = ex, witness_dict(x)
            worst_speed = max(worst_speed, res.diagnostics["max_speed"] - (n - 1))
            if i < max(1, cfg.samples // 10):
                tau = res.T / 2
                T2 = integrate_to_collision(flow_until(x, tau, fc), fc).T
                worst_tt = max(worst_tt, abs(res.T - tau - T2))
            count += 1
    return [
        _chk("delta/(2(n-1)) <= T <= delta/2", A_TBOUND, count, worst, worst <= tol, wit, tol),
        _chk("T(x) = tau + T(u(tau))", A_TTRANS, count, worst_tt, worst_tt <= 1e-5, None, 1e-5),
        _chk("speed <= n - 1", A_SPEED, count, worst_speed, worst_speed <= 1e-9, None, 1e-9),
    ]


def suite_flow_trajectory(cfg: RunConfig):
    fc = cfg.flow
    smooth = cfg.spec.smooth
    worst_decay = worst_prox = worst_g = -math.inf
    for i in range(cfg.samples):
        x = _flow_instance(cfg, i, 121)
        n = x.n
        res = integrate_to_collision(x, fc, record=True)
        d0 = min_sep(x)
        D = kernels.pairwise(x.points, x.p)
        np.fill_diagonal(D, np.inf)
        a, b = np.unravel_index(np.argmin(D), D.shape)
        S = res.diagnostics["states"]
        ts = res.diagnostics["times"]
        gap = np.linalg.norm(S[:, a] - S[:, b], ord=x.p, axis=1)
        worst_decay = max(worst_decay, float(np.max(gap - (d0 - 2.0 * ts))))
        worst_prox = max(worst_prox, hausdorff(res.retract, x) - (n - 1) * d0 / 2.0)
        rng = rng_for(cfg, i, 122)
        y = FSet._raw(x.points + rng.normal(size=x.points.shape) * d0 * 0.05, n, x.spec)
        if len(y) == n:
            pr = integrate_pair(x, y, fc)
            worst_g = max(worst_g, float(np.max(pr["g"] - pr["g"][0] - 2.0 * (n - 1) * pr["times"])))
    n = cfg.samples
    out = [_chk("d_H(r(x), x) <= (n-1) delta(x)/2", A_PROXF, n, worst_prox, worst_prox <= 1e-6, None, 1e-6),
           _chk("g(t) <= g(0) + 2(n-1) t", A_PAIR, n, worst_g, worst_g <= 1e-6, None, 1e-6)]
    # the decay argument needs a smooth norm; non-smooth runs are report-only
    out.append(_chk("closest pair gap <= delta - 2t" + ("" if smooth else " (report only)"),
                    A_DECAY, n, worst_decay, worst_decay <= 1e-6 or not smooth, None, 1e-6))
    return out


def suite_holder(cfg: RunConfig):
    est = estimate_holder(cfg)
    wit = witness_dict(*est.witness) if est.witness else None
    px = est.extra["proximity_excess"]
    out = [_chk("d_H(r x, r y) <= 1.05 * Hölder bound", A_HOLDER, len(est.ratios), est.max_ratio,
                est.max_ratio <= 1.05, wit, 1.05),
           _chk("d_H(r(x), x) <= (n-1) delta(x)/2", A_PROXF, 2 * len(est.ratios), px, px <= 1e-6, None, 1e-6)]
    if cfg.spec.p == 2.0:
        lip = est.extra["lipschitz"]
        out.append(_chk("Hilbert case: plain ratio stays bounded (recorded)", A_HOLDER, len(est.ratios),
                        lip, math.isfinite(lip)))
    return out


SUITES = {
    "semi-inner": (A_SEMI, suite_semi_inner),
    "radial": (A_RADIAL, suite_radial),
    "metric-axioms": (A_HAUS, suite_metric),
    "delta-2lip": (A_DELTA, suite_delta_2lip),
    "diam-2lip": (A_DIAM, suite_diam_2lip),
    "x2-witness": (A_X2, suite_x2_witness),
    "proximal-bijection": (A_PROX, suite_proximal_bijection),
    "relations": (A_RED, suite_relations),
    "quasigeodesic-modulus": (A_QG, suite_quasigeodesic),
    "relation-leg-modulus": (A_RELPATH, suite_relation_leg),
    "x2-geodesic": (A_GEO2, suite_x2_geodesic),
    "spaced-property": (A_SPACED, suite_spaced),
    "spaced-sharpness": (A_SHARP, suite_spaced_sharpness),
    "selector": (A_SEL, suite_selector),
    "selector-lipschitz": (A_SEL, suite_selector_lipschitz),
    "retraction-identity": (A_RETR, suite_retraction_identity),
    "r2-lipschitz": (A_R2, suite_r2),
    "r3-lipschitz": (A_R3, suite_r3),
    "r3-strips": (A_STRIPS, suite_r3_strips),
    "interp3-pieces": (A_STRIPS, suite_interp3_pieces),
    "extension": (A_EXT, suite_extension),
    "rn2-lipschitz": (A_RN2, suite_rn2),
    "flow-closed-form": (A_FLOW, suite_flow_closed_form),
    "collision-time": (A_TBOUND, suite_collision_time),
    "flow-trajectory": (A_PROXF, suite_flow_trajectory),
    "holder-estimate": (A_HOLDER, suite_holder),
}
