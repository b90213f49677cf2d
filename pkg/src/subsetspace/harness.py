"""Randomized verification engine: samplers, empirical moduli, reports.

Every random draw is keyed by (seed, sample index, purpose code) so results
do not depend on evaluation order or on how samples are split across
worker processes.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import math
import struct
import time
from concurrent.futures import ProcessPoolExecutor
from collections import OrderedDict
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .flow import FlowConfig, holder_bound, holder_retraction
from .fset import FSet, diam, dist_to_x2, hausdorff, min_sep
from .norms import NormSpec, pnorm, row_norms
from .retract import TAU, r2, r3, rn2
from .selector import SelectorConfig, selector_retraction

STRATA = ("generic", "clustered", "thin", "near_X2")
STRATUM_CODE = {"generic": 11, "clustered": 12, "thin": 13, "near_X2": 14}
# pairs drawn 40/30/20/10 over the strata so the blending strips get hit
MIX = (("generic", 0.4), ("clustered", 0.3), ("thin", 0.2), ("near_X2", 0.1))
PAIR_CODE = 21
HOLDER_CODE = 22
SKIP_BELOW = 1e-12


@dataclass(frozen=True)
class RunConfig:
    """Settings of one verification run.

    ``tolerances`` overrides named check tolerances; ``timing`` adds wall
    time to reports (off by default so reports are byte-reproducible).
    """

    dim: int = 2
    n: int = 3
    p: object = 2.0
    seed: int = 0
    samples: int = 1000
    box: float = 1.0
    map_id: str = "r2"
    tau: float = TAU
    sphere_samples: int = 4096
    eps_coll: float = 1e-8
    step_safety: float = 0.1
    workers: int = 1
    timing: bool = False
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        object.__setattr__(self, "p", NormSpec(self.p, self.dim).p)

    @property
    def spec(self) -> NormSpec:
        return NormSpec(self.p, self.dim)

    @property
    def selector(self) -> SelectorConfig:
        return SelectorConfig(self.sphere_samples, self.seed)

    @property
    def flow(self) -> FlowConfig:
        return FlowConfig(eps_coll=self.eps_coll, step_safety=self.step_safety)

    def tol(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))

    def replace(self, **kw) -> "RunConfig":
        return dataclasses.replace(self, **kw)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["p"] = self.spec.p_json()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


def _key(seed, index, code):
    h = hashlib.blake2b(struct.pack("<qqq", seed, index, code), digest_size=32).digest()
    return int.from_bytes(h[:16], "little"), int.from_bytes(h[16:], "little") | 1


def rng_for(cfg: RunConfig, index: int, code: int) -> np.random.Generator:
    """Independent generator keyed by (seed, sample index, purpose code)."""
    state, inc = _key(cfg.seed, index, code)
    bg = np.random.PCG64()
    bg.state = {"bit_generator": "PCG64", "state": {"state": state, "inc": inc},
                "has_uint32": 0, "uinteger": 0}
    return np.random.Generator(bg)


_POOL = []


@contextmanager
def _keyed(cfg, index, code):
    # reuses pooled generators; reseeding costs ~3 us against ~20 us for a new one
    g = _POOL.pop() if _POOL else np.random.Generator(np.random.PCG64())
    state, inc = _key(cfg.seed, index, code)
    g.bit_generator.state = {"bit_generator": "PCG64", "state": {"state": state, "inc": inc},
                             "has_uint32": 0, "uinteger": 0}
    try:
        yield g
    finally:
        _POOL.append(g)


# ---------------------------------------------------------------- samplers

def _units(rng, spec, k):
    V = rng.normal(size=(k, spec.dim))
    return V / row_norms(V, spec.p)[:, None]


def _unit(rng, spec):
    return _units(rng, spec, 1)[0]


def _ball(rng, spec, k, radius):
    """k points with p-norm at most ``radius``."""
    if k == 0:
        return np.empty((0, spec.dim))
    return _units(rng, spec, k) * (radius * rng.uniform(size=k) ** (1.0 / spec.dim))[:, None]


def _generic(rng, cfg, spec):
    return rng.uniform(-cfg.box, cfg.box, size=(cfg.n, spec.dim))


def _clustered(rng, cfg, spec):
    n = cfg.n
    c0 = rng.uniform(-cfg.box, cfg.box, size=spec.dim)
    while True:
        c1 = rng.uniform(-cfg.box, cfg.box, size=spec.dim)
        if pnorm(c1 - c0, spec.p) >= cfg.box / 2:
            break
    # cluster radius <= box / tau^2 keeps dist(x, X(2)) / diam(x) < 1 / tau
    rad = cfg.box / cfg.tau ** 2 * rng.uniform(0.05, 1.0)
    k0 = int(rng.integers(1, n)) if n > 1 else 1
    centers = np.where((np.arange(n) < k0)[:, None], c0, c1)
    return centers + _ball(rng, spec, n, rad)


def _thin(rng, cfg, spec):
    pts = _generic(rng, cfg, spec)
    if cfg.n < 3:
        return pts
    for _ in range(100):
        D = diam(FSet._raw(pts, cfg.n, spec))
        pts[1] = pts[0] + _unit(rng, spec) * D / 3.0 * rng.uniform(0.01, 1.0)
        x = FSet._raw(pts, cfg.n, spec)
        if len(x) == cfg.n and min_sep(x) <= diam(x) / 3.0 + 1e-12:
            return pts
    raise RuntimeError("thin sampler failed")


def pou_targets(cfg: RunConfig):
    """(quantity, breakpoint) pairs the near-boundary stratum aims at."""
    if cfg.n == 3 and cfg.map_id != "rn2":
        return (("min_sep", 1 / 5), ("min_sep", 1 / 4))
    return (("dist_x2", 1 / (3 * cfg.tau)), ("dist_x2", 1 / (2 * cfg.tau)))


def _ratio(pts, spec, n, kind):
    x = FSet._raw(pts, n, spec)
    q = min_sep(x) if kind == "min_sep" else dist_to_x2(x).radius
    return q / diam(x)


def _near_x2(rng, cfg, spec):
    n = cfg.n
    if n < 3:
        return _clustered(rng, cfg, spec)
    (kind, lo), (_, hi) = pou_targets(cfg)
    if rng.uniform() < 0.5:
        # across the whole blending strip
        goal = rng.uniform(0.9 * lo, 1.1 * hi)
    else:
        goal = (lo, hi)[int(rng.integers(2))] * (1.0 + 0.1 * rng.uniform(-1.0, 1.0))
    e = _unit(rng, spec)
    w = _unit(rng, spec)
    if kind == "min_sep":
        base = np.array([np.zeros(spec.dim), w, e])
        build = lambda s: np.array([base[0], s * base[1], base[2]])
    else:
        k0 = int(rng.integers(2, n)) if n > 2 else 2
        a = _ball(rng, spec, k0 - 2, 0.9)
        b = _ball(rng, spec, n - k0, 0.9)
        build = lambda s: np.vstack([s * w, -s * w, s * a, e * 1.0 + s * b])
    s = goal
    for _ in range(6):  # fixed-point on s so the ratio lands near the goal
        r = _ratio(build(s), spec, n, kind)
        if r <= 0:
            break
        s *= goal / r
    pts = build(s)
    scale = cfg.box * rng.uniform(0.5, 1.0)
    return pts * scale + rng.uniform(-cfg.box, cfg.box, size=spec.dim)


_SAMPLERS = {"generic": _generic, "clustered": _clustered, "thin": _thin, "near_X2": _near_x2}


def _draw(stratum, rng, cfg, spec):
    try:
        fn = _SAMPLERS[stratum]
    except KeyError:
        raise ValueError(f"unknown stratum {stratum!r}; choose from {STRATA}") from None
    return FSet._raw(fn(rng, cfg, spec), cfg.n, spec)


def sample_fset(cfg: RunConfig, stratum: str = "generic", index: int = 0) -> FSet:
    """Reproducible random element of X(n) from the named stratum."""
    if stratum not in _SAMPLERS:
        raise ValueError(f"unknown stratum {stratum!r}; choose from {STRATA}")
    with _keyed(cfg, index, STRATUM_CODE[stratum]) as rng:
        return _draw(stratum, rng, cfg, cfg.spec)


def _perturb(rng, x, cfg, scale):
    spec = x.spec
    k = len(x)
    pts = x.points + _ball(rng, spec, k, scale)
    return FSet._raw(pts, x.n, spec)


# Pairs are generated in blocks of BLOCK consecutive indices, each block keyed
# by (seed, block, PAIR_CODE) and drawn with vectorized numpy; per-pair
# generators cost more than the maps being measured.
BLOCK = 256
_BLOCK_CACHE: "OrderedDict[tuple, list]" = OrderedDict()
_BLOCK_CACHE_SIZE = 8


def _balls(rng, spec, shape, radius):
    """Points of p-norm at most ``radius`` (broadcast against ``shape``)."""
    d = spec.dim
    V = rng.normal(size=shape + (d,))
    nv = row_norms(V.reshape(-1, d), spec.p).reshape(shape)
    r = radius * rng.random(shape) ** (1.0 / d)
    return V * (r / nv)[..., None]


def _diams(P, spec):
    """Diameters of a stack (m, k, d) of point sets."""
    m, k, d = P.shape
    if k == 1:
        return np.zeros(m)
    diff = (P[:, :, None, :] - P[:, None, :, :]).reshape(-1, d)
    return row_norms(diff, spec.p).reshape(m, k * k).max(axis=1)


def _min_seps(P, spec):
    m, k, d = P.shape
    iu = np.triu_indices(k, 1)
    diff = (P[:, iu[0], :] - P[:, iu[1], :]).reshape(-1, d)
    return row_norms(diff, spec.p).reshape(m, -1).min(axis=1)


def _generic_batch(rng, cfg, spec, m):
    return rng.uniform(-cfg.box, cfg.box, size=(m, cfg.n, spec.dim))


def _clustered_batch(rng, cfg, spec, m):
    n, d, box = cfg.n, spec.dim, cfg.box
    c0 = rng.uniform(-box, box, size=(m, d))
    c1 = rng.uniform(-box, box, size=(m, d))
    bad = row_norms(c1 - c0, spec.p) < box / 2
    while bad.any():
        c1[bad] = rng.uniform(-box, box, size=(int(bad.sum()), d))
        bad = row_norms(c1 - c0, spec.p) < box / 2
    rad = box / cfg.tau ** 2 * rng.uniform(0.05, 1.0, size=m)
    k0 = rng.integers(1, n, size=m) if n > 1 else np.ones(m, dtype=np.int64)
    first = (np.arange(n)[None, :] < k0[:, None])[..., None]
    centers = np.where(first, c0[:, None, :], c1[:, None, :])
    return centers + _balls(rng, spec, (m, n), rad[:, None])


def _thin_batch(rng, cfg, spec, m):
    P = _generic_batch(rng, cfg, spec, m)
    if cfg.n < 3:
        return P
    todo = np.arange(m)
    for _ in range(100):
        if todo.size == 0:
            return P
        Q = P[todo]
        k = len(todo)
        D = _diams(Q, spec)
        Q[:, 1] = Q[:, 0] + _units(rng, spec, k) * (D / 3.0 * rng.uniform(0.01, 1.0, size=k))[:, None]
        sep = _min_seps(Q, spec)
        ok = (sep > 0.0) & (sep <= _diams(Q, spec) / 3.0 + 1e-12)
        P[todo] = Q
        todo = todo[~ok]
    raise RuntimeError("thin sampler failed")


def _near_x2_batch(rng, cfg, spec, m):
    if cfg.n < 3:
        return _clustered_batch(rng, cfg, spec, m)
    return np.array([_near_x2(rng, cfg, spec) for _ in range(m)]).reshape(m, cfg.n, spec.dim)


_BATCH = {"generic": _generic_batch, "clustered": _clustered_batch,
          "thin": _thin_batch, "near_X2": _near_x2_batch}


def _block_key(cfg):
    return (cfg.dim, cfg.n, cfg.p, cfg.seed, cfg.box, cfg.tau, pou_targets(cfg))


def _pair_block(cfg: RunConfig, block: int):
    key = (_block_key(cfg), block)
    hit = _BLOCK_CACHE.get(key)
    if hit is not None:
        _BLOCK_CACHE.move_to_end(key)
        return hit
    spec = cfg.spec
    n, d = cfg.n, spec.dim
    names = [name for name, _ in MIX]
    cum = np.cumsum([w for _, w in MIX])
    with _keyed(cfg, block, PAIR_CODE) as rng:
        which = np.minimum(np.searchsorted(cum, rng.random(BLOCK), side="right"), len(MIX) - 1)
        near = rng.random(BLOCK) < 0.5
        expo = rng.uniform(-4.0, 0.0, size=BLOCK)
        X = np.empty((BLOCK, n, d))
        Y = np.empty((BLOCK, n, d))
        for k, name in enumerate(names):
            rows = np.nonzero(which == k)[0]
            if rows.size:
                X[rows] = _BATCH[name](rng, cfg, spec, rows.size)
                Y[rows] = _BATCH[name](rng, cfg, spec, rows.size)
        scale = np.maximum(_diams(X, spec), cfg.box) * 10.0 ** expo
        # half of the perturbations move a single point: the moduli of the
        # interpolating maps are driven by a few extremal points, which dense
        # random directions rarely align with
        single = rng.random(BLOCK) < 0.5
        mover = rng.integers(0, n, size=BLOCK)
        mask = np.where(single[:, None], np.arange(n)[None, :] == mover[:, None], True)
        Yp = X + _balls(rng, spec, (BLOCK, n), scale[:, None]) * mask[..., None]
        Y = np.where(near[:, None, None], Yp, Y)
    out = [(FSet._raw(X[i], n, spec), FSet._raw(Y[i], n, spec), names[which[i]])
           for i in range(BLOCK)]
    _BLOCK_CACHE[key] = out
    while len(_BLOCK_CACHE) > _BLOCK_CACHE_SIZE:
        _BLOCK_CACHE.popitem(last=False)
    return out


def sample_pair(cfg: RunConfig, index: int):
    """(x, y, stratum) for pair ``index``; y is a perturbation of x half the time.

    The stratum follows MIX; both sets come from the same stratum. Half of
    the perturbations move one point only.
    """
    if index < 0:
        raise ValueError("pair index must be nonnegative")
    b, i = divmod(index, BLOCK)
    return _pair_block(cfg, b)[i]


def sample_pairs(cfg: RunConfig, lo: int, hi: int):
    """Pairs lo..hi-1 (same values as repeated :func:`sample_pair`)."""
    out = []
    for b in range(lo // BLOCK, (hi - 1) // BLOCK + 1 if hi > lo else lo // BLOCK):
        blk = _pair_block(cfg, b)
        a = max(lo, b * BLOCK) - b * BLOCK
        z = min(hi, (b + 1) * BLOCK) - b * BLOCK
        out.extend(blk[a:z])
    return out


# ------------------------------------------------------------------- maps

def _map_table():
    return {
        "identity": (None, lambda x, cfg: x),
        "dilate2": (None, lambda x, cfg: x.affine(2.0)),
        "r2": (2, lambda x, cfg: r2(x)),
        "r3": (3, lambda x, cfg: r3(x)),
        "rn2": (None, lambda x, cfg: rn2(x, cfg.tau, cfg.selector)),
        "selector": (None, lambda x, cfg: selector_retraction(x, cfg.selector)),
        "flow": (None, lambda x, cfg: holder_retraction(x, cfg.flow)),
    }


MAPS = tuple(_map_table())


def get_map(map_id: str, cfg: RunConfig) -> Callable[[FSet], FSet]:
    table = _map_table()
    if map_id not in table:
        raise ValueError(f"unknown map {map_id!r}; choose from {MAPS}")
    nmax, fn = table[map_id]
    if nmax is not None and cfg.n > nmax:
        raise ValueError(f"map {map_id!r} acts on X({nmax}); config has n={cfg.n}")
    return lambda x: fn(x, cfg)


# ------------------------------------------------------------- estimators

@dataclass
class Estimate:
    """Per-pair ratio samples of an empirical modulus; NaN marks skipped pairs."""

    ratios: np.ndarray
    d_in: np.ndarray
    d_out: np.ndarray
    bound: np.ndarray
    strata: list
    witness: Optional[tuple] = None
    extra: dict = field(default_factory=dict)

    @property
    def max_ratio(self) -> float:
        r = self.ratios[~np.isnan(self.ratios)]
        return float(r.max()) if r.size else 0.0

    @property
    def counted(self) -> int:
        return int(np.sum(~np.isnan(self.ratios)))

    def running_max(self) -> np.ndarray:
        return np.fmax.accumulate(np.where(np.isnan(self.ratios), -np.inf, self.ratios))

    def stability(self) -> float:
        """Relative change of the running max between half and all samples."""
        rm = self.running_max()
        half = rm[len(rm) // 2 - 1] if len(rm) > 1 else rm[-1]
        if not np.isfinite(half) or half <= 0:
            return math.inf
        return float((rm[-1] - half) / half)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["pair_id", "d_H_in", "d_H_out", "ratio", "bound", "stratum"])
            for i in range(len(self.ratios)):
                w.writerow([i, repr(float(self.d_in[i])), repr(float(self.d_out[i])),
                            repr(float(self.ratios[i])), repr(float(self.bound[i])), self.strata[i]])


def _lip_chunk(map_id, cfg, lo, hi):
    F = get_map(map_id, cfg)
    rows = []
    for x, y, stratum in sample_pairs(cfg, lo, hi):
        d_in = hausdorff(x, y)
        if d_in < SKIP_BELOW:
            rows.append((math.nan, d_in, math.nan, stratum))
            continue
        d_out = hausdorff(F(x), F(y))
        rows.append((d_out / d_in, d_in, d_out, stratum))
    return rows


def _chunks(total, workers):
    # block-aligned so each worker generates whole pair blocks
    size = BLOCK * max(1, math.ceil(total / (4 * workers * BLOCK)))
    return [(lo, min(total, lo + size)) for lo in range(0, total, size)]


def _run_chunks(fn, args, cfg):
    if cfg.workers == 1:
        return fn(*args, 0, cfg.samples)
    rows = []
    with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
        futs = [ex.submit(fn, *args, lo, hi) for lo, hi in _chunks(cfg.samples, cfg.workers)]
        for f in futs:
            rows.extend(f.result())
    return rows


def estimate_lipschitz(map_id: str, cfg: RunConfig, csv_path=None) -> Estimate:
    """max over sampled pairs of d_H(F x, F y) / d_H(x, y) with its witness pair."""
    get_map(map_id, cfg)
    rows = _run_chunks(_lip_chunk, (map_id, cfg), cfg)
    ratios = np.array([r[0] for r in rows])
    est = Estimate(ratios, np.array([r[1] for r in rows]), np.array([r[2] for r in rows]),
                   np.full(len(rows), np.nan), [r[3] for r in rows])
    if est.counted:
        k = int(np.nanargmax(ratios))
        x, y, _ = sample_pair(cfg, k)
        est.witness = (x, y)
        est.extra["witness_index"] = k
    if csv_path:
        est.to_csv(csv_path)
    return est


def sample_holder_pair(cfg: RunConfig, index: int, lo=1e-3, hi=1.0):
    """Generic x of full cardinality and y with d_H(x, y) in [lo, hi]."""
    with _keyed(cfg, index, HOLDER_CODE) as rng:
        return _holder_pair(rng, cfg, lo, hi)


def _holder_pair(rng, cfg, lo, hi):
    spec = cfg.spec
    while True:
        x = _draw("generic", rng, cfg, spec)
        target = 10.0 ** rng.uniform(math.log10(lo), math.log10(hi))
        y = _perturb(rng, x, cfg, target)
        if len(x) == cfg.n and len(y) == cfg.n:
            dh = hausdorff(x, y)
            if lo <= dh <= hi:
                return x, y


def _holder_chunk(cfg, lo, hi):
    fc = cfg.flow
    rows = []
    for i in range(lo, hi):
        x, y = sample_holder_pair(cfg, i)
        rx, ry = holder_retraction(x, fc), holder_retraction(y, fc)
        d_in = hausdorff(x, y)
        d_out = hausdorff(rx, ry)
        b = holder_bound(x, y)
        n = cfg.n
        prox = max(hausdorff(rx, x) - (n - 1) * min_sep(x) / 2.0,
                   hausdorff(ry, y) - (n - 1) * min_sep(y) / 2.0)
        rows.append((d_out / b, d_in, d_out, b, prox))
    return rows


def estimate_holder(cfg: RunConfig, csv_path=None) -> Estimate:
    """max over pairs of d_H(r x, r y) / holder_bound(x, y) for the flow retraction.

    ``extra['proximity_excess']`` is the largest d_H(r(x), x) - (n-1) delta(x)/2
    seen, and ``extra['lipschitz']`` the largest plain ratio d_H(r x, r y)/d_H(x, y).
    """
    rows = _run_chunks(_holder_chunk, (cfg,), cfg)
    ratios = np.array([r[0] for r in rows])
    est = Estimate(ratios, np.array([r[1] for r in rows]), np.array([r[2] for r in rows]),
                   np.array([r[3] for r in rows]), ["generic"] * len(rows))
    k = int(np.argmax(ratios))
    est.witness = sample_holder_pair(cfg, k)
    est.extra["witness_index"] = k
    est.extra["proximity_excess"] = float(max(r[4] for r in rows))
    est.extra["lipschitz"] = float(np.max(est.d_out / est.d_in))
    if csv_path:
        est.to_csv(csv_path)
    return est


# ---------------------------------------------------------------- reports

@dataclass
class Check:
    name: str
    anchor: str
    samples: int
    max_ratio: Optional[float]
    passed: bool
    witness: Optional[dict] = None
    bound: Optional[float] = None

    def to_dict(self) -> dict:
        def num(v):
            if v is None:
                return None
            v = float(v)
            return v if math.isfinite(v) else repr(v)
        return {"name": self.name, "anchor": self.anchor, "samples": int(self.samples),
                "max_ratio": num(self.max_ratio), "bound": num(self.bound),
                "witness": self.witness, "pass": bool(self.passed)}


def witness_dict(*sets, **named):
    out = {f"set{i}": s.to_dict() for i, s in enumerate(sets)}
    out.update({k: (v.to_dict() if isinstance(v, FSet) else v) for k, v in named.items()})
    return out


@dataclass
class Report:
    suite: str
    anchors: list
    config: dict
    checks: list
    runtime_ms: Optional[float] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "anchors": self.anchors, "config": self.config,
                "checks": [c.to_dict() for c in self.checks], "runtime_ms": self.runtime_ms}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def summary(self) -> str:
        lines = []
        for c in self.checks:
            mr = "" if c.max_ratio is None else f" max={c.max_ratio:.6g}"
            lines.append(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}{mr} (n={c.samples})")
        return "\n".join(lines)


def verify(suite: str, cfg: RunConfig) -> Report:
    """Run a registered property suite and collect its checks."""
    from .suites import SUITES

    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; see `subsetspace verify --list`")
    anchor, fn = SUITES[suite]
    t0 = time.perf_counter()
    checks = fn(cfg)
    runtime = (time.perf_counter() - t0) * 1e3 if cfg.timing else None
    anchors = sorted({anchor} | {c.anchor for c in checks})
    return Report(suite, anchors, cfg.to_dict(), checks, runtime)
