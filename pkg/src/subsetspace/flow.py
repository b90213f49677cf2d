"""Collision flow du_i/dt = -J_i(u), J_i(u) = sum_{j != i} (u_i - u_j) / ||u_i - u_j||.

Every point is pulled toward the others with unit-speed contributions, so
the minimum separation decays at rate at least 2 and two points meet by
time delta(x)/2. Stopping at the first collision and merging the colliding
points gives a Hölder retraction X(n) -> X(n-1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import connected_components

from . import kernels
from .errors import DomainError, NonConvergenceError
from .fset import FSet, _check_same, diam, hausdorff, min_sep, proximal_bijection
from .norms import NormSpec


@dataclass(frozen=True)
class FlowConfig:
    """Integrator controls.

    Attributes
    ----------
    eps_coll : float
        Stop once the minimum separation is at most this.
    step_safety : float
        theta in h = theta * delta(u) / (4 (n - 1)).
    max_steps : int
        Hard cap on RK4 steps.
    merge_factor : float
        Points within merge_factor * eps_coll (single linkage) are merged.
    """

    eps_coll: float = 1e-8
    step_safety: float = 0.1
    max_steps: int = 1_000_000
    merge_factor: float = 4.0

    def __post_init__(self):
        if not self.eps_coll > 0:
            raise ValueError("eps_coll must be positive")
        if not 0.0 < self.step_safety < 1.0:
            raise ValueError("step_safety must lie in (0, 1)")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")
        if self.merge_factor < 1.0:
            raise ValueError("merge_factor must be >= 1")

    @property
    def time_tol(self) -> float:
        return max(1e-6, 10.0 * self.eps_coll)


DEFAULT = FlowConfig()


@dataclass
class FlowResult:
    """Outcome of one integration.

    ``terminal`` keeps the labels of the input (row i started at
    ``x.points[i]``); ``retract`` is the merged terminal set in X(n-1).
    """

    T: float
    terminal: np.ndarray
    retract: FSet
    diagnostics: dict = field(default_factory=dict)


def flow_field(u, spec: NormSpec) -> np.ndarray:
    u = np.atleast_2d(np.asarray(u, dtype=np.float64))
    if u.shape[1] != spec.dim:
        raise ValueError("configuration does not match the norm dimension")
    try:
        return kernels.flow_field(u, spec.p)
    except ValueError as exc:
        raise DomainError(str(exc)) from None


def collision_time_bounds(x: FSet):
    """(delta/(2(n-1)), delta/2) for x with full cardinality n."""
    if len(x) < x.n or x.n < 2:
        raise DomainError("collision time needs |x| = n >= 2")
    d = min_sep(x)
    return d / (2.0 * (x.n - 1)), d / 2.0


def merge_clusters(u, radius: float, spec: NormSpec, n=None) -> FSet:
    """Collapse single-linkage clusters at ``radius`` to their means."""
    u = np.atleast_2d(np.asarray(u, dtype=np.float64))
    D = kernels.pairwise(u, spec.p)
    ncomp, lab = connected_components(D <= radius, directed=False)
    pts = np.array([u[lab == c].mean(axis=0) for c in range(ncomp)])
    return FSet._raw(pts, len(u) if n is None else n, spec)


def _run(U0, spec, cfg, t_end=np.inf, record=False):
    return kernels.integrate(np.ascontiguousarray(U0, dtype=np.float64), spec.p,
                             cfg.eps_coll, cfg.step_safety, cfg.max_steps, t_end, record)


def _diag(steps, status, max_speed, trace, member=0):
    d = {"steps": int(steps), "status": int(status), "max_speed": float(max_speed)}
    if trace is not None:
        times, states, seps = trace
        d["times"] = np.asarray(times)
        d["min_sep"] = np.asarray([s[member] for s in seps])
        d["states"] = np.asarray([s[member] for s in states])
    return d


def integrate_to_collision(x: FSet, cfg: FlowConfig = DEFAULT, record: bool = False) -> FlowResult:
    """Integrate from x until the minimum separation reaches ``eps_coll``.

    RK4 with h = theta * delta(u) / (4 (n - 1)); since delta decays at rate
    at least 2 the stop time is within eps_coll / 2 of the collision time.
    """
    n = x.n
    if len(x) != n or n < 2:
        raise DomainError("the flow needs |x| = n >= 2 distinct points")
    t, U, steps, status, max_speed, trace = _run(x.points[None], x.spec, cfg, record=record)
    diag = _diag(steps, status, max_speed, trace)
    if status != kernels.COLLIDED:
        raise NonConvergenceError(f"no collision after {steps} steps (t={t:.6g})", diag)
    term = U[0]
    retract = merge_clusters(term, cfg.merge_factor * cfg.eps_coll, x.spec, n - 1)
    return FlowResult(float(t), term, retract, diag)


def flow_until(x: FSet, tau: float, cfg: FlowConfig = DEFAULT) -> FSet:
    """u(tau) as an element of X(n); tau must precede the collision."""
    t, U, steps, status, _, _ = _run(x.points[None], x.spec, cfg, t_end=float(tau))
    if status == kernels.COLLIDED:
        raise DomainError(f"collision at t={t:.6g} before tau={tau:.6g}")
    if status == kernels.MAXSTEPS:
        raise NonConvergenceError(f"tau not reached after {steps} steps")
    return FSet._raw(U[0], x.n, x.spec)


def holder_retraction(x: FSet, cfg: FlowConfig = DEFAULT) -> FSet:
    """r(x) = u(T(x)) with colliding points merged; identity on X(n-1)."""
    if len(x) < x.n:
        return x.with_n(x.n - 1)
    return integrate_to_collision(x, cfg).retract


def holder_bound(x: FSet, y: FSet) -> float:
    """n (2n - 1) diam(x + y)^(1 - 1/(2n-1)) d_H(x, y)^(1/(2n-1))."""
    _check_same(x, y)
    if x.n != y.n:
        raise ValueError("holder_bound needs a common ambient n")
    n = x.n
    e = 1.0 / (2 * n - 1)
    dh = hausdorff(x, y)
    if dh == 0.0:
        return 0.0
    D = diam(x.union(y))
    return n * (2 * n - 1) * D ** (1.0 - e) * dh ** e


def holder_constant(x: FSet, y: FSet) -> float:
    """C_n(x, y) = (2n - 1) diam(x + y)^(1 - 1/(2n-1))."""
    n = x.n
    return (2 * n - 1) * diam(x.union(y)) ** (1.0 - 1.0 / (2 * n - 1))


def integrate_pair(x: FSet, y: FSet, cfg: FlowConfig = DEFAULT):
    """Flow x and y side by side with common steps until either collides.

    Points are paired by the proximal bijection when one exists, otherwise
    in stored order. Returns a dict with ``times``, ``g`` (sum of paired
    distances) and the stop time ``T``.
    """
    _check_same(x, y)
    if len(x) != x.n or len(y) != y.n or x.n != y.n:
        raise DomainError("paired flows need two full-cardinality sets of X(n)")
    pairs = proximal_bijection(x, y)
    order = np.arange(len(y)) if pairs is None else np.array([j for _, j in pairs])
    U0 = np.stack([x.points, y.points[order]])
    t, U, steps, status, _, trace = _run(U0, x.spec, cfg, record=True)
    times, states, _ = trace
    S = np.asarray(states)
    g = np.linalg.norm(S[:, 0] - S[:, 1], ord=x.p, axis=2).sum(axis=1)
    return {"times": np.asarray(times), "g": g, "T": float(t), "steps": int(steps),
            "status": int(status), "paired": pairs is not None}
