"""First-exit Monte Carlo for the mesh generator.

The solution of ``div(w grad xi) = 0`` with ``xi = f`` on the boundary is
``xi(p) = E[f(X_tau)]`` where ``X`` starts at ``p`` and ``tau`` is its first
exit time. We simulate the unit-diffusion process

    dX = 1/2 * grad(w)/w dt + dW,        <dW_i, dW_i> = dt,

whose generator ``(Laplacian + grad(w)/w . grad) / 2`` is proportional to
the expanded mesh operator, so its exit distribution is exactly the one
needed. (A full-strength drift with unit noise would instead solve the
generator with weight ``w**2``.)

Two time-stepping schemes are available:

* ``linear``: Euler-Maruyama with a fixed step and an optional Brownian
  bridge crossing test, ``P(hit) = exp(-2 d0 d1 / dt)`` per edge.
* ``exponential``: steps drawn from ``Exp(lambda)``. A constant-drift path
  killed at rate ``lambda`` has the free-space transition density
  ``exp(mu . dx) K0(gamma r)`` with ``gamma = sqrt(|mu|^2 + 2 lambda)``, so by
  reflection the probability that it touched an edge, given both endpoints,
  is ``K0(gamma r*) / K0(gamma r)``; ``r = |x1 - x0|`` and ``r*`` is the
  distance from ``x1`` to the mirror image of ``x0`` (``r*^2 = r^2 + 4 d0 d1``).

Random numbers come from a SplitMix64 stream keyed by
``(seed, point id, walk id, restart)``, so every walk is reproducible on its
own and estimates do not depend on scheduling or thread count.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numba
import numpy as np
from numba import njit, prange, types

from .detsolver import BoundaryData
from .domain import RectDomain
from .errors import EvaluationError, ReliabilityWarning
from .monitor import GRAD_FN, MonitorFunction

EDGE_NAMES = ("bottom", "top", "left", "right")
LINEAR, EXPONENTIAL = 0, 1
WALK_BLOCK = 1024
MAX_RESTARTS = 1000

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TO_UNIT = 1.0 / 9007199254740992.0  # 2**-53

_F, _I, _U = types.float64, types.int64, types.uint64

# ---------------------------------------------------------------------------
# Counter-based keyed streams (SplitMix64)
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def _stream_key(seed, point_id, walk_id, restart):
    h = _mix64(seed + _GOLDEN)
    h = _mix64(h ^ (point_id + np.uint64(2) * _GOLDEN))
    h = _mix64(h ^ (walk_id + np.uint64(3) * _GOLDEN))
    return _mix64(h ^ (restart + np.uint64(5) * _GOLDEN))


@njit(cache=True, inline="always")
def _uniform(state):
    state[0] += _GOLDEN
    return (_mix64(state[0]) >> np.uint64(11)) * _TO_UNIT


@njit(cache=True, inline="always")
def _normal_pair(state):
    # Marsaglia polar method
    while True:
        v1 = 2.0 * _uniform(state) - 1.0
        v2 = 2.0 * _uniform(state) - 1.0
        s = v1 * v1 + v2 * v2
        if 0.0 < s < 1.0:
            f = math.sqrt(-2.0 * math.log(s) / s)
            return v1 * f, v2 * f


@njit(cache=True, inline="always")
def _exponential(state, lam):
    return -math.log(1.0 - _uniform(state)) / lam


def _as_u64(v: int) -> np.uint64:
    return np.uint64(int(v) & 0xFFFFFFFFFFFFFFFF)


class WalkStream:
    """Random stream of one walk, keyed by ``(seed, point_id, walk_id, restart)``."""

    def __init__(self, seed: int, point_id: int = 0, walk_id: int = 0, restart: int = 0):
        self.key = (int(seed), int(point_id), int(walk_id), int(restart))
        self.state = np.array(
            [_stream_key(_as_u64(seed), _as_u64(point_id), _as_u64(walk_id), _as_u64(restart))],
            dtype=np.uint64,
        )

    def uniform(self) -> float:
        return _uniform(self.state)

    def normal_pair(self) -> tuple[float, float]:
        return _normal_pair(self.state)

    def exponential(self, lam: float) -> float:
        return _exponential(self.state, lam)


# ---------------------------------------------------------------------------
# Step primitives shared by the Python API and the walk kernel
# ---------------------------------------------------------------------------


@njit(types.UniTuple(_F, 2)(GRAD_FN, _F[::1], _F, _F), cache=True, inline="always")
def _half_drift(grad_fn, params, x, y):
    rho, rx, ry = grad_fn(x, y, params)
    return -0.5 * rx / rho, -0.5 * ry / rho


@njit(cache=True)
def _explicit_exit(x0, y0, x1, y1, xmin, xmax, ymin, ymax):
    """First edge crossed by the segment x0 -> x1, or -1 if x1 is inside."""
    best = 2.0
    edge = -1
    if y1 < ymin:
        s = (y0 - ymin) / (y0 - y1)
        if s < best:
            best, edge = s, 0
    if y1 > ymax:
        s = (ymax - y0) / (y1 - y0)
        if s < best:
            best, edge = s, 1
    if x1 < xmin:
        s = (x0 - xmin) / (x0 - x1)
        if s < best:
            best, edge = s, 2
    if x1 > xmax:
        s = (xmax - x0) / (x1 - x0)
        if s < best:
            best, edge = s, 3
    if edge < 0:
        return -1, x1, y1
    return _point_on_edge(edge, x0 + best * (x1 - x0), y0 + best * (y1 - y0), xmin, xmax, ymin, ymax)


@njit(cache=True, inline="always")
def _point_on_edge(edge, ex, ey, xmin, xmax, ymin, ymax):
    ex = min(max(ex, xmin), xmax)
    ey = min(max(ey, ymin), ymax)
    if edge == 0:
        ey = ymin
    elif edge == 1:
        ey = ymax
    elif edge == 2:
        ex = xmin
    else:
        ex = xmax
    return edge, ex, ey


def bridge_hit_probability(d0: float, d1: float, dt: float) -> float:
    """Probability that a unit-diffusion bridge over ``dt`` touches a line it starts
    ``d0`` from and ends ``d1`` from (same side)."""
    return math.exp(-2.0 * d0 * d1 / dt)


def exponential_hit_probability(d0: float, d1: float, r: float, lam: float, mu2: float = 0.0) -> float:
    """Same for a step of ``Exp(lam)`` duration with ``|drift|^2 = mu2`` and step length ``r``."""
    return _exp_hit(d0, d1, r, math.sqrt(mu2 + 2.0 * lam))


# crossing probabilities below exp(-ARG_CUTOFF) are treated as zero (no draw)
ARG_CUTOFF = 50.0


@njit(cache=True)
def k0e(x):
    """``exp(x) K0(x)`` for ``x > 0`` (polynomial fits, relative error below 2e-7)."""
    if x <= 2.0:
        t = 0.25 * x * x
        u = (x / 3.75) ** 2
        i0 = 1.0 + u * (3.5156229 + u * (3.0899424 + u * (1.2067492 + u * (0.2659732
                                                                          + u * (0.0360768 + u * 0.0045813)))))
        k = (-math.log(0.5 * x) * i0 - 0.57721566
             + t * (0.42278420 + t * (0.23069756 + t * (0.03488590 + t * (0.00262698
                                                                         + t * (0.00010750 + t * 0.0000074))))))
        return k * math.exp(x)
    z = 2.0 / x
    return (1.25331414 + z * (-0.07832358 + z * (0.02189568 + z * (-0.01062446 + z * (0.00587872
            + z * (-0.00251540 + z * 0.00053208)))))) / math.sqrt(x)


@njit(cache=True)
def _exp_hit(d0, d1, r, gamma):
    """Reflection-principle hit probability for the exponential scheme."""
    if r <= 0.0:
        return 0.0
    rs = math.sqrt(r * r + 4.0 * d0 * d1)
    expo = gamma * (rs - r)
    if expo >= ARG_CUTOFF:
        return 0.0
    return min(1.0, k0e(gamma * rs) / k0e(gamma * r) * math.exp(-expo))


@njit(cache=True, inline="always")
def _edge_distances(e, x0, y0, x1, y1, xmin, xmax, ymin, ymax):
    if e == 0:
        return y0 - ymin, y1 - ymin
    if e == 1:
        return ymax - y0, ymax - y1
    if e == 2:
        return x0 - xmin, x1 - xmin
    return xmax - x0, xmax - x1


@njit(cache=True)
def _crossing_test(x0, y0, x1, y1, xmin, xmax, ymin, ymax, scheme, dt, lam, mux, muy, state):
    """Conditional crossing test for a step whose endpoints are both inside.

    Edges are tried nearest first (by min(d0, d1)); at most one fires.
    """
    r = math.sqrt((x1 - x0) ** 2 + (y1 - y0) ** 2)
    gamma = math.sqrt(mux * mux + muy * muy + 2.0 * lam)
    used = 0
    for _ in range(4):
        best = -1
        best_key = np.inf
        for e in range(4):
            if used & (1 << e):
                continue
            d0, d1 = _edge_distances(e, x0, y0, x1, y1, xmin, xmax, ymin, ymax)
            key = min(d0, d1)
            if key < best_key:
                best_key, best = key, e
        used |= 1 << best
        d0, d1 = _edge_distances(best, x0, y0, x1, y1, xmin, xmax, ymin, ymax)
        if scheme == LINEAR:
            arg = 2.0 * d0 * d1 / dt
            p = math.exp(-arg) if arg < ARG_CUTOFF else 0.0
        else:
            p = _exp_hit(d0, d1, r, gamma)
        if p > 0.0:
            if _uniform(state) < p:
                s = d0 / (d0 + d1)
                return _point_on_edge(best, x0 + s * (x1 - x0), y0 + s * (y1 - y0), xmin, xmax, ymin, ymax)
    return -1, x1, y1


@njit(cache=True, inline="always")
def _edge_value(table, lo, h, s):
    n = table.size
    t = (s - lo) / h
    i = int(t)
    if i < 0:
        i = 0
    if i > n - 2:
        i = n - 2
    t -= i
    if t < 0.0:
        t = 0.0
    if t > 1.0:
        t = 1.0
    return (1.0 - t) * table[i] + t * table[i + 1]


@njit(types.Tuple((_I, _F, _F, _I))(GRAD_FN, _F[::1], _F, _F, _F[::1], _I, _F, types.boolean, _I, _U[::1]),
      cache=True)
def _walk_once(grad_fn, params, x, y, box, scheme, step, bridge, max_steps, state):
    """One walk from (x, y); returns (edge, ex, ey, steps), edge -1 if max_steps hit."""
    xmin, xmax, ymin, ymax = box[0], box[1], box[2], box[3]
    for n in range(max_steps):
        mux, muy = _half_drift(grad_fn, params, x, y)
        if scheme == LINEAR:
            dt = step
        else:
            dt = _exponential(state, step)
        z1, z2 = _normal_pair(state)
        sq = math.sqrt(dt)
        x1 = x + mux * dt + sq * z1
        y1 = y + muy * dt + sq * z2
        edge, ex, ey = _explicit_exit(x, y, x1, y1, xmin, xmax, ymin, ymax)
        if edge < 0 and (bridge or scheme == EXPONENTIAL):
            edge, ex, ey = _crossing_test(x, y, x1, y1, xmin, xmax, ymin, ymax,
                                          scheme, dt, step, mux, muy, state)
        if edge >= 0:
            return edge, ex, ey, n + 1
        x, y = x1, y1
    return -1, x, y, max_steps


@njit(types.void(GRAD_FN, _F[::1], _F[::1], _F[::1], _U[::1], _I[::1], _I[::1], _I[::1],
                 _U, _F[::1], _I, _F, types.boolean, _I,
                 _F[:, ::1], _F[:, ::1], _F[:, ::1], _F[:, ::1], _F, _F,
                 _F[:, ::1], _I[:, ::1], _I[::1], _I[::1], _I[::1]),
      cache=True, parallel=True)
def _walk_tasks(grad_fn, params, px, py, pid, task_point, task_w0, task_w1,
                seed, box, scheme, step, bridge, max_steps,
                xi_bt, xi_lr, eta_bt, eta_lr, hx, hy,
                sums, edge_counts, restarts, steps_total, failed):
    xmin, ymin = box[0], box[2]
    for t in prange(task_point.size):
        p = task_point[t]
        state = np.empty(1, dtype=np.uint64)
        sf = sf2 = sg = sg2 = 0.0
        for w in range(task_w0[t], task_w1[t]):
            r = 0
            edge, ex, ey = -1, 0.0, 0.0
            while r <= MAX_RESTARTS:
                state[0] = _stream_key(seed, pid[p], np.uint64(w), np.uint64(r))
                edge, ex, ey, n = _walk_once(grad_fn, params, px[p], py[p], box,
                                             scheme, step, bridge, max_steps, state)
                steps_total[t] += n
                if edge >= 0:
                    break
                r += 1
            if edge < 0:
                failed[t] += 1
                restarts[t] += MAX_RESTARTS
                continue
            restarts[t] += r
            edge_counts[t, edge] += 1
            if edge < 2:
                f = _edge_value(xi_bt[edge], xmin, hx, ex)
                g = _edge_value(eta_bt[edge], xmin, hx, ex)
            else:
                f = _edge_value(xi_lr[edge - 2], ymin, hy, ey)
                g = _edge_value(eta_lr[edge - 2], ymin, hy, ey)
            sf += f
            sf2 += f * f
            sg += g
            sg2 += g * g
        sums[t, 0] = sf
        sums[t, 1] = sf2
        sums[t, 2] = sg
        sums[t, 3] = sg2


# ---------------------------------------------------------------------------
# Public types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WalkConfig:
    """Monte Carlo parameters.

    ``scheme`` is ``"linear"`` (``step`` = dt) or ``"exponential"``
    (``step`` = lambda, mean step 1/lambda).
    """

    scheme: str = "exponential"
    step: float = 1000.0
    walks: int = 1000
    seed: int = 0
    max_steps: int = 10_000_000
    bridge: bool = True

    def __post_init__(self):
        if self.scheme not in ("linear", "exponential"):
            raise ValueError(f"unknown scheme '{self.scheme}'")
        if not self.step > 0:
            raise ValueError("dt / lambda must be positive")
        if self.walks < 1 or self.max_steps < 1:
            raise ValueError("walks and max_steps must be >= 1")

    @classmethod
    def linear(cls, dt: float, walks: int, seed: int = 0, bridge: bool = True, **kw) -> "WalkConfig":
        return cls("linear", dt, walks, seed, bridge=bridge, **kw)

    @classmethod
    def exponential(cls, lam: float, walks: int, seed: int = 0, **kw) -> "WalkConfig":
        return cls("exponential", lam, walks, seed, **kw)

    @property
    def scheme_code(self) -> int:
        return LINEAR if self.scheme == "linear" else EXPONENTIAL


@dataclass(frozen=True)
class ExitSample:
    exit_point: tuple[float, float]
    exit_edge: str
    steps_taken: int = 1


@dataclass(eq=False)
class MCEstimates:
    """Estimates at a batch of points (arrays of length n_points)."""

    xi: np.ndarray
    eta: np.ndarray
    stderr_xi: np.ndarray
    stderr_eta: np.ndarray
    edge_counts: np.ndarray  # (n_points, 4) in EDGE_NAMES order
    restarts: np.ndarray
    mean_steps: np.ndarray
    walks: int
    warnings: list = field(default_factory=list)

    def __getitem__(self, k) -> "MCEstimate":
        return MCEstimate(float(self.xi[k]), float(self.eta[k]), float(self.stderr_xi[k]),
                          float(self.stderr_eta[k]), self.edge_counts[k].copy(),
                          int(self.restarts[k]), float(self.mean_steps[k]), self.walks)


@dataclass(eq=False)
class MCEstimate:
    xi: float
    eta: float
    stderr_xi: float
    stderr_eta: float
    edge_counts: np.ndarray
    restarts: int
    mean_steps: float
    walks: int

    @property
    def restart_fraction(self) -> float:
        return self.restarts / self.walks

    def edge_frequencies(self) -> dict:
        return {name: c / self.walks for name, c in zip(EDGE_NAMES, self.edge_counts)}

    def __iter__(self):
        return iter((self.xi, self.eta, self.stderr_xi, self.stderr_eta))


# ---------------------------------------------------------------------------
# Python-level step operations (thin wrappers over the kernel primitives)
# ---------------------------------------------------------------------------


def _box(domain: RectDomain) -> np.ndarray:
    return np.array([domain.xmin, domain.xmax, domain.ymin, domain.ymax])


def step_linear(x, monitor: MonitorFunction, dt: float, stream: WalkStream | None = None, z=None):
    """One Euler-Maruyama step ``x + mu dt + sqrt(dt) z`` with ``mu = grad(w)/(2w)``.

    ``z`` forces the normal pair; otherwise it is drawn from ``stream``.
    """
    mux, muy = _half_drift(monitor.grad_kernel, monitor.param_array, float(x[0]), float(x[1]))
    z1, z2 = stream.normal_pair() if z is None else z
    sq = math.sqrt(dt)
    return (x[0] + mux * dt + sq * z1, x[1] + muy * dt + sq * z2)


def bridge_exit_test(x0, x1, dt: float, domain: RectDomain, stream: WalkStream) -> ExitSample | None:
    """Explicit exit or Brownian-bridge crossing for the step ``x0 -> x1``."""
    d = domain
    edge, ex, ey = _explicit_exit(x0[0], x0[1], x1[0], x1[1], d.xmin, d.xmax, d.ymin, d.ymax)
    if edge < 0:
        edge, ex, ey = _crossing_test(x0[0], x0[1], x1[0], x1[1], d.xmin, d.xmax, d.ymin, d.ymax,
                                      LINEAR, dt, 0.0, 0.0, 0.0, stream.state)
    if edge < 0:
        return None
    return ExitSample((ex, ey), EDGE_NAMES[edge])


def step_exponential(x, monitor: MonitorFunction, lam: float, domain: RectDomain,
                     stream: WalkStream):
    """One exponential time step; returns ``(new_point, exit_sample_or_None, dt)``."""
    d = domain
    mux, muy = _half_drift(monitor.grad_kernel, monitor.param_array, float(x[0]), float(x[1]))
    dt = stream.exponential(lam)
    z1, z2 = stream.normal_pair()
    sq = math.sqrt(dt)
    x1 = (x[0] + mux * dt + sq * z1, x[1] + muy * dt + sq * z2)
    edge, ex, ey = _explicit_exit(x[0], x[1], x1[0], x1[1], d.xmin, d.xmax, d.ymin, d.ymax)
    if edge < 0:
        edge, ex, ey = _crossing_test(x[0], x[1], x1[0], x1[1], d.xmin, d.xmax, d.ymin, d.ymax,
                                      EXPONENTIAL, dt, lam, mux, muy, stream.state)
    sample = None if edge < 0 else ExitSample((ex, ey), EDGE_NAMES[edge])
    return x1, sample, dt


def walk_to_exit(x, monitor: MonitorFunction, domain: RectDomain, cfg: WalkConfig,
                 point_id: int = 0, walk_id: int = 0, restart: int = 0) -> ExitSample | None:
    """Run a single keyed walk; ``None`` if it did not exit within ``cfg.max_steps``."""
    stream = WalkStream(cfg.seed, point_id, walk_id, restart)
    edge, ex, ey, n = _walk_once(monitor.grad_kernel, monitor.param_array, float(x[0]), float(x[1]),
                                 _box(domain), cfg.scheme_code, float(cfg.step), cfg.bridge,
                                 cfg.max_steps, stream.state)
    return None if edge < 0 else ExitSample((ex, ey), EDGE_NAMES[edge], n)


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------


def set_threads(threads: int | None) -> int:
    """Set the numba worker count (clamped to the configured maximum); returns it."""
    if threads is None:
        return numba.get_num_threads()
    n = max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)
    return n


def mc_estimate_points(points, monitor: MonitorFunction, bd: BoundaryData, cfg: WalkConfig,
                       point_ids=None) -> MCEstimates:
    """Monte Carlo estimates of (xi, eta) at many interior points.

    Every walk's exit point is scored under both the xi and the eta boundary
    data. Walks are grouped in fixed blocks of ``WALK_BLOCK`` and reduced in
    block order, so results are bit-identical for any thread count.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n_pts = pts.shape[0]
    if point_ids is None:
        point_ids = np.arange(n_pts)
    pid = np.array([_as_u64(v) for v in np.atleast_1d(point_ids)], dtype=np.uint64)
    domain = bd.grid.domain
    inside = (pts[:, 0] > domain.xmin) & (pts[:, 0] < domain.xmax) & \
             (pts[:, 1] > domain.ymin) & (pts[:, 1] < domain.ymax)
    if not np.all(inside):
        k = int(np.argmin(inside))
        raise ValueError(f"point ({pts[k, 0]:.6g}, {pts[k, 1]:.6g}) is not strictly inside {domain}")

    N = int(cfg.walks)
    n_blocks = -(-N // WALK_BLOCK)
    task_point = np.repeat(np.arange(n_pts), n_blocks)
    starts = np.tile(np.arange(n_blocks) * WALK_BLOCK, n_pts)
    task_w0 = starts.astype(np.int64)
    task_w1 = np.minimum(starts + WALK_BLOCK, N).astype(np.int64)
    n_tasks = task_point.size

    sums = np.zeros((n_tasks, 4))
    edge_counts = np.zeros((n_tasks, 4), dtype=np.int64)
    restarts = np.zeros(n_tasks, dtype=np.int64)
    steps_total = np.zeros(n_tasks, dtype=np.int64)
    failed = np.zeros(n_tasks, dtype=np.int64)
    xi_bt = np.ascontiguousarray(np.vstack([bd.xi["bottom"], bd.xi["top"]]))
    xi_lr = np.ascontiguousarray(np.vstack([bd.xi["left"], bd.xi["right"]]))
    eta_bt = np.ascontiguousarray(np.vstack([bd.eta["bottom"], bd.eta["top"]]))
    eta_lr = np.ascontiguousarray(np.vstack([bd.eta["left"], bd.eta["right"]]))
    _walk_tasks(monitor.grad_kernel, monitor.param_array,
                np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1]), pid,
                task_point, task_w0, task_w1, _as_u64(cfg.seed), _box(domain),
                cfg.scheme_code, float(cfg.step), bool(cfg.bridge), int(cfg.max_steps),
                xi_bt, xi_lr, eta_bt, eta_lr, bd.grid.hx, bd.grid.hy,
                sums, edge_counts, restarts, steps_total, failed)
    if failed.any():
        t = int(np.argmax(failed))
        raise EvaluationError(
            f"walks from ({pts[task_point[t], 0]:.6g}, {pts[task_point[t], 1]:.6g}) did not exit within {cfg.max_steps} steps "
            f"after {MAX_RESTARTS} restarts"
        )

    sums = sums.reshape(n_pts, n_blocks, 4).sum(axis=1)
    mean_f, mean_g = sums[:, 0] / N, sums[:, 2] / N
    if N > 1:
        var_f = np.maximum(sums[:, 1] - N * mean_f**2, 0.0) / (N - 1)
        var_g = np.maximum(sums[:, 3] - N * mean_g**2, 0.0) / (N - 1)
    else:
        var_f = var_g = np.zeros(n_pts)
    restarts = restarts.reshape(n_pts, n_blocks).sum(axis=1)
    notes = []
    frac = restarts / N
    if np.any(frac > 0.01):
        k = int(np.argmax(frac))
        msg = (f"{frac[k]:.2%} of walks from ({pts[k, 0]:.6g}, {pts[k, 1]:.6g}) hit max_steps={cfg.max_steps} "
               f"and were restarted")
        notes.append(msg)
        warnings.warn(msg, ReliabilityWarning, stacklevel=2)
    return MCEstimates(
        xi=mean_f, eta=mean_g,
        stderr_xi=np.sqrt(var_f / N), stderr_eta=np.sqrt(var_g / N),
        edge_counts=edge_counts.reshape(n_pts, n_blocks, 4).sum(axis=1),
        restarts=restarts,
        mean_steps=steps_total.reshape(n_pts, n_blocks).sum(axis=1) / N,
        walks=N, warnings=notes,
    )


def mc_estimate(p, monitor: MonitorFunction, bd: BoundaryData, cfg: WalkConfig,
                point_id: int = 0) -> MCEstimate:
    """Estimate ``(xi, eta)`` at one interior point; unpacks as
    ``xi, eta, stderr_xi, stderr_eta``."""
    return mc_estimate_points([p], monitor, bd, cfg, [point_id])[0]
