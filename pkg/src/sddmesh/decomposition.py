"""Non-iterative stochastic domain decomposition.

The grid is split into blocks that share full-length interface lines. Mesh
coordinates on those lines are estimated by Monte Carlo at a chosen subset of
nodes and interpolated linearly in between; then every block is solved once,
deterministically, with the interface values as Dirichlet data.
"""
from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .detsolver import (BoundaryData, SolverConfig, assemble_boundary, build_boundary_data,
                        solve_dirichlet)
from .domain import GridSpec, MeshSolution, RectDomain, ScalarField
from .errors import ConvergenceWarning, LayoutError
from .monitor import MonitorFunction
from .sde import WalkConfig, mc_estimate_points
from .smoothing import smooth_interface

MIN_SEP = 2


@dataclass(frozen=True)
class Subdomain:
    a: int
    b: int
    i0: int
    i1: int
    j0: int
    j1: int
    grid: GridSpec

    @property
    def index_slice(self) -> tuple[slice, slice]:
        """``[j, i]`` slice of the block in global nodal arrays."""
        return slice(self.j0, self.j1 + 1), slice(self.i0, self.i1 + 1)


@dataclass(frozen=True)
class InterfaceLine:
    """A full-length grid line shared by neighbouring blocks.

    ``vertical`` lines sit at global column ``index`` and run over all rows;
    horizontal lines sit at row ``index``. ``coord`` is the fixed physical
    coordinate and ``s`` the coordinate along the line.
    """

    orientation: str
    index: int
    coord: float
    s: np.ndarray = field(repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.s.size

    def global_nodes(self, grid: GridSpec) -> np.ndarray:
        """Flat global node ids (``j * nx + i``) along the line."""
        k = np.arange(self.n)
        if self.orientation == "vertical":
            return k * grid.nx + self.index
        return self.index * grid.nx + k

    def points(self) -> np.ndarray:
        if self.orientation == "vertical":
            return np.column_stack([np.full(self.n, self.coord), self.s])
        return np.column_stack([self.s, np.full(self.n, self.coord)])


@dataclass(frozen=True, eq=False)
class SubdomainLayout:
    grid: GridSpec
    n_sub_x: int
    n_sub_y: int
    x_breaks: tuple
    y_breaks: tuple
    subdomains: tuple
    lines: tuple

    def junctions(self, line: InterfaceLine) -> list[int]:
        """Along-line indices where ``line`` crosses a perpendicular interface."""
        other = self.y_breaks[1:-1] if line.orientation == "vertical" else self.x_breaks[1:-1]
        return list(other)

    def line_at(self, orientation: str, index: int) -> InterfaceLine:
        for line in self.lines:
            if line.orientation == orientation and line.index == index:
                return line
        raise KeyError((orientation, index))


def build_layout(domain: RectDomain | None, grid: GridSpec, n_sub_x: int, n_sub_y: int) -> SubdomainLayout:
    """Partition ``grid`` into ``n_sub_x`` by ``n_sub_y`` blocks sharing interface lines."""
    domain = domain or grid.domain
    if domain != grid.domain:
        raise LayoutError(f"grid covers {grid.domain}, not {domain}")
    if n_sub_x < 1 or n_sub_y < 1:
        raise LayoutError("subdomain counts must be >= 1")
    for axis, n, k in (("x", grid.nx, n_sub_x), ("y", grid.ny, n_sub_y)):
        if (n - 1) % k:
            raise LayoutError(f"{axis}: {n - 1} cells are not divisible into {k} subdomains")
        if (n - 1) // k < 2:
            raise LayoutError(f"{axis}: subdomains need at least 2 cells, got {(n - 1) // k}")
    sx, sy = (grid.nx - 1) // n_sub_x, (grid.ny - 1) // n_sub_y
    xb = tuple(a * sx for a in range(n_sub_x + 1))
    yb = tuple(b * sy for b in range(n_sub_y + 1))
    gx, gy = grid.x, grid.y

    def edge_x(i):
        return domain.xmin if i == 0 else domain.xmax if i == grid.nx - 1 else float(gx[i])

    def edge_y(j):
        return domain.ymin if j == 0 else domain.ymax if j == grid.ny - 1 else float(gy[j])

    subs = []
    for b in range(n_sub_y):
        for a in range(n_sub_x):
            i0, i1, j0, j1 = xb[a], xb[a + 1], yb[b], yb[b + 1]
            if n_sub_x == 1 and n_sub_y == 1:
                g = grid
            else:
                g = GridSpec(i1 - i0 + 1, j1 - j0 + 1, RectDomain(edge_x(i0), edge_x(i1), edge_y(j0), edge_y(j1)))
            subs.append(Subdomain(a, b, i0, i1, j0, j1, g))
    lines = [InterfaceLine("vertical", i, float(gx[i]), gy.copy()) for i in xb[1:-1]]
    lines += [InterfaceLine("horizontal", j, float(gy[j]), gx.copy()) for j in yb[1:-1]]
    return SubdomainLayout(grid, n_sub_x, n_sub_y, xb, yb, tuple(subs), tuple(lines))


# ---------------------------------------------------------------------------
# Interface point planning
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class InterfacePlan:
    """Monte Carlo node indices (along each line) for every interface line.

    Line endpoints are never in the MC set: they lie on the physical boundary
    and act as interpolation anchors. Crossings with other interface lines are
    always MC nodes so both lines see the same value there.
    """

    strategy: str
    layout: SubdomainLayout
    mc_nodes: tuple  # one sorted int array per layout line
    k: int | None = None

    def count(self) -> int:
        return sum(len(n) for n in self.mc_nodes)


def equispaced_indices(n: int, k: int) -> np.ndarray:
    """``k`` interior indices of an ``n``-node line, ``floor(j (n-1)/(k+1) + 1/2)``."""
    if k < 1 or k > n - 2:
        raise ValueError(f"equispaced needs 1 <= k <= {n - 2}, got {k}")
    j = np.arange(1, k + 1)
    return np.unique(np.floor(j * (n - 1) / (k + 1) + 0.5).astype(int))


def strict_extrema(v: np.ndarray) -> np.ndarray:
    """Interior indices where ``v`` has a strict discrete local maximum or minimum."""
    v = np.asarray(v)
    c, left, right = v[1:-1], v[:-2], v[2:]
    hit = ((c > left) & (c > right)) | ((c < left) & (c < right))
    return np.nonzero(hit)[0] + 1


def dedupe(idx, min_sep: int = MIN_SEP) -> np.ndarray:
    """Drop indices closer than ``min_sep`` to the previous kept one."""
    kept = []
    for i in sorted(set(int(v) for v in idx)):
        if not kept or i - kept[-1] >= min_sep:
            kept.append(i)
    return np.array(kept, dtype=int)


def optimal_indices(monitor: MonitorFunction, line: InterfaceLine, min_sep: int = MIN_SEP) -> np.ndarray:
    """Extrema of the first and second derivative of rho along ``line``."""
    pts = line.points()
    gx, gy = monitor.gradient(pts[:, 0], pts[:, 1])
    hxx, hyy = monitor.second_derivatives(pts[:, 0], pts[:, 1])
    d1, d2 = (gy, hyy) if line.orientation == "vertical" else (gx, hxx)
    idx = np.concatenate([strict_extrema(d1), strict_extrema(d2)])
    return dedupe(idx, min_sep)


def plan_interface_points(strategy: str, monitor: MonitorFunction, layout: SubdomainLayout,
                          k: int | None = None, min_sep: int = MIN_SEP) -> InterfacePlan:
    """Choose Monte Carlo nodes per line for ``all``, ``equispaced`` (needs ``k``) or ``optimal``."""
    if strategy == "equispaced" and k is None:
        raise ValueError("equispaced placement needs k")
    nodes = []
    for line in layout.lines:
        n = line.n
        junctions = layout.junctions(line)
        if strategy == "all":
            idx = np.arange(1, n - 1)
        elif strategy == "equispaced":
            idx = equispaced_indices(n, k)
        elif strategy == "optimal":
            idx = optimal_indices(monitor, line, min_sep)
        else:
            raise ValueError(f"unknown placement strategy '{strategy}'")
        idx = [i for i in idx if 0 < i < n - 1]
        idx = sorted(set(idx) | set(junctions))
        if not idx:
            idx = [(n - 1) // 2]
        nodes.append(np.array(idx, dtype=int))
    return InterfacePlan(strategy, layout, tuple(nodes), k)


# ---------------------------------------------------------------------------
# Interface solves and the decomposed mesh solve
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class InterfaceValues:
    """Full xi/eta tables along every layout line (same order as ``layout.lines``)."""

    xi: list
    eta: list
    stderr_xi: list  # NaN away from MC nodes
    stderr_eta: list
    restarts: int = 0
    mc_points: int = 0
    warnings: list = field(default_factory=list)


def _anchor_values(bd: BoundaryData, line: InterfaceLine):
    """(xi, eta) at the two ends of ``line`` from the physical boundary data."""
    i = line.index
    if line.orientation == "vertical":
        return (bd.xi["bottom"][i], bd.xi["top"][i]), (bd.eta["bottom"][i], bd.eta["top"][i])
    return (bd.xi["left"][i], bd.xi["right"][i]), (bd.eta["left"][i], bd.eta["right"][i])


def solve_interfaces(plan: InterfacePlan, monitor: MonitorFunction, bd: BoundaryData,
                     cfg: WalkConfig, span: int | None = None) -> InterfaceValues:
    """Estimate planned nodes by Monte Carlo and fill each line by linear interpolation.

    Nodes shared by two lines are estimated once (walks are keyed by global
    node id). ``span`` optionally applies :func:`smooth_interface` to each
    line, with the ends and line crossings held fixed.
    """
    layout = plan.layout
    grid = layout.grid
    gids = [line.global_nodes(grid)[idx] for line, idx in zip(layout.lines, plan.mc_nodes)]
    unique = np.unique(np.concatenate(gids)) if gids else np.empty(0, dtype=int)
    out = InterfaceValues([], [], [], [])
    if unique.size:
        X, Y = grid.meshgrid()
        pts = np.column_stack([X.ravel()[unique], Y.ravel()[unique]])
        est = mc_estimate_points(pts, monitor, bd, cfg, point_ids=unique)
        out.restarts = int(est.restarts.sum())
        out.mc_points = int(unique.size)
        out.warnings.extend(est.warnings)
        lookup = {int(g): k for k, g in enumerate(unique)}
    for line, idx, g in zip(layout.lines, plan.mc_nodes, gids):
        (xa, xb), (ea, eb) = _anchor_values(bd, line)
        known = np.concatenate(([0], idx, [line.n - 1]))
        rows = [lookup[int(v)] for v in g]
        kx = np.concatenate(([xa], est.xi[rows], [xb]))
        ke = np.concatenate(([ea], est.eta[rows], [eb]))
        xi_line = np.interp(line.s, line.s[known], kx)
        eta_line = np.interp(line.s, line.s[known], ke)
        # keep the exact estimates at known nodes (interp may round)
        xi_line[known], eta_line[known] = kx, ke
        if span is not None:
            anchors = [0, line.n - 1] + layout.junctions(line)
            xi_line = smooth_interface(xi_line, span, anchors=anchors, s=line.s)
            eta_line = smooth_interface(eta_line, span, anchors=anchors, s=line.s)
        sx = np.full(line.n, np.nan)
        se = np.full(line.n, np.nan)
        sx[idx], se[idx] = est.stderr_xi[rows], est.stderr_eta[rows]
        out.xi.append(xi_line)
        out.eta.append(eta_line)
        out.stderr_xi.append(sx)
        out.stderr_eta.append(se)
    return out


@dataclass(eq=False)
class SDDResult:
    solution: MeshSolution
    layout: SubdomainLayout
    plan: InterfacePlan
    interfaces: InterfaceValues
    t_stoc: float
    t_sub: float
    subdomain_solves: int
    mc_points: int
    warnings: list = field(default_factory=list)

    @property
    def t_total(self) -> float:
        return self.t_stoc + self.t_sub


def _block_boundary(sub: Subdomain, layout: SubdomainLayout, bd: BoundaryData,
                    iv: InterfaceValues, which: str) -> dict:
    tables = bd.xi if which == "xi" else bd.eta
    vals = iv.xi if which == "xi" else iv.eta
    grid = layout.grid

    def line_values(orientation, index):
        for line, v in zip(layout.lines, vals):
            if line.orientation == orientation and line.index == index:
                return v
        raise KeyError((orientation, index))

    xs, ys = slice(sub.i0, sub.i1 + 1), slice(sub.j0, sub.j1 + 1)
    return {
        "bottom": tables["bottom"][xs] if sub.j0 == 0 else line_values("horizontal", sub.j0)[xs],
        "top": tables["top"][xs] if sub.j1 == grid.ny - 1 else line_values("horizontal", sub.j1)[xs],
        "left": tables["left"][ys] if sub.i0 == 0 else line_values("vertical", sub.i0)[ys],
        "right": tables["right"][ys] if sub.i1 == grid.nx - 1 else line_values("vertical", sub.i1)[ys],
    }


def solve_sdd(monitor: MonitorFunction, grid: GridSpec, layout: SubdomainLayout, plan: InterfacePlan,
              walk_cfg: WalkConfig, solver_cfg: SolverConfig | None = None,
              interface_span: int | None = None) -> SDDResult:
    """Stochastic interface solve followed by one deterministic solve per block."""
    if layout.grid != grid:
        raise LayoutError("layout was built for a different grid")
    bd = build_boundary_data(monitor, grid)
    X, Y = grid.meshgrid()
    w = 1.0 / monitor.rho(X, Y)

    if layout.lines:
        t0 = time.perf_counter()
        iv = solve_interfaces(plan, monitor, bd, walk_cfg, span=interface_span)
        t_stoc = time.perf_counter() - t0
    else:
        iv = InterfaceValues([], [], [], [])
        t_stoc = 0.0

    notes = list(iv.warnings)
    xi = np.empty(grid.shape)
    eta = np.empty(grid.shape)
    solves = 0
    t0 = time.perf_counter()
    for sub in layout.subdomains:
        sl = sub.index_slice
        wb = np.ascontiguousarray(w[sl])
        for which, target in (("xi", xi), ("eta", eta)):
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", ConvergenceWarning)
                res = solve_dirichlet(monitor, sub.grid, _block_boundary(sub, layout, bd, iv, which),
                                      solver_cfg, weight=wb)
            for c in caught:
                msg = f"subdomain ({sub.a},{sub.b}) {which}: {c.message}"
                notes.append(msg)
                warnings.warn(msg, ConvergenceWarning, stacklevel=2)
            target[sl] = res.field.values
        solves += 1
    t_sub = time.perf_counter() - t0

    sol = MeshSolution(ScalarField(grid, xi), ScalarField(grid, eta))
    return SDDResult(sol, layout, plan, iv, t_stoc, t_sub, solves, iv.mc_points, notes)


@dataclass(eq=False)
class StochasticResult:
    solution: MeshSolution
    stderr_xi: np.ndarray
    stderr_eta: np.ndarray
    t_stoc: float
    restarts: int
    warnings: list = field(default_factory=list)


def solve_fully_stochastic(monitor: MonitorFunction, grid: GridSpec, walk_cfg: WalkConfig) -> StochasticResult:
    """Monte Carlo estimate at every interior node; boundary nodes carry the Dirichlet data."""
    bd = build_boundary_data(monitor, grid)
    xi = assemble_boundary(grid, bd.xi)
    eta = assemble_boundary(grid, bd.eta)
    X, Y = grid.meshgrid()
    ids = (np.arange(1, grid.ny - 1)[:, None] * grid.nx + np.arange(1, grid.nx - 1)[None, :]).ravel()
    t0 = time.perf_counter()
    est = mc_estimate_points(np.column_stack([X.ravel()[ids], Y.ravel()[ids]]), monitor, bd, walk_cfg,
                             point_ids=ids)
    t_stoc = time.perf_counter() - t0
    inner = (grid.ny - 2, grid.nx - 2)
    xi[1:-1, 1:-1] = est.xi.reshape(inner)
    eta[1:-1, 1:-1] = est.eta.reshape(inner)
    sx = np.zeros(grid.shape)
    se = np.zeros(grid.shape)
    sx[1:-1, 1:-1] = est.stderr_xi.reshape(inner)
    se[1:-1, 1:-1] = est.stderr_eta.reshape(inner)
    sol = MeshSolution(ScalarField(grid, xi), ScalarField(grid, eta))
    return StochasticResult(sol, sx, se, t_stoc, int(est.restarts.sum()), list(est.warnings))
