"""Deterministic solution of ``div(w grad u) = 0`` on a rectangle.

Conservative five-point discretisation with arithmetic-mean half-point
weights, solved by Jacobi iteration, plus the one-dimensional boundary solves
that supply the tangential Dirichlet data of the mesh generator.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from numba import njit, prange

from .domain import GridSpec, MeshSolution, ScalarField
from .errors import ConvergenceWarning, EvaluationError
from .monitor import MonitorFunction

EDGES = ("bottom", "top", "left", "right")


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-8
    max_iters: int | None = None  # None -> 200 * max(nx, ny)**2

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")

    def iteration_cap(self, grid: GridSpec) -> int:
        if self.max_iters is not None:
            return int(self.max_iters)
        return 200 * max(grid.nx, grid.ny) ** 2


@dataclass(eq=False)
class JacobiResult:
    field: ScalarField
    iterations: int
    update_norm: float
    converged: bool
    history: np.ndarray = field(repr=False)


def edge_coordinates(grid: GridSpec, edge: str) -> tuple[np.ndarray, np.ndarray]:
    """Physical node coordinates along one edge of ``grid``."""
    d = grid.domain
    if edge in ("bottom", "top"):
        xs = grid.x
        ys = np.full(grid.nx, d.ymin if edge == "bottom" else d.ymax)
    elif edge in ("left", "right"):
        ys = grid.y
        xs = np.full(grid.ny, d.xmin if edge == "left" else d.xmax)
    else:
        raise ValueError(f"unknown edge '{edge}'")
    return xs, ys


def solve_1d_boundary(monitor: MonitorFunction, edge: str, n: int | None = None,
                      grid: GridSpec | None = None) -> np.ndarray:
    """One-dimensional equidistribution along an edge of the domain.

    For ``(w u')' = 0`` with ``u = 0`` and ``u = 1`` at the edge ends,
    ``u(s) = int_0^s rho / int_0^1 rho``; the integrals use the trapezoidal
    rule on the ``n`` edge nodes.
    """
    if grid is None:
        if n is None:
            raise ValueError("give either n or grid")
        grid = GridSpec(n, n, monitor.domain)
    if edge in ("bottom", "top") and n is not None and n != grid.nx:
        grid = GridSpec(n, grid.ny, grid.domain)
    elif edge in ("left", "right") and n is not None and n != grid.ny:
        grid = GridSpec(grid.nx, n, grid.domain)
    xs, ys = edge_coordinates(grid, edge)
    if xs.size < 3:
        raise ValueError("edge needs at least 3 nodes")
    rho = monitor.rho(xs, ys)
    if np.any(rho <= 0.0):
        k = int(np.argmax(rho <= 0.0))
        raise EvaluationError(f"non-positive rho={rho[k]} at ({xs[k]:.6g}, {ys[k]:.6g})")
    s = xs if edge in ("bottom", "top") else ys
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (rho[1:] + rho[:-1]) * np.diff(s))))
    u = cum / cum[-1]
    u[-1] = 1.0
    return u


@dataclass(frozen=True, eq=False)
class BoundaryData:
    """Dirichlet tables of xi (``f``) and eta (``g``) on the four edges of ``grid``.

    Edge tables are indexed by node along the edge (bottom/top by i, left/right by j)
    and interpolated linearly between nodes.
    """

    grid: GridSpec
    xi: dict
    eta: dict

    def table(self, which: str, edge: str) -> np.ndarray:
        return (self.xi if which == "xi" else self.eta)[edge]

    def evaluate(self, which: str, edge: str, s):
        """Linear interpolation of the table at edge coordinate ``s`` (physical units)."""
        nodes = self.grid.x if edge in ("bottom", "top") else self.grid.y
        return np.interp(s, nodes, self.table(which, edge))


def build_boundary_data(monitor: MonitorFunction, grid: GridSpec) -> BoundaryData:
    """Mesh generator boundary data: xi = 0 | 1 on left | right and eta = 0 | 1 on
    bottom | top, with 1D equidistribution on the tangential edges."""
    xi = {
        "bottom": solve_1d_boundary(monitor, "bottom", grid=grid),
        "top": solve_1d_boundary(monitor, "top", grid=grid),
        "left": np.zeros(grid.ny),
        "right": np.ones(grid.ny),
    }
    eta = {
        "bottom": np.zeros(grid.nx),
        "top": np.ones(grid.nx),
        "left": solve_1d_boundary(monitor, "left", grid=grid),
        "right": solve_1d_boundary(monitor, "right", grid=grid),
    }
    for tables in (xi, eta):
        for arr in tables.values():
            arr.setflags(write=False)
    return BoundaryData(grid, xi, eta)


def assemble_boundary(grid: GridSpec, boundary: dict) -> np.ndarray:
    """Nodal array with the four edge tables written in, zeros inside."""
    u = np.zeros(grid.shape)
    for edge, n in (("bottom", grid.nx), ("top", grid.nx), ("left", grid.ny), ("right", grid.ny)):
        arr = np.asarray(boundary[edge], dtype=float)
        if arr.shape != (n,):
            raise ValueError(f"{edge} boundary has shape {arr.shape}, expected ({n},)")
    b, t = np.asarray(boundary["bottom"], float), np.asarray(boundary["top"], float)
    lft, rgt = np.asarray(boundary["left"], float), np.asarray(boundary["right"], float)
    for name, v1, v2 in (("bottom-left", b[0], lft[0]), ("bottom-right", b[-1], rgt[0]),
                         ("top-left", t[0], lft[-1]), ("top-right", t[-1], rgt[-1])):
        if abs(v1 - v2) > 1e-12 * max(1.0, abs(v1), abs(v2)):
            raise ValueError(f"boundary data disagree at the {name} corner: {v1} vs {v2}")
    u[0, :] = b
    u[-1, :] = t
    # left/right edges are written last so their values own the corners
    u[:, 0] = lft
    u[:, -1] = rgt
    return u


def transfinite_blend(grid: GridSpec, u_boundary: np.ndarray) -> np.ndarray:
    """Bilinear (Coons) blend of the boundary values of ``u_boundary`` into the interior."""
    s = (grid.x - grid.domain.xmin) / grid.domain.width
    t = (grid.y - grid.domain.ymin) / grid.domain.height
    S, T = np.meshgrid(s, t)
    B, Tp = u_boundary[0, :][None, :], u_boundary[-1, :][None, :]
    L, Rt = u_boundary[:, 0][:, None], u_boundary[:, -1][:, None]
    c00, c10 = u_boundary[0, 0], u_boundary[0, -1]
    c01, c11 = u_boundary[-1, 0], u_boundary[-1, -1]
    u = ((1 - T) * B + T * Tp + (1 - S) * L + S * Rt
         - ((1 - S) * (1 - T) * c00 + S * (1 - T) * c10 + (1 - S) * T * c01 + S * T * c11))
    out = u_boundary.copy()
    out[1:-1, 1:-1] = u[1:-1, 1:-1]
    return out


def stencil_coefficients(w: np.ndarray, hx: float, hy: float):
    """Half-point weights ``w_{i+1/2,j} = (w_ij + w_{i+1,j})/2`` scaled by the spacing."""
    we = 0.5 * (w[1:-1, 1:-1] + w[1:-1, 2:]) / hx**2
    ww = 0.5 * (w[1:-1, 1:-1] + w[1:-1, :-2]) / hx**2
    wn = 0.5 * (w[1:-1, 1:-1] + w[2:, 1:-1]) / hy**2
    ws = 0.5 * (w[1:-1, 1:-1] + w[:-2, 1:-1]) / hy**2
    return we, ww, wn, ws, we + ww + wn + ws


@njit(cache=True, parallel=True)
def _jacobi_sweeps(u, unew, we, ww, wn, ws, diag, n_sweeps, tol, history):
    ny, nx = u.shape
    done = 0
    upd = np.inf
    for k in range(n_sweeps):
        row_max = np.zeros(ny)
        for j in prange(1, ny - 1):
            m = 0.0
            for i in range(1, nx - 1):
                v = (we[j - 1, i - 1] * u[j, i + 1] + ww[j - 1, i - 1] * u[j, i - 1]
                     + wn[j - 1, i - 1] * u[j + 1, i] + ws[j - 1, i - 1] * u[j - 1, i]) / diag[j - 1, i - 1]
                d = abs(v - u[j, i])
                if d > m:
                    m = d
                unew[j, i] = v
            row_max[j] = m
        upd = row_max.max()
        history[k] = upd
        u, unew = unew, u
        done = k + 1
        if upd < tol:
            break
    return done, upd


def solve_dirichlet(monitor: MonitorFunction, grid: GridSpec, boundary: dict,
                    cfg: SolverConfig | None = None, initial: np.ndarray | None = None,
                    weight: np.ndarray | None = None) -> JacobiResult:
    """Jacobi fixed point of the conservative stencil for ``div(w grad u) = 0``.

    ``boundary`` maps ``bottom``/``top`` (length nx) and ``left``/``right``
    (length ny) to Dirichlet values. Iteration stops when the max-norm update
    drops below ``cfg.tol``; hitting the iteration cap emits a
    :class:`ConvergenceWarning` and the last iterate is still returned.
    ``weight`` optionally supplies precomputed nodal ``w = 1/rho``.
    """
    cfg = cfg or SolverConfig()
    u_b = assemble_boundary(grid, boundary)
    if weight is None:
        X, Y = grid.meshgrid()
        rho = monitor.rho(X, Y)
        if np.any(rho <= 0.0):
            raise EvaluationError("non-positive monitor value on the grid")
        weight = 1.0 / rho
    elif np.any(weight <= 0.0) or not np.all(np.isfinite(weight)):
        raise EvaluationError("weights must be finite and positive")
    we, ww, wn, ws, diag = (np.ascontiguousarray(c) for c in stencil_coefficients(weight, grid.hx, grid.hy))

    if initial is None:
        u = transfinite_blend(grid, u_b)
    else:
        u = np.array(initial, dtype=float).reshape(grid.shape)
        u[0, :], u[-1, :], u[:, 0], u[:, -1] = u_b[0, :], u_b[-1, :], u_b[:, 0], u_b[:, -1]
    unew = u.copy()

    cap = cfg.iteration_cap(grid)
    chunk = 2000
    history = []
    iters = 0
    upd = np.inf
    while iters < cap:
        n = min(chunk, cap - iters)
        hist = np.empty(n)
        done, upd = _jacobi_sweeps(u, unew, we, ww, wn, ws, diag, n, cfg.tol, hist)
        history.append(hist[:done])
        iters += done
        if done % 2 == 1:
            u, unew = unew, u
        if upd < cfg.tol:
            break
    converged = upd < cfg.tol
    if not converged:
        warnings.warn(
            f"Jacobi stopped after {iters} sweeps with update norm {upd:.3e} > tol {cfg.tol:.1e}",
            ConvergenceWarning, stacklevel=2,
        )
    return JacobiResult(ScalarField(grid, u), iters, float(upd), converged,
                        np.concatenate(history) if history else np.empty(0))


def solve_single_domain(monitor: MonitorFunction, grid: GridSpec,
                        cfg: SolverConfig | None = None) -> MeshSolution:
    """Deterministic reference mesh solution on the whole domain."""
    bd = build_boundary_data(monitor, grid)
    X, Y = grid.meshgrid()
    w = 1.0 / monitor.rho(X, Y)
    xi = solve_dirichlet(monitor, grid, bd.xi, cfg, weight=w)
    eta = solve_dirichlet(monitor, grid, bd.eta, cfg, weight=w)
    return MeshSolution(xi.field, eta.field)
