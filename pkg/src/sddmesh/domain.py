"""Rectangular domains, structured grids, nodal fields and mesh inversion.

Nodal arrays are stored with shape ``(ny, nx)`` and indexed ``[j, i]``, so the
C-order flattening is row-major by ``j`` then ``i``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import DegenerateMapError, InversionError, OutOfDomainError

# Snap tolerance for targets sitting on the tessellation boundary, in (xi, eta) units.
SNAP_TOL = 1e-9


@dataclass(frozen=True)
class RectDomain:
    xmin: float = 0.0
    xmax: float = 1.0
    ymin: float = 0.0
    ymax: float = 1.0

    def __post_init__(self):
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise ValueError(f"degenerate domain {self}")

    @classmethod
    def unit(cls) -> "RectDomain":
        return cls(0.0, 1.0, 0.0, 1.0)

    def contains(self, x, y):
        return (self.xmin <= x) & (x <= self.xmax) & (self.ymin <= y) & (y <= self.ymax)

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin


@dataclass(frozen=True)
class GridSpec:
    """Uniform node grid of ``nx`` by ``ny`` nodes covering ``domain``."""

    nx: int
    ny: int
    domain: RectDomain = field(default_factory=RectDomain.unit)

    def __post_init__(self):
        if int(self.nx) != self.nx or int(self.ny) != self.ny:
            raise ValueError("node counts must be integers")
        if self.nx < 3 or self.ny < 3:
            raise ValueError(f"grid needs at least 3x3 nodes, got {self.nx}x{self.ny}")

    @property
    def hx(self) -> float:
        return (self.domain.xmax - self.domain.xmin) / (self.nx - 1)

    @property
    def hy(self) -> float:
        return (self.domain.ymax - self.domain.ymin) / (self.ny - 1)

    @property
    def x(self) -> np.ndarray:
        return self.domain.xmin + np.arange(self.nx) * self.hx

    @property
    def y(self) -> np.ndarray:
        return self.domain.ymin + np.arange(self.ny) * self.hy

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    def node(self, i: int, j: int) -> tuple[float, float]:
        return (self.domain.xmin + i * self.hx, self.domain.ymin + j * self.hy)

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        """Node coordinates as two ``(ny, nx)`` arrays."""
        return np.meshgrid(self.x, self.y)


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ScalarField:
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.size != self.grid.nx * self.grid.ny:
            raise ValueError(
                f"field has {values.size} values, grid needs {self.grid.nx * self.grid.ny}"
            )
        values = values.reshape(self.grid.shape)
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", _frozen(values))

    @classmethod
    def from_function(cls, grid: GridSpec, fn) -> "ScalarField":
        X, Y = grid.meshgrid()
        return cls(grid, np.broadcast_to(fn(X, Y), grid.shape))

    def flat(self) -> np.ndarray:
        return self.values.ravel()


@dataclass(frozen=True, eq=False)
class MeshSolution:
    """Computational coordinates (xi, eta) sampled on the physical grid."""

    xi: ScalarField
    eta: ScalarField

    def __post_init__(self):
        if self.xi.grid != self.eta.grid:
            raise ValueError("xi and eta must share the same grid")

    @property
    def grid(self) -> GridSpec:
        return self.xi.grid

    @classmethod
    def from_arrays(cls, grid: GridSpec, xi, eta) -> "MeshSolution":
        return cls(ScalarField(grid, xi), ScalarField(grid, eta))


@dataclass(frozen=True, eq=False)
class PhysicalMesh:
    """Physical node positions ``x[b, a], y[b, a]`` of the uniform (xi, eta) grid."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.shape != y.shape or x.ndim != 2:
            raise ValueError("x and y must be 2-D arrays of identical shape")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("mesh coordinates must be finite")
        object.__setattr__(self, "x", _frozen(x))
        object.__setattr__(self, "y", _frozen(y))

    @property
    def m_xi(self) -> int:
        return self.x.shape[1]

    @property
    def m_eta(self) -> int:
        return self.x.shape[0]

    @classmethod
    def uniform(cls, m_xi: int, m_eta: int, domain: RectDomain | None = None) -> "PhysicalMesh":
        d = domain or RectDomain.unit()
        X, Y = np.meshgrid(np.linspace(d.xmin, d.xmax, m_xi), np.linspace(d.ymin, d.ymax, m_eta))
        return cls(X, Y)


def sample_bilinear(field: ScalarField, x: float, y: float) -> float:
    """Bilinear interpolant of a nodal field at the physical point ``(x, y)``."""
    grid = field.grid
    d = grid.domain
    if not d.contains(x, y):
        raise OutOfDomainError(f"point ({x}, {y}) lies outside {d}")
    s = (x - d.xmin) / grid.hx
    t = (y - d.ymin) / grid.hy
    i = min(int(np.floor(s)), grid.nx - 2)
    j = min(int(np.floor(t)), grid.ny - 2)
    s -= i
    t -= j
    v = field.values
    return float(
        (1 - s) * (1 - t) * v[j, i]
        + s * (1 - t) * v[j, i + 1]
        + (1 - s) * t * v[j + 1, i]
        + s * t * v[j + 1, i + 1]
    )


# Triangle t of cell (i, j): t=0 -> (i,j),(i+1,j),(i+1,j+1); t=1 -> (i,j),(i+1,j+1),(i,j+1).
@njit(cache=True)
def _tri_vertices(i, j, t):
    if t == 0:
        return i, j, i + 1, j, i + 1, j + 1
    return i, j, i + 1, j + 1, i, j + 1


@njit(cache=True)
def _barycentric(XI, ETA, i, j, t, p, q):
    ia, ja, ib, jb, ic, jc = _tri_vertices(i, j, t)
    ax, ay = XI[ja, ia], ETA[ja, ia]
    bx, by = XI[jb, ib], ETA[jb, ib]
    cx, cy = XI[jc, ic], ETA[jc, ic]
    det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    lb = ((p - ax) * (cy - ay) - (q - ay) * (cx - ax)) / det
    lc = ((bx - ax) * (q - ay) - (by - ay) * (p - ax)) / det
    return 1.0 - lb - lc, lb, lc


@njit(cache=True)
def _outside_distance(XI, ETA, i, j, t, la, lb, lc):
    # Approximate distance from the point to the triangle: worst negative
    # barycentric coordinate times the altitude from that vertex.
    ia, ja, ib, jb, ic, jc = _tri_vertices(i, j, t)
    ax, ay = XI[ja, ia], ETA[ja, ia]
    bx, by = XI[jb, ib], ETA[jb, ib]
    cx, cy = XI[jc, ic], ETA[jc, ic]
    area2 = abs((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))
    dist = 0.0
    if la < 0.0:
        dist = max(dist, -la * area2 / np.hypot(cx - bx, cy - by))
    if lb < 0.0:
        dist = max(dist, -lb * area2 / np.hypot(cx - ax, cy - ay))
    if lc < 0.0:
        dist = max(dist, -lc * area2 / np.hypot(bx - ax, by - ay))
    return dist


@njit(cache=True)
def _invert_kernel(XI, ETA, xs, ys, xi_t, eta_t, snap_tol, out_x, out_y, status):
    ny, nx = XI.shape
    ci, cj, ct = 0, 0, 0
    max_walk = 4 * (nx + ny) + 16
    for b in range(eta_t.size):
        for a in range(xi_t.size):
            p = xi_t[a]
            q = eta_t[b]
            found = False
            i, j, t = ci, cj, ct
            for _ in range(max_walk):
                la, lb, lc = _barycentric(XI, ETA, i, j, t, p, q)
                if la >= -1e-13 and lb >= -1e-13 and lc >= -1e-13:
                    found = True
                    break
                # step across the edge opposite the most negative coordinate
                if la <= lb and la <= lc:
                    k = 0
                elif lb <= lc:
                    k = 1
                else:
                    k = 2
                if t == 0:
                    if k == 0:
                        i, t = i + 1, 1
                    elif k == 1:
                        t = 1
                    else:
                        j, t = j - 1, 1
                else:
                    if k == 0:
                        j, t = j + 1, 0
                    elif k == 1:
                        i, t = i - 1, 0
                    else:
                        t = 0
                if i < 0 or j < 0 or i > nx - 2 or j > ny - 2:
                    break
            if not found:
                # exhaustive scan in fixed order; keep the closest triangle
                best = np.inf
                for jj in range(ny - 1):
                    for ii in range(nx - 1):
                        for tt in range(2):
                            la, lb, lc = _barycentric(XI, ETA, ii, jj, tt, p, q)
                            if la >= -1e-13 and lb >= -1e-13 and lc >= -1e-13:
                                d = 0.0
                            else:
                                d = _outside_distance(XI, ETA, ii, jj, tt, la, lb, lc)
                            if d < best:
                                best = d
                                i, j, t = ii, jj, tt
                        if best == 0.0:
                            break
                    if best == 0.0:
                        break
                if best > snap_tol:
                    status[b, a] = 1
                    continue
                la, lb, lc = _barycentric(XI, ETA, i, j, t, p, q)
            la = max(la, 0.0)
            lb = max(lb, 0.0)
            lc = max(lc, 0.0)
            s = la + lb + lc
            la /= s
            lb /= s
            lc /= s
            ia, ja, ib, jb, ic, jc = _tri_vertices(i, j, t)
            out_x[b, a] = la * xs[ia] + lb * xs[ib] + lc * xs[ic]
            out_y[b, a] = la * ys[ja] + lb * ys[jb] + lc * ys[jc]
            ci, cj, ct = i, j, t


def invert_mesh(sol: MeshSolution, m_xi: int | None = None, m_eta: int | None = None) -> PhysicalMesh:
    """Physical mesh x(xi, eta), y(xi, eta) on a uniform computational grid.

    Each physical cell's (xi, eta) image is split into two triangles along the
    (i, j)-(i+1, j+1) diagonal; every uniform target is located by a walk seeded
    at the previous target's triangle (exhaustive scan as fallback) and (x, y)
    is interpolated barycentrically. Computational targets span [0, 1] on both axes.
    """
    grid = sol.grid
    m_xi = grid.nx if m_xi is None else int(m_xi)
    m_eta = grid.ny if m_eta is None else int(m_eta)
    if m_xi < 2 or m_eta < 2:
        raise ValueError("target grid needs at least 2 nodes per axis")
    XI = np.ascontiguousarray(sol.xi.values)
    ETA = np.ascontiguousarray(sol.eta.values)

    # signed doubled areas of both triangle families
    dxa, dya = XI[:-1, 1:] - XI[:-1, :-1], ETA[:-1, 1:] - ETA[:-1, :-1]
    dxc, dyc = XI[1:, 1:] - XI[:-1, :-1], ETA[1:, 1:] - ETA[:-1, :-1]
    dxd, dyd = XI[1:, :-1] - XI[:-1, :-1], ETA[1:, :-1] - ETA[:-1, :-1]
    for area in (dxa * dyc - dya * dxc, dxc * dyd - dyc * dxd):
        bad = np.argwhere(area == 0.0)
        if bad.size:
            j, i = bad[0]
            raise DegenerateMapError(f"zero-area triangle in physical cell (i={i}, j={j})", (int(i), int(j)))

    xi_t = np.linspace(0.0, 1.0, m_xi)
    eta_t = np.linspace(0.0, 1.0, m_eta)
    out_x = np.zeros((m_eta, m_xi))
    out_y = np.zeros((m_eta, m_xi))
    status = np.zeros((m_eta, m_xi), dtype=np.int8)
    _invert_kernel(XI, ETA, grid.x, grid.y, xi_t, eta_t, SNAP_TOL, out_x, out_y, status)
    if status.any():
        b, a = np.argwhere(status)[0]
        raise InversionError(
            f"target (a={a}, b={b}) = ({xi_t[a]:.6g}, {eta_t[b]:.6g}) lies outside the (xi, eta) image",
            (int(a), int(b)),
        )
    return PhysicalMesh(out_x, out_y)
