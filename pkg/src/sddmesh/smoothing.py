"""Noise removal for Monte Carlo mesh solutions.

* :func:`perona_malik` runs explicit (FTCS) steps of
  ``u_t = div(exp(-|grad u|^2 / k^2) grad u)`` on xi and eta.
* :func:`smooth_interface` is a local quadratic regression (loess) along an
  interface line, used before the subdomain solves.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .domain import MeshSolution, ScalarField
from .errors import InstabilityError, StabilityWarning


@dataclass(frozen=True)
class SmoothConfig:
    k: float = 1000.0
    dt: float = 1e-4
    steps: int = 5
    scope: str = "global"  # or "per-subdomain"

    def __post_init__(self):
        if not self.k > 0 or not self.dt > 0:
            raise ValueError("k and dt must be positive")
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.scope not in ("global", "per-subdomain"):
            raise ValueError(f"unknown smoothing scope '{self.scope}'")


def stable_dt(hx: float, hy: float) -> float:
    """Largest FTCS step keeping every update a convex combination (c <= 1)."""
    return 1.0 / (2.0 / hx**2 + 2.0 / hy**2)


def _pm_step(u: np.ndarray, hx: float, hy: float, k: float, dt: float) -> np.ndarray:
    gy, gx = np.gradient(u, hy, hx)
    c = np.exp(-(gx * gx + gy * gy) / (k * k))
    ce = 0.5 * (c[1:-1, 1:-1] + c[1:-1, 2:])
    cw = 0.5 * (c[1:-1, 1:-1] + c[1:-1, :-2])
    cn = 0.5 * (c[1:-1, 1:-1] + c[2:, 1:-1])
    cs = 0.5 * (c[1:-1, 1:-1] + c[:-2, 1:-1])
    c0 = u[1:-1, 1:-1]
    flux = ((ce * (u[1:-1, 2:] - c0) - cw * (c0 - u[1:-1, :-2])) / hx**2
            + (cn * (u[2:, 1:-1] - c0) - cs * (c0 - u[:-2, 1:-1])) / hy**2)
    out = u.copy()
    out[1:-1, 1:-1] = c0 + dt * flux
    return out


def perona_malik_field(u: np.ndarray, hx: float, hy: float, cfg: SmoothConfig) -> np.ndarray:
    """``cfg.steps`` FTCS steps on one nodal array; the outer ring is held fixed."""
    if cfg.dt > stable_dt(hx, hy) * (1 + 1e-12):
        warnings.warn(f"dt={cfg.dt:g} exceeds the FTCS bound {stable_dt(hx, hy):.3g}",
                      StabilityWarning, stacklevel=3)
    prev = None
    for _ in range(cfg.steps):
        new = _pm_step(u, hx, hy, cfg.k, cfg.dt)
        upd = float(np.max(np.abs(new - u)))
        if prev is not None and prev > 0 and upd > 10.0 * prev or not np.isfinite(upd):
            raise InstabilityError(f"Perona-Malik update grew from {prev:.3g} to {upd:.3g}; reduce dt={cfg.dt:g}")
        prev = upd
        u = new
    return u


def perona_malik(sol: MeshSolution, cfg: SmoothConfig, layout=None) -> MeshSolution:
    """Smooth xi and eta independently.

    With ``scope="per-subdomain"`` each block of ``layout`` is smoothed on its
    own and the interface lines stay fixed like the physical boundary.
    """
    if cfg.steps == 0:
        return sol
    grid = sol.grid
    if cfg.scope == "per-subdomain" and layout is None:
        raise ValueError("per-subdomain smoothing needs a layout")
    out = []
    for f in (sol.xi, sol.eta):
        u = f.values
        if cfg.scope == "global":
            v = perona_malik_field(u, grid.hx, grid.hy, cfg)
        else:
            v = np.array(u)
            for sub in layout.subdomains:
                sl = sub.index_slice
                v[sl] = perona_malik_field(u[sl], sub.grid.hx, sub.grid.hy, cfg)
        out.append(ScalarField(grid, v))
    return MeshSolution(*out)


def loess_matrix(s: np.ndarray, span: int) -> np.ndarray:
    """Linear operator of a degree-2 tricube-weighted local regression.

    Each node uses the ``span`` nearest nodes (window shifted at the ends).
    The bandwidth is the largest distance in the window plus one spacing so
    every window point keeps a positive weight.
    """
    s = np.asarray(s, dtype=float)
    n = s.size
    half = span // 2
    L = np.zeros((n, n))
    h = (s[-1] - s[0]) / (n - 1)
    for i in range(n):
        lo = min(max(i - half, 0), n - span)
        idx = np.arange(lo, lo + span)
        d = s[idx] - s[i]
        bw = np.max(np.abs(d)) + abs(h)
        w = (1.0 - np.abs(d / bw) ** 3) ** 3
        t = d / bw
        A = np.column_stack([np.ones(span), t, t * t])
        sw = np.sqrt(w)
        # evaluate the local fit at t = 0: first row of the pseudo-inverse
        pinv = np.linalg.pinv(A * sw[:, None], rcond=1e-12)
        if np.linalg.matrix_rank(A * sw[:, None]) < 3:
            raise np.linalg.LinAlgError(f"singular local fit at node {i}")
        L[i, idx] = pinv[0] * sw
    return L


def smooth_interface(values, span: int = 5, anchors=None, s=None) -> np.ndarray:
    """Loess-smooth ``values`` along a line; ``anchors`` (default: both ends) are kept."""
    v = np.asarray(values, dtype=float)
    n = v.size
    if span % 2 == 0 or span < 3 or span > n:
        raise ValueError(f"span must be odd with 3 <= span <= {n}, got {span}")
    s = np.arange(n, dtype=float) if s is None else np.asarray(s, dtype=float)
    out = loess_matrix(s, span) @ v
    keep = [0, n - 1] if anchors is None else anchors
    keep = np.asarray(list(keep), dtype=int)
    out[keep] = v[keep]
    return out
