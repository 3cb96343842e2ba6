"""Monitor (mesh density) functions.

A monitor ``rho > 0`` sets the diffusion weight ``w = 1/rho`` of the mesh
generator ``div(w grad xi) = 0``. The advection term of the expanded operator
is ``grad(w)/w = -grad(rho)/rho``, returned by :meth:`MonitorFunction.drift`.

Every builtin carries hand-derived first and second derivatives compiled with
numba, so the random-walk kernels can call them without leaving nopython mode.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numba import njit, types

from .domain import RectDomain
from .errors import EvaluationError

# ---------------------------------------------------------------------------
# Builtin kernels: grad(x, y, p) -> (rho, rho_x, rho_y); hess(x, y, p) -> (rho_xx, rho_yy)
# ---------------------------------------------------------------------------

# Kernels are compiled to fixed signatures and passed around as first-class
# function values, so the array and random-walk loops that take them as
# arguments can be cached on disk instead of recompiled for every kernel.
_F = types.float64
GRAD_SIG = types.UniTuple(_F, 3)(_F, _F, _F[::1])
HESS_SIG = types.UniTuple(_F, 2)(_F, _F, _F[::1])
GRAD_FN = types.FunctionType(GRAD_SIG)
HESS_FN = types.FunctionType(HESS_SIG)


@njit(GRAD_SIG, cache=True)
def _constant_grad(x, y, p):
    return p[0], 0.0, 0.0


@njit(HESS_SIG, cache=True)
def _constant_hess(x, y, p):
    return 0.0, 0.0


# rho = 1 + R exp(-50 (x - 3/4)^2 - 50 (y - 1/2)^2 - 1/2),  p = [R]
@njit(GRAD_SIG, cache=True)
def _running_grad(x, y, p):
    dx = x - 0.75
    dy = y - 0.5
    g = p[0] * math.exp(-50.0 * dx * dx - 50.0 * dy * dy - 0.5)
    return 1.0 + g, -100.0 * dx * g, -100.0 * dy * g


@njit(HESS_SIG, cache=True)
def _running_hess(x, y, p):
    dx = x - 0.75
    dy = y - 0.5
    g = p[0] * math.exp(-50.0 * dx * dx - 50.0 * dy * dy - 0.5)
    return (1.0e4 * dx * dx - 100.0) * g, (1.0e4 * dy * dy - 100.0) * g


# rho = sqrt(1 + alpha (R^2 a^2 sin^2(pi y) + (1 - a)^2 pi^2 cos^2(pi y))),
# a = exp(R (x - 1)),  p = [alpha, R]
@njit(cache=True)
def _huang_sloan_parts(x, y, p):
    alpha, R = p[0], p[1]
    a = math.exp(R * (x - 1.0))
    s = math.sin(math.pi * y)
    c = math.cos(math.pi * y)
    pi2 = math.pi * math.pi
    S = R * R * a * a * s * s + (1.0 - a) ** 2 * pi2 * c * c
    Sx = 2.0 * R ** 3 * a * a * s * s - 2.0 * R * a * (1.0 - a) * pi2 * c * c
    Sy = 2.0 * math.pi * s * c * (R * R * a * a - pi2 * (1.0 - a) ** 2)
    rho = math.sqrt(1.0 + alpha * S)
    return alpha, R, a, s, c, S, Sx, Sy, rho


@njit(GRAD_SIG, cache=True)
def _huang_sloan_grad(x, y, p):
    alpha, R, a, s, c, S, Sx, Sy, rho = _huang_sloan_parts(x, y, p)
    return rho, 0.5 * alpha * Sx / rho, 0.5 * alpha * Sy / rho


@njit(HESS_SIG, cache=True)
def _huang_sloan_hess(x, y, p):
    alpha, R, a, s, c, S, Sx, Sy, rho = _huang_sloan_parts(x, y, p)
    pi2 = math.pi * math.pi
    Sxx = 4.0 * R ** 4 * a * a * s * s - 2.0 * R * R * pi2 * c * c * a * (1.0 - 2.0 * a)
    Syy = 2.0 * pi2 * (c * c - s * s) * (R * R * a * a - pi2 * (1.0 - a) ** 2)
    rho3 = rho ** 3
    return (
        0.5 * alpha * Sxx / rho - 0.25 * alpha * alpha * Sx * Sx / rho3,
        0.5 * alpha * Syy / rho - 0.25 * alpha * alpha * Sy * Sy / rho3,
    )


# rho = 1 / (1 + alpha exp(-R phi^2)),  phi = y - 1/2 - sin(2 pi x)/4,  p = [alpha, R]
@njit(GRAD_SIG, cache=True)
def _mackenzie_grad(x, y, p):
    alpha, R = p[0], p[1]
    phi = y - 0.5 - 0.25 * math.sin(2.0 * math.pi * x)
    phi_x = -0.5 * math.pi * math.cos(2.0 * math.pi * x)
    e = alpha * math.exp(-R * phi * phi)
    D = 1.0 + e
    D_phi = -2.0 * R * phi * e
    return 1.0 / D, -D_phi * phi_x / (D * D), -D_phi / (D * D)


@njit(HESS_SIG, cache=True)
def _mackenzie_hess(x, y, p):
    alpha, R = p[0], p[1]
    phi = y - 0.5 - 0.25 * math.sin(2.0 * math.pi * x)
    phi_x = -0.5 * math.pi * math.cos(2.0 * math.pi * x)
    phi_xx = math.pi * math.pi * math.sin(2.0 * math.pi * x)
    e = alpha * math.exp(-R * phi * phi)
    D = 1.0 + e
    D_x = -2.0 * R * phi * phi_x * e
    D_y = -2.0 * R * phi * e
    D_xx = e * (4.0 * R * R * phi * phi * phi_x * phi_x - 2.0 * R * (phi_x * phi_x + phi * phi_xx))
    D_yy = e * (4.0 * R * R * phi * phi - 2.0 * R)
    D2 = D * D
    D3 = D2 * D
    return -D_xx / D2 + 2.0 * D_x * D_x / D3, -D_yy / D2 + 2.0 * D_y * D_y / D3


# rho = 1 + alpha exp(-R phi^2), the reciprocal of the layer monitor above
@njit(GRAD_SIG, cache=True)
def _mackenzie_layer_grad(x, y, p):
    alpha, R = p[0], p[1]
    phi = y - 0.5 - 0.25 * math.sin(2.0 * math.pi * x)
    phi_x = -0.5 * math.pi * math.cos(2.0 * math.pi * x)
    e = alpha * math.exp(-R * phi * phi)
    D_phi = -2.0 * R * phi * e
    return 1.0 + e, D_phi * phi_x, D_phi


@njit(HESS_SIG, cache=True)
def _mackenzie_layer_hess(x, y, p):
    alpha, R = p[0], p[1]
    phi = y - 0.5 - 0.25 * math.sin(2.0 * math.pi * x)
    phi_x = -0.5 * math.pi * math.cos(2.0 * math.pi * x)
    phi_xx = math.pi * math.pi * math.sin(2.0 * math.pi * x)
    e = alpha * math.exp(-R * phi * phi)
    D_xx = e * (4.0 * R * R * phi * phi * phi_x * phi_x - 2.0 * R * (phi_x * phi_x + phi * phi_xx))
    D_yy = e * (4.0 * R * R * phi * phi - 2.0 * R)
    return D_xx, D_yy


# rho = sqrt(1 + alpha (u_x^2 + u_y^2)),  u = sum_k tanh(R (|X - c_k|^2 - 1/8)),  p = [alpha, R]
_RING_CX = np.array([0.0, 0.5, 0.5, -0.5, -0.5])
_RING_CY = np.array([0.0, 0.5, -0.5, 0.5, -0.5])


@njit(cache=True)
def _ring_derivs(x, y, R):
    ux = uy = uxx = uxy = uyy = 0.0
    uxxx = uxxy = uxyy = uyyy = 0.0
    for k in range(5):
        qx = 2.0 * (x - _RING_CX[k])
        qy = 2.0 * (y - _RING_CY[k])
        q = 0.25 * (qx * qx + qy * qy)
        g = math.tanh(R * (q - 0.125))
        g1 = R * (1.0 - g * g)
        g2 = -2.0 * R * g * g1
        g3 = -2.0 * R * (g1 * g1 + g * g2)
        ux += g1 * qx
        uy += g1 * qy
        uxx += g2 * qx * qx + 2.0 * g1
        uxy += g2 * qx * qy
        uyy += g2 * qy * qy + 2.0 * g1
        uxxx += g3 * qx ** 3 + 6.0 * g2 * qx
        uxxy += g3 * qx * qx * qy + 2.0 * g2 * qy
        uxyy += g3 * qx * qy * qy + 2.0 * g2 * qx
        uyyy += g3 * qy ** 3 + 6.0 * g2 * qy
    return ux, uy, uxx, uxy, uyy, uxxx, uxxy, uxyy, uyyy


@njit(GRAD_SIG, cache=True)
def _five_ring_grad(x, y, p):
    alpha, R = p[0], p[1]
    ux = uy = uxx = uxy = uyy = 0.0
    for k in range(5):
        qx = 2.0 * (x - _RING_CX[k])
        qy = 2.0 * (y - _RING_CY[k])
        g = math.tanh(R * (0.25 * (qx * qx + qy * qy) - 0.125))
        g1 = R * (1.0 - g * g)
        g2 = -2.0 * R * g * g1
        ux += g1 * qx
        uy += g1 * qy
        uxx += g2 * qx * qx + 2.0 * g1
        uxy += g2 * qx * qy
        uyy += g2 * qy * qy + 2.0 * g1
    rho = math.sqrt(1.0 + alpha * (ux * ux + uy * uy))
    return rho, alpha * (ux * uxx + uy * uxy) / rho, alpha * (ux * uxy + uy * uyy) / rho


@njit(HESS_SIG, cache=True)
def _five_ring_hess(x, y, p):
    alpha, R = p[0], p[1]
    ux, uy, uxx, uxy, uyy, uxxx, uxxy, uxyy, uyyy = _ring_derivs(x, y, R)
    rho = math.sqrt(1.0 + alpha * (ux * ux + uy * uy))
    rx = alpha * (ux * uxx + uy * uxy) / rho
    ry = alpha * (ux * uxy + uy * uyy) / rho
    rxx = alpha * (uxx * uxx + ux * uxxx + uxy * uxy + uy * uxxy) / rho - rx * rx / rho
    ryy = alpha * (uxy * uxy + ux * uxyy + uyy * uyy + uy * uyyy) / rho - ry * ry / rho
    return rxx, ryy


# ---------------------------------------------------------------------------
# Array evaluation helpers
# ---------------------------------------------------------------------------


@njit(types.void(GRAD_FN, _F[::1], _F[::1], _F[::1], _F[:, ::1]), cache=True)
def _eval_grad(fn, xs, ys, p, out):
    for k in range(xs.size):
        r, rx, ry = fn(xs[k], ys[k], p)
        out[0, k] = r
        out[1, k] = rx
        out[2, k] = ry


@njit(types.void(HESS_FN, _F[::1], _F[::1], _F[::1], _F[:, ::1]), cache=True)
def _eval_hess(fn, xs, ys, p, out):
    for k in range(xs.size):
        rxx, ryy = fn(xs[k], ys[k], p)
        out[0, k] = rxx
        out[1, k] = ryy


def _central_difference_kernels(rho_jit, h):
    """Gradient and second-derivative kernels for a user-supplied scalar ``rho(x, y)``."""

    @njit(GRAD_SIG)
    def grad(x, y, p):
        r = rho_jit(x, y)
        rx = (rho_jit(x + h, y) - rho_jit(x - h, y)) / (2.0 * h)
        ry = (rho_jit(x, y + h) - rho_jit(x, y - h)) / (2.0 * h)
        return r, rx, ry

    @njit(HESS_SIG)
    def hess(x, y, p):
        r = rho_jit(x, y)
        rxx = (rho_jit(x + h, y) - 2.0 * r + rho_jit(x - h, y)) / (h * h)
        ryy = (rho_jit(x, y + h) - 2.0 * r + rho_jit(x, y - h)) / (h * h)
        return rxx, ryy

    return grad, hess


# ---------------------------------------------------------------------------
# MonitorFunction
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MonitorFunction:
    """Positive mesh density with gradient, drift and second derivatives.

    Use the module-level constructors (:func:`running_example`,
    :func:`mackenzie`, ...) rather than instantiating this class directly.
    """

    kind: str
    params: dict
    domain: RectDomain
    grad_kernel: Callable = field(repr=False)
    hess_kernel: Callable = field(repr=False)
    gradient_mode: str = "analytic"
    fd_step: float | None = None

    def __post_init__(self):
        p = np.array(list(self.params.values()) or [0.0], dtype=float)
        object.__setattr__(self, "param_array", p)
        d = self.domain
        X, Y = np.meshgrid(np.linspace(d.xmin, d.xmax, 101), np.linspace(d.ymin, d.ymax, 101))
        r = self.rho(X, Y)
        if not np.all(np.isfinite(r)) or np.any(r <= 0.0):
            bad = np.argwhere(~(np.isfinite(r) & (r > 0)))[0]
            raise EvaluationError(
                f"monitor '{self.kind}' is not positive at ({X[tuple(bad)]:.6g}, {Y[tuple(bad)]:.6g})"
            )

    def _grad_all(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        out = np.empty((3, x.size))
        _eval_grad(self.grad_kernel, np.array(x).ravel(), np.array(y).ravel(),
                   self.param_array, out)
        if not np.all(np.isfinite(out)):
            k = int(np.argwhere(~np.all(np.isfinite(out), axis=0))[0, 0])
            raise EvaluationError(
                f"monitor '{self.kind}' is not finite at ({x.ravel()[k]:.6g}, {y.ravel()[k]:.6g})"
            )
        return out.reshape((3,) + x.shape)

    def rho(self, x, y):
        r = self._grad_all(x, y)[0]
        return float(r) if r.ndim == 0 else r

    def weight(self, x, y):
        """Diffusion weight ``w = 1/rho``."""
        return 1.0 / self.rho(x, y)

    def gradient(self, x, y):
        out = self._grad_all(x, y)
        if out.ndim == 1:
            return float(out[1]), float(out[2])
        return out[1], out[2]

    def drift(self, x, y):
        """``grad(w)/w = -grad(rho)/rho``."""
        out = self._grad_all(x, y)
        bx, by = -out[1] / out[0], -out[2] / out[0]
        if out.ndim == 1:
            return float(bx), float(by)
        return bx, by

    def second_derivatives(self, x, y):
        """``(rho_xx, rho_yy)``."""
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        out = np.empty((2, x.size))
        _eval_hess(self.hess_kernel, np.array(x).ravel(), np.array(y).ravel(),
                   self.param_array, out)
        out = out.reshape((2,) + x.shape)
        if out.ndim == 1:
            return float(out[0]), float(out[1])
        return out[0], out[1]


def constant(value: float = 1.0, domain: RectDomain | None = None) -> MonitorFunction:
    return MonitorFunction("constant", {"value": float(value)}, domain or RectDomain.unit(),
                           _constant_grad, _constant_hess)


def running_example(R: float = 15.0, domain: RectDomain | None = None) -> MonitorFunction:
    """Gaussian bump centred at (3/4, 1/2): ``1 + R exp(-50|X - c|^2 - 1/2)``."""
    return MonitorFunction("running", {"R": float(R)}, domain or RectDomain.unit(),
                           _running_grad, _running_hess)


def huang_sloan(alpha: float = 0.7, R: float = 15.0, domain: RectDomain | None = None) -> MonitorFunction:
    """Boundary-layer monitor concentrating near x = 1."""
    return MonitorFunction("huang-sloan", {"alpha": float(alpha), "R": float(R)},
                           domain or RectDomain.unit(), _huang_sloan_grad, _huang_sloan_hess)


def mackenzie(alpha: float = 10.0, R: float = 50.0, domain: RectDomain | None = None,
              reciprocal: bool = False) -> MonitorFunction:
    """Sinusoidal internal layer ``1 / (1 + alpha exp(-R (y - 1/2 - sin(2 pi x)/4)^2))``.

    As written rho < 1 inside the layer, so the mesh coarsens there. With
    ``reciprocal=True`` the density is ``1 + alpha exp(-R (...)^2)`` and the
    mesh concentrates in the layer instead.
    """
    params = {"alpha": float(alpha), "R": float(R)}
    d = domain or RectDomain.unit()
    if reciprocal:
        return MonitorFunction("mackenzie-reciprocal", params, d, _mackenzie_layer_grad, _mackenzie_layer_hess)
    return MonitorFunction("mackenzie", params, d, _mackenzie_grad, _mackenzie_hess)


def five_ring(alpha: float = 0.2, R: float = 30.0, domain: RectDomain | None = None) -> MonitorFunction:
    """Arc-length monitor of a five-ring tanh field on [-1, 1]^2."""
    return MonitorFunction("five-ring", {"alpha": float(alpha), "R": float(R)},
                           domain or RectDomain(-1.0, 1.0, -1.0, 1.0), _five_ring_grad, _five_ring_hess)


def user_supplied(rho: Callable[[float, float], float], domain: RectDomain | None = None,
                  h: float = 1e-6, name: str = "user") -> MonitorFunction:
    """Wrap a scalar ``rho(x, y)``; derivatives come from central differences with step ``h``.

    ``rho`` must be compilable by numba in nopython mode (plain ``math`` calls).
    """
    rho_jit = rho if hasattr(rho, "py_func") else njit(rho)
    grad, hess = _central_difference_kernels(rho_jit, float(h))
    return MonitorFunction(name, {}, domain or RectDomain.unit(), grad, hess,
                           gradient_mode="central-difference", fd_step=float(h))


BUILTINS = {
    "constant": constant,
    "running": running_example,
    "huang-sloan": huang_sloan,
    "mackenzie": mackenzie,
    "five-ring": five_ring,
    "mackenzie-reciprocal": lambda **kw: mackenzie(reciprocal=True, **kw),
}


def from_name(name: str, **params) -> MonitorFunction:
    """Builtin monitor by name with optional parameter overrides."""
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise ValueError(f"unknown monitor '{name}', choose from {sorted(BUILTINS)}") from None
    return factory(**params)
