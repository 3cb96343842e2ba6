"""Geometric mesh quality and mesh-to-mesh comparison."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import PhysicalMesh
from .errors import ComparisonError, TanglingError
from .monitor import MonitorFunction


@dataclass(frozen=True)
class QualityReport:
    q_max: float
    q_mean: float
    r_max: float | None = None
    r_mean: float | None = None
    l_inf: float | None = None


def cell_jacobians(mesh: PhysicalMesh):
    """Cell-centre Jacobian entries ``(x_xi, x_eta, y_xi, y_eta)``, each ``(m_eta-1, m_xi-1)``.

    Derivatives are the averages of the two opposite edge differences of the
    bilinear cell map, divided by the uniform computational spacing.
    """
    dxi = 1.0 / (mesh.m_xi - 1)
    deta = 1.0 / (mesh.m_eta - 1)
    x, y = mesh.x, mesh.y
    x_xi = 0.5 * ((x[:-1, 1:] - x[:-1, :-1]) + (x[1:, 1:] - x[1:, :-1])) / dxi
    y_xi = 0.5 * ((y[:-1, 1:] - y[:-1, :-1]) + (y[1:, 1:] - y[1:, :-1])) / dxi
    x_eta = 0.5 * ((x[1:, :-1] - x[:-1, :-1]) + (x[1:, 1:] - x[:-1, 1:])) / deta
    y_eta = 0.5 * ((y[1:, :-1] - y[:-1, :-1]) + (y[1:, 1:] - y[:-1, 1:])) / deta
    return x_xi, x_eta, y_xi, y_eta


def quality_from_jacobian(x_xi, x_eta, y_xi, y_eta):
    """``Q = tr(J^T J) / (2 sqrt(det(J^T J)))``; NaN where the Jacobian is singular."""
    tr = x_xi**2 + x_eta**2 + y_xi**2 + y_eta**2
    det = np.abs(x_xi * y_eta - x_eta * y_xi)  # sqrt(det(J^T J)) = |det J|
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(det > 0.0, 0.5 * tr / np.where(det > 0.0, det, 1.0), np.nan)


def quality_field(mesh: PhysicalMesh) -> np.ndarray:
    """Per-cell quality, indexed ``[b, a]``; raises on degenerate cells."""
    q = quality_from_jacobian(*cell_jacobians(mesh))
    bad = np.argwhere(~np.isfinite(q))
    if bad.size:
        b, a = bad[0]
        raise TanglingError(f"degenerate cell (a={a}, b={b}): det(J^T J) = 0", (int(a), int(b)))
    return q


def cell_quality(mesh: PhysicalMesh, cell: tuple[int, int]) -> float:
    a, b = cell
    if not (0 <= a < mesh.m_xi - 1 and 0 <= b < mesh.m_eta - 1):
        raise IndexError(f"cell {cell} out of range")
    sub = PhysicalMesh(mesh.x[b:b + 2, a:a + 2], mesh.y[b:b + 2, a:a + 2])
    # rescale: the 2x2 submesh has unit computational spacing, the parent has 1/(m-1)
    jac = list(cell_jacobians(sub))
    jac[0] *= 1.0 / (mesh.m_xi - 1)
    jac[2] *= 1.0 / (mesh.m_xi - 1)
    jac[1] *= 1.0 / (mesh.m_eta - 1)
    jac[3] *= 1.0 / (mesh.m_eta - 1)
    q = float(quality_from_jacobian(*jac)[0, 0])
    if not np.isfinite(q):
        raise TanglingError(f"degenerate cell (a={a}, b={b}): det(J^T J) = 0", (a, b))
    return q


def l_inf_error(mesh: PhysicalMesh, reference: PhysicalMesh, monitor: MonitorFunction) -> float:
    """Largest node-wise difference of rho evaluated on the two meshes."""
    if mesh.x.shape != reference.x.shape:
        raise ComparisonError(f"mesh shapes differ: {mesh.x.shape} vs {reference.x.shape}")
    return float(np.max(np.abs(monitor.rho(reference.x, reference.y) - monitor.rho(mesh.x, mesh.y))))


def quality_report(mesh: PhysicalMesh, reference: PhysicalMesh | None = None,
                   monitor: MonitorFunction | None = None) -> QualityReport:
    """Q statistics of ``mesh``; ratios use the reference in the numerator."""
    q = quality_field(mesh)
    q_max, q_mean = float(q.max()), float(q.mean())
    if reference is None:
        return QualityReport(q_max, q_mean)
    if reference.x.shape != mesh.x.shape:
        raise ComparisonError(f"mesh shapes differ: {mesh.x.shape} vs {reference.x.shape}")
    q_ref = quality_field(reference)
    l_inf = l_inf_error(mesh, reference, monitor) if monitor is not None else None
    return QualityReport(q_max, q_mean, float(q_ref.max()) / q_max, float(q_ref.mean()) / q_mean, l_inf)
