"""Mesh files, SVG line drawings and CSV reports."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .domain import MeshSolution, PhysicalMesh

MESH_MAGIC = "sddmesh v1"

QUALITY_COLUMNS = ("n", "lambda", "dt", "l_inf", "q_max", "q_mean", "r_max", "r_mean")
TIMING_COLUMNS = ("monitor", "grid", "subdomains", "placement", "walks", "lambda", "dt", "mc_points",
                  "t_stoc", "t_sub", "t_smooth", "t_total", "t_1", "s_p",
                  "q_max", "q_mean", "r_max", "r_mean", "l_inf")


def fmt(v: float) -> str:
    """17 significant digits, enough to round-trip any double; ``-0`` is written as ``0``."""
    return format(float(v) + 0.0, ".17g")


@dataclass(frozen=True, eq=False)
class MeshFile:
    mesh: PhysicalMesh
    xi: np.ndarray   # computational target coordinates, indexed [b, a]
    eta: np.ndarray


def mesh_text(mesh: PhysicalMesh) -> str:
    m_xi, m_eta = mesh.m_xi, mesh.m_eta
    xi_t = np.linspace(0.0, 1.0, m_xi)
    eta_t = np.linspace(0.0, 1.0, m_eta)
    lines = [f"{MESH_MAGIC} {m_xi} {m_eta}"]
    for a in range(m_xi):
        for b in range(m_eta):
            lines.append(f"{a} {b} {fmt(mesh.x[b, a])} {fmt(mesh.y[b, a])} {fmt(xi_t[a])} {fmt(eta_t[b])}")
    return "\n".join(lines) + "\n"


def write_mesh(mesh: PhysicalMesh, sol: MeshSolution | None, path) -> Path:
    """Write ``mesh`` in the ``sddmesh v1`` text format.

    Each data line is ``a b x y xi eta`` where ``(xi, eta)`` is the uniform
    computational target of node ``(a, b)``. Lines are ordered a-major.
    ``sol``, when given, is only used to check the mesh lies in its domain.
    """
    if sol is not None:
        d = sol.grid.domain
        tol = 1e-9 * max(d.width, d.height)
        if (mesh.x.min() < d.xmin - tol or mesh.x.max() > d.xmax + tol
                or mesh.y.min() < d.ymin - tol or mesh.y.max() > d.ymax + tol):
            raise ValueError("mesh nodes fall outside the solution's domain")
    path = Path(path)
    try:
        with open(path, "w", newline="\n", encoding="ascii") as fh:
            fh.write(mesh_text(mesh))
    except OSError as e:
        raise OSError(f"cannot write mesh file {path}: {e.strerror}") from e
    return path


def read_mesh(path) -> MeshFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="ascii")
    except OSError as e:
        raise OSError(f"cannot read mesh file {path}: {e.strerror}") from e
    rows = text.split("\n")
    head = rows[0].split()
    if len(head) != 4 or " ".join(head[:2]) != MESH_MAGIC:
        raise ValueError(f"{path}: not an '{MESH_MAGIC}' mesh file")
    m_xi, m_eta = int(head[2]), int(head[3])
    x = np.empty((m_eta, m_xi))
    y = np.empty_like(x)
    xi = np.empty_like(x)
    eta = np.empty_like(x)
    data = [r for r in rows[1:] if r]
    if len(data) != m_xi * m_eta:
        raise ValueError(f"{path}: expected {m_xi * m_eta} nodes, found {len(data)}")
    for r in data:
        a, b, *vals = r.split()
        a, b = int(a), int(b)
        x[b, a], y[b, a], xi[b, a], eta[b, a] = (float(v) for v in vals)
    return MeshFile(PhysicalMesh(x, y), xi, eta)


def svg_text(mesh: PhysicalMesh, domain=None, stroke: float | None = None) -> str:
    x, y = mesh.x, mesh.y
    if domain is None:
        x0, x1, y0, y1 = x.min(), x.max(), y.min(), y.max()
    else:
        x0, x1, y0, y1 = domain.xmin, domain.xmax, domain.ymin, domain.ymax
    w, h = x1 - x0, y1 - y0
    sw = stroke if stroke is not None else 0.002 * max(w, h)
    flip = y0 + y1  # SVG y grows downwards

    def poly(px, py):
        pts = " ".join(f"{a:.9g},{flip - b:.9g}" for a, b in zip(px, py))
        return f'<polyline points="{pts}"/>'

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0:.9g} {y0:.9g} {w:.9g} {h:.9g}" '
        f'width="600" height="{600 * h / w:.6g}">',
        f'<g fill="none" stroke="black" stroke-width="{sw:.6g}">',
    ]
    out += [poly(x[b, :], y[b, :]) for b in range(mesh.m_eta)]
    out += [poly(x[:, a], y[:, a]) for a in range(mesh.m_xi)]
    out += ["</g>", "</svg>"]
    return "\n".join(out) + "\n"


def render_svg(mesh: PhysicalMesh, path, domain=None) -> Path:
    """One polyline per mesh row and per mesh column."""
    path = Path(path)
    try:
        path.write_text(svg_text(mesh, domain), encoding="utf-8")
    except OSError as e:
        raise OSError(f"cannot write SVG {path}: {e.strerror}") from e
    return path


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    return str(v)


def csv_text(rows, columns) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(columns)
    for row in rows:
        wr.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def write_csv(rows, columns, path) -> Path:
    """Write dict rows under a fixed header; missing values are empty cells."""
    path = Path(path)
    try:
        path.write_text(csv_text(rows, columns), encoding="ascii")
    except OSError as e:
        raise OSError(f"cannot write CSV {path}: {e.strerror}") from e
    return path
