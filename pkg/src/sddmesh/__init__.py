"""Adaptive mesh generation with stochastic domain decomposition.

Submodules are imported lazily so that the command line can configure the
numba thread pool before numba is loaded.
"""
import importlib
import os

os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

__version__ = "0.1.0"

_EXPORTS = {
    "RectDomain": "domain", "GridSpec": "domain", "ScalarField": "domain", "MeshSolution": "domain",
    "PhysicalMesh": "domain", "sample_bilinear": "domain", "invert_mesh": "domain",
    "MonitorFunction": "monitor", "from_name": "monitor",
    "SolverConfig": "detsolver", "solve_dirichlet": "detsolver", "solve_single_domain": "detsolver",
    "build_boundary_data": "detsolver", "solve_1d_boundary": "detsolver",
    "WalkConfig": "sde", "mc_estimate": "sde", "mc_estimate_points": "sde",
    "build_layout": "decomposition", "plan_interface_points": "decomposition",
    "solve_interfaces": "decomposition", "solve_sdd": "decomposition",
    "solve_fully_stochastic": "decomposition",
    "SmoothConfig": "smoothing", "perona_malik": "smoothing", "smooth_interface": "smoothing",
    "quality_report": "quality", "QualityReport": "quality",
    "write_mesh": "output", "read_mesh": "output", "render_svg": "output",
    "speedup_model": "report", "TimingReport": "report",
}

__all__ = sorted(_EXPORTS)


def __getattr__(name):
    mod = _EXPORTS.get(name)
    if mod is None:
        raise AttributeError(f"module 'sddmesh' has no attribute '{name}'")
    return getattr(importlib.import_module(f".{mod}", __name__), name)
