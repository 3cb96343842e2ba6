"""Timing summaries and the decomposition speedup model."""
from __future__ import annotations

from dataclasses import dataclass


def speedup_model(p: int, k: float, n_x: int, n_y: int, t_mc: float, t_1: float) -> float:
    """Modelled speedup ``p / (1 + k (n_x + n_y) t_mc / t_1)`` on ``p`` processors.

    ``k`` is the number of Monte Carlo points per interface line, ``n_x`` and
    ``n_y`` the number of interface lines per direction, ``t_mc`` the serial
    cost of one Monte Carlo point and ``t_1`` the single-domain solve time.
    """
    if p < 1 or k < 0 or n_x < 0 or n_y < 0 or t_mc < 0 or not t_1 > 0:
        raise ValueError("speedup_model needs p >= 1, non-negative k, n_x, n_y, t_mc and t_1 > 0")
    return p / (1.0 + k * (n_x + n_y) * t_mc / t_1)


@dataclass(frozen=True)
class TimingReport:
    t_stoc: float
    t_sub: float
    t_smooth: float = 0.0
    t_1: float | None = None
    s_p: float | None = None

    @property
    def t_total(self) -> float:
        return self.t_stoc + self.t_sub + self.t_smooth

    def as_row(self) -> dict:
        return {"t_stoc": self.t_stoc, "t_sub": self.t_sub, "t_smooth": self.t_smooth,
                "t_total": self.t_total, "t_1": self.t_1, "s_p": self.s_p}


def sdd_speedup(result, t_1: float, threads: int = 1) -> float | None:
    """Speedup model evaluated from a decomposition run.

    The per-point cost is the interface time times the worker count over the
    number of Monte Carlo points, i.e. an estimate of the serial cost.
    """
    layout = result.layout
    n_x, n_y = layout.n_sub_x - 1, layout.n_sub_y - 1
    p = layout.n_sub_x * layout.n_sub_y
    if result.mc_points == 0:
        return float(p)
    if not t_1 > 0:
        return None
    t_mc = result.t_stoc * threads / result.mc_points
    k = result.mc_points / (n_x + n_y)
    return speedup_model(p, k, n_x, n_y, t_mc, t_1)
