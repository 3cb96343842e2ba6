"""Command-line front end.

Commands: ``single``, ``stochastic-full``, ``sdd``, ``quality`` and ``bench``.
Exit status is 0 on success, 1 for invalid options and 2 for runtime or
numerical failures.
"""
from __future__ import annotations

import argparse
import inspect
import os
import sys
import time
import traceback
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigError

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2
COMMANDS = ("single", "stochastic-full", "sdd", "quality", "bench")
STOCHASTIC = ("stochastic-full", "sdd", "bench")
DECOMPOSED = ("sdd", "bench")


@dataclass(frozen=True)
class RunConfig:
    command: str
    monitor: str = "running"
    params: dict = field(default_factory=dict)
    nx: int = 29
    ny: int = 29
    sub_x: int | None = None
    sub_y: int | None = None
    scheme: str | None = None       # "linear" or "exponential"
    step: float | None = None       # dt or lambda
    walks: int | None = None
    placement: str | None = None    # "all", "equispaced" or "optimal"
    k: int | None = None            # equispaced point count
    smooth_scope: str = "global"
    smooth_steps: int = 0
    smooth_k: float = 1000.0
    smooth_dt: float = 1e-4
    interface_smoothing: bool = False
    span: int = 5
    seed: int | None = None
    threads: int | None = None
    reference: str | None = None    # "single" or a mesh file path
    mesh: str | None = None         # input mesh for the quality command
    out: str | None = None
    csv: str | None = None
    svg: str | None = None
    tol: float = 1e-8
    max_steps: int = 10_000_000

    def validate(self) -> "RunConfig":
        """Check every field before any computation; returns a copy with defaults filled in."""
        from .monitor import BUILTINS

        c = self
        if c.command not in COMMANDS:
            raise ConfigError(f"unknown command '{c.command}'")
        if c.monitor not in BUILTINS:
            raise ConfigError(f"unknown monitor '{c.monitor}' (choose from {', '.join(sorted(BUILTINS))})")
        sig = inspect.signature(BUILTINS[c.monitor])
        if not any(p.kind == p.VAR_KEYWORD for p in sig.parameters.values()):
            bad = set(c.params) - (set(sig.parameters) - {"domain"})
            if bad:
                raise ConfigError(f"monitor '{c.monitor}' has no parameter(s) {', '.join(sorted(bad))}")
        if c.command != "quality" and (c.nx < 3 or c.ny < 3):
            raise ConfigError(f"grid must be at least 3x3, got {c.nx}x{c.ny}")
        if c.tol <= 0:
            raise ConfigError("--tol must be positive")
        if c.threads is not None and c.threads < 1:
            raise ConfigError("--threads must be >= 1")

        stochastic = c.command in STOCHASTIC
        decomposed = c.command in DECOMPOSED
        if not stochastic:
            for name, v in (("--scheme", c.scheme), ("--walks", c.walks)):
                if v is not None:
                    raise ConfigError(f"{name} only applies to stochastic-full, sdd and bench")
        if not decomposed:
            for name, v in (("--subdomains", c.sub_x), ("--placement", c.placement)):
                if v is not None:
                    raise ConfigError(f"{name} only applies to sdd and bench")
            if c.interface_smoothing:
                raise ConfigError("--interface-smoothing only applies to sdd and bench")
            if c.smooth_scope == "per-subdomain":
                raise ConfigError("per-subdomain smoothing needs sdd or bench")
        if decomposed and c.seed is None:
            raise ConfigError(f"{c.command} requires --seed")
        if stochastic:
            c = replace(c, scheme=c.scheme or "exponential", step=c.step if c.step is not None else 1000.0,
                        walks=c.walks if c.walks is not None else 1000,
                        seed=c.seed if c.seed is not None else 0)
            if not c.step > 0:
                raise ConfigError("time step / lambda must be positive")
            if c.walks < 1:
                raise ConfigError("--walks must be >= 1")
            if c.max_steps < 1:
                raise ConfigError("--max-steps must be >= 1")
        if decomposed:
            c = replace(c, sub_x=c.sub_x or 2, sub_y=c.sub_y or 2, placement=c.placement or "all")
            for axis, n, s in (("x", c.nx, c.sub_x), ("y", c.ny, c.sub_y)):
                if s < 1 or (n - 1) % s or (n - 1) // s < 2:
                    raise ConfigError(f"{n} nodes along {axis} cannot be split into {s} subdomains "
                                      f"(need (n-1) divisible by the count, >= 2 cells each)")
            if c.placement == "equispaced":
                line = min(c.nx if c.sub_y > 1 else c.ny, c.ny if c.sub_x > 1 else c.nx)
                if c.k is None or not 1 <= c.k <= line - 2:
                    raise ConfigError(f"equispaced:k needs 1 <= k <= {line - 2}")
            if c.interface_smoothing and (c.span % 2 == 0 or c.span < 3 or c.span > min(c.nx, c.ny)):
                raise ConfigError(f"--span must be odd with 3 <= span <= {min(c.nx, c.ny)}")
        if c.smooth_steps < 0 or c.smooth_k <= 0 or c.smooth_dt <= 0:
            raise ConfigError("smoothing needs steps >= 0, k > 0 and dt > 0")
        if c.command == "quality":
            if c.mesh is None:
                raise ConfigError("quality requires --mesh")
            if c.reference is None:
                raise ConfigError("quality requires --reference (single or a mesh file)")
            if not Path(c.mesh).is_file():
                raise ConfigError(f"mesh file {c.mesh} does not exist")
        if c.command == "bench" and c.reference is None:
            c = replace(c, reference="single")
        if c.reference not in (None, "single") and not Path(c.reference).is_file():
            raise ConfigError(f"reference mesh file {c.reference} does not exist")
        for name in ("out", "csv", "svg"):
            p = getattr(c, name)
            if p is not None and not Path(p).resolve().parent.is_dir():
                raise ConfigError(f"--{name}: directory of {p} does not exist")
        return c


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _pair(text: str, what: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise ConfigError(f"{what} must look like NXxNY, got '{text}'") from None


def _scheme(text: str) -> tuple[str, float]:
    name, _, val = text.partition(":")
    if name not in ("linear", "exponential") or not val:
        raise ConfigError(f"--scheme must be linear:DT or exponential:LAMBDA, got '{text}'")
    try:
        return name, float(val)
    except ValueError:
        raise ConfigError(f"--scheme value '{val}' is not a number") from None


def _placement(text: str) -> tuple[str, int | None]:
    if text in ("all", "optimal"):
        return text, None
    name, _, k = text.partition(":")
    if name == "equispaced" and k.isdigit():
        return name, int(k)
    raise ConfigError(f"--placement must be all, optimal or equispaced:K, got '{text}'")


def _params(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"--param expects key=value, got '{item}'")
        if val.lower() in ("true", "false"):
            out[key] = val.lower() == "true"
            continue
        try:
            out[key] = float(val)
        except ValueError:
            raise ConfigError(f"--param {key}: '{val}' is not a number") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sddmesh", description="Adaptive mesh generation with stochastic domain decomposition.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "single": "deterministic single-domain mesh",
        "stochastic-full": "Monte Carlo estimate at every grid node",
        "sdd": "stochastic domain decomposition",
        "quality": "compare a mesh file with a reference",
        "bench": "decomposition timing study against the single-domain solve",
    }
    for name in COMMANDS:
        s = sub.add_parser(name, help=helps[name])
        s.add_argument("--monitor", default="running", help="monitor name (default: running)")
        s.add_argument("--param", action="append", metavar="KEY=VALUE", help="monitor parameter override")
        s.add_argument("--grid", default="29x29", help="grid nodes NXxNY (default 29x29)")
        s.add_argument("--threads", type=int, help="worker threads (default: all)")
        s.add_argument("--seed", type=int, help="random seed (required for sdd and bench)")
        s.add_argument("--tol", type=float, default=1e-8, help="Jacobi tolerance")
        s.add_argument("--reference", help="'single' or a mesh file to compare against")
        s.add_argument("--out", help="mesh file to write")
        s.add_argument("--csv", help="CSV report to write")
        s.add_argument("--svg", help="SVG drawing to write")
        s.add_argument("--smooth", choices=("global", "per-subdomain"), default="global",
                       help="Perona-Malik scope")
        s.add_argument("--smooth-steps", type=int, default=0, help="Perona-Malik steps m (default 0)")
        s.add_argument("--smooth-k", type=float, default=1000.0)
        s.add_argument("--smooth-dt", type=float, default=1e-4)
        if name in STOCHASTIC:
            s.add_argument("--scheme", help="linear:DT or exponential:LAMBDA (default exponential:1000)")
            s.add_argument("--walks", type=int, help="walks per point (default 1000)")
            s.add_argument("--max-steps", type=int, default=10_000_000)
        if name in DECOMPOSED:
            s.add_argument("--subdomains", help="subdomain counts SXxSY (default 2x2)")
            s.add_argument("--placement", help="all | equispaced:K | optimal (default all)")
            s.add_argument("--interface-smoothing", action="store_true",
                           help="loess-smooth interface values before the subdomain solves")
            s.add_argument("--span", type=int, default=5, help="loess window (odd, default 5)")
        if name == "quality":
            s.add_argument("--mesh", required=True, help="mesh file to assess")
    return p


def config_from_args(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    nx, ny = _pair(ns.grid, "--grid")
    kw = dict(command=ns.command, monitor=ns.monitor, params=_params(ns.param), nx=nx, ny=ny,
              threads=ns.threads, seed=ns.seed, tol=ns.tol, reference=ns.reference, out=ns.out,
              csv=ns.csv, svg=ns.svg, smooth_scope=ns.smooth, smooth_steps=ns.smooth_steps,
              smooth_k=ns.smooth_k, smooth_dt=ns.smooth_dt)
    if ns.command in STOCHASTIC:
        if ns.scheme is not None:
            kw["scheme"], kw["step"] = _scheme(ns.scheme)
        kw["walks"] = ns.walks
        kw["max_steps"] = ns.max_steps
    if ns.command in DECOMPOSED:
        if ns.subdomains is not None:
            kw["sub_x"], kw["sub_y"] = _pair(ns.subdomains, "--subdomains")
        if ns.placement is not None:
            kw["placement"], kw["k"] = _placement(ns.placement)
        kw["interface_smoothing"] = ns.interface_smoothing
        kw["span"] = ns.span
    if ns.command == "quality":
        kw["mesh"] = ns.mesh
    return RunConfig(**kw)


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------


@dataclass
class RunOutcome:
    solution: object = None
    mesh: object = None
    quality: object = None
    timing: object = None
    rows: list = field(default_factory=list)
    warnings: list = field(default_factory=list)


def _configure_threads(threads: int | None) -> int:
    # numba sizes its pool from the environment when first imported
    if threads is not None and threads >= 1 and "numba" not in sys.modules:
        os.environ["NUMBA_NUM_THREADS"] = str(threads)
    from .sde import set_threads
    return set_threads(threads)


def run(cfg: RunConfig, echo=print) -> RunOutcome:
    """Execute a validated configuration and write the requested artifacts."""
    threads = _configure_threads(cfg.threads)

    from .decomposition import (build_layout, plan_interface_points, solve_fully_stochastic,
                                solve_sdd)
    from .detsolver import SolverConfig, solve_single_domain
    from .domain import GridSpec, invert_mesh
    from .monitor import from_name
    from .output import QUALITY_COLUMNS, TIMING_COLUMNS, read_mesh, render_svg, write_csv, write_mesh
    from .quality import quality_report
    from .report import TimingReport, sdd_speedup
    from .sde import WalkConfig
    from .smoothing import SmoothConfig, perona_malik

    monitor = from_name(cfg.monitor, **cfg.params)
    out = RunOutcome()

    if cfg.command == "quality":
        mf = read_mesh(cfg.mesh)
        mesh = mf.mesh
        if cfg.reference == "single":
            grid = GridSpec(mesh.m_xi, mesh.m_eta, monitor.domain)
            ref = invert_mesh(solve_single_domain(monitor, grid, SolverConfig(cfg.tol)))
        else:
            ref = read_mesh(cfg.reference).mesh
        out.mesh = mesh
        out.quality = quality_report(mesh, ref, monitor)
        out.rows.append({**_quality_row(out.quality)})
        if cfg.csv:
            write_csv(out.rows, QUALITY_COLUMNS, cfg.csv)
        if cfg.svg:
            render_svg(mesh, cfg.svg, monitor.domain)
        echo(_summary(cfg, out))
        return out

    grid = GridSpec(cfg.nx, cfg.ny, monitor.domain)
    solver_cfg = SolverConfig(cfg.tol)
    smooth = SmoothConfig(cfg.smooth_k, cfg.smooth_dt, cfg.smooth_steps, cfg.smooth_scope)
    walk = None
    if cfg.command in STOCHASTIC:
        walk = WalkConfig(cfg.scheme, cfg.step, cfg.walks, cfg.seed, max_steps=cfg.max_steps)

    layout = None
    t_stoc = t_sub = 0.0
    if cfg.command == "single":
        t0 = time.perf_counter()
        sol = solve_single_domain(monitor, grid, solver_cfg)
        t_sub = time.perf_counter() - t0
    elif cfg.command == "stochastic-full":
        res = solve_fully_stochastic(monitor, grid, walk)
        sol, t_stoc = res.solution, res.t_stoc
        out.warnings += res.warnings
    else:
        layout = build_layout(None, grid, cfg.sub_x, cfg.sub_y)
        plan = plan_interface_points(cfg.placement, monitor, layout, k=cfg.k)
        res = solve_sdd(monitor, grid, layout, plan, walk, solver_cfg,
                        interface_span=cfg.span if cfg.interface_smoothing else None)
        sol, t_stoc, t_sub = res.solution, res.t_stoc, res.t_sub
        out.warnings += res.warnings

    t0 = time.perf_counter()
    sol = perona_malik(sol, smooth, layout)
    t_smooth = time.perf_counter() - t0 if cfg.smooth_steps else 0.0
    mesh = invert_mesh(sol)

    ref = None
    t_1 = None
    if cfg.reference == "single":
        t0 = time.perf_counter()
        ref_sol = solve_single_domain(monitor, grid, solver_cfg)
        t_1 = time.perf_counter() - t0
        # compare against an equally smoothed deterministic mesh
        ref = invert_mesh(perona_malik(ref_sol, smooth, layout))
    elif cfg.reference is not None:
        ref = read_mesh(cfg.reference).mesh

    out.solution, out.mesh = sol, mesh
    out.quality = quality_report(mesh, ref, monitor if ref is not None else None)
    s_p = sdd_speedup(res, t_1, threads) if (cfg.command in DECOMPOSED and t_1) else None
    out.timing = TimingReport(t_stoc, t_sub, t_smooth, t_1, s_p)

    row = _quality_row(out.quality)
    if walk is not None:
        row["n"] = walk.walks
        row["lambda" if walk.scheme == "exponential" else "dt"] = walk.step
    out.rows.append(row)

    if cfg.out:
        write_mesh(mesh, sol, cfg.out)
    if cfg.svg:
        render_svg(mesh, cfg.svg, monitor.domain)
    if cfg.csv:
        if cfg.command == "bench":
            trow = {**row, **out.timing.as_row(), "monitor": cfg.monitor, "grid": f"{cfg.nx}x{cfg.ny}",
                    "subdomains": f"{cfg.sub_x}x{cfg.sub_y}",
                    "placement": cfg.placement if cfg.k is None else f"equispaced:{cfg.k}",
                    "walks": walk.walks, "mc_points": res.mc_points}
            write_csv([trow], TIMING_COLUMNS, cfg.csv)
        else:
            write_csv(out.rows, QUALITY_COLUMNS, cfg.csv)
    echo(_summary(cfg, out))
    return out


def _quality_row(q) -> dict:
    return {"l_inf": q.l_inf, "q_max": q.q_max, "q_mean": q.q_mean, "r_max": q.r_max, "r_mean": q.r_mean}


def _summary(cfg: RunConfig, out: RunOutcome) -> str:
    q = out.quality
    parts = [f"{cfg.command}: q_max={q.q_max:.4f} q_mean={q.q_mean:.4f}"]
    if q.r_max is not None:
        parts.append(f"r_max={q.r_max:.4f} r_mean={q.r_mean:.4f}")
    if q.l_inf is not None:
        parts.append(f"l_inf={q.l_inf:.4g}")
    t = out.timing
    if t is not None:
        parts.append(f"t_stoc={t.t_stoc:.3f}s t_sub={t.t_sub:.3f}s t_total={t.t_total:.3f}s")
        if t.t_1 is not None:
            parts.append(f"t_1={t.t_1:.3f}s")
        if t.s_p is not None:
            parts.append(f"S_p={t.s_p:.2f}")
    return " ".join(parts)


def _origin(exc: BaseException) -> str:
    """Package module where ``exc`` was raised (innermost frame inside sddmesh)."""
    name = "sddmesh"
    for frame, _ in traceback.walk_tb(exc.__traceback__):
        mod = frame.f_globals.get("__name__", "")
        if mod.startswith("sddmesh."):
            name = mod
    return name.replace("sddmesh.", "")


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = config_from_args(argv)
        if cfg.threads is not None and cfg.threads >= 1 and "numba" not in sys.modules:
            os.environ["NUMBA_NUM_THREADS"] = str(cfg.threads)
        cfg = cfg.validate()
    except ConfigError as e:
        print(f"sddmesh: error: {e}", file=sys.stderr)
        return EXIT_INVALID
    try:
        run(cfg)
    except ConfigError as e:
        print(f"sddmesh: error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as e:  # noqa: BLE001 - report any failure with its origin
        print(f"sddmesh: {cfg.command} failed ({_origin(e)}.{type(e).__name__}): {e}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
