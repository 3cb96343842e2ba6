"""Acceptance criteria 1-12, each reported as one PASS/FAIL line in the summary.

Statistical criteria run seeds 1, 2 and 3 and require the bound for every seed.
Run only these with ``pytest tests/test_acceptance.py``.
"""
import hashlib
import math
import os
import subprocess
import sys
import time
from functools import lru_cache

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from sddmesh.decomposition import build_layout, plan_interface_points, solve_fully_stochastic, solve_sdd
from sddmesh.detsolver import build_boundary_data, solve_single_domain
from sddmesh.domain import GridSpec, invert_mesh
from sddmesh.monitor import constant, five_ring, mackenzie, running_example
from sddmesh.quality import l_inf_error, quality_report
from sddmesh.sde import WalkConfig, mc_estimate
from sddmesh.smoothing import SmoothConfig, perona_malik

SEEDS = (1, 2, 3)
G29 = GridSpec(29, 29)


def record(n: int, ok: bool, detail: str):
    ACCEPTANCE_LINES.append(f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


@lru_cache(maxsize=None)
def reference(name: str):
    m = {"running": running_example, "mackenzie": mackenzie}[name]()
    sol = solve_single_domain(m, G29)
    return m, sol, invert_mesh(sol)


def sdd_mesh(name, placement, lam, seed, k=None):
    m, _, _ = reference(name)
    lay = build_layout(None, G29, 2, 2)
    plan = plan_interface_points(placement, m, lay, k=k)
    res = solve_sdd(m, G29, lay, plan, WalkConfig.exponential(lam, 10_000, seed=seed))
    return res, invert_mesh(res.solution)


def test_1_harmonic_exactness():
    t0 = time.perf_counter()
    sol = solve_single_domain(constant(), G29)
    X, Y = G29.meshgrid()
    err = max(np.abs(sol.xi.values - X).max(), np.abs(sol.eta.values - Y).max())
    q = quality_report(invert_mesh(sol))
    dt = time.perf_counter() - t0
    ok = err <= 1e-7 and abs(q.q_max - 1) <= 1e-9 and abs(q.q_mean - 1) <= 1e-9
    record(1, ok, f"max|xi-x|,|eta-y| = {err:.2e} (<= 1e-7), Q_max-1 = {q.q_max - 1:.1e}, "
                  f"Q_mean-1 = {q.q_mean - 1:.1e} (<= 1e-9), {dt:.2f}s")


def test_2_mc_harmonic_value():
    m = constant()
    bd = build_boundary_data(m, G29)
    parts, ok = [], True
    for seed in SEEDS:
        r = mc_estimate((0.5, 0.5), m, bd, WalkConfig.linear(1e-4, 10_000, seed=seed))
        freqs = r.edge_frequencies()
        good = (abs(r.xi - 0.5) <= 3 * r.stderr_xi and r.stderr_xi <= 0.01
                and all(abs(f - 0.25) <= 0.02 for f in freqs.values()))
        ok &= good
        parts.append(f"seed {seed}: xi={r.xi:.4f}+-{r.stderr_xi:.4f}, edges "
                     + "/".join(f"{f:.3f}" for f in freqs.values()))
    record(2, ok, "; ".join(parts))


def test_3_reference_quality():
    _, _, mesh = reference("running")
    q = quality_report(mesh)
    ok = abs(q.q_max - 1.8) <= 0.1 and abs(q.q_mean - 1.16) <= 0.03
    record(3, ok, f"Q_max={q.q_max:.3f} (1.8+-0.1), Q_mean={q.q_mean:.3f} (1.16+-0.03)")


@pytest.mark.slow
def test_4_fully_probabilistic_ratios():
    m, _, ref = reference("running")
    parts, ok = [], True
    for seed in SEEDS:
        res = solve_fully_stochastic(m, G29, WalkConfig.exponential(1000.0, 10_000, seed=seed))
        q = quality_report(invert_mesh(res.solution), ref, m)
        ok &= q.r_max >= 0.85 and q.r_mean >= 0.95
        parts.append(f"seed {seed}: R_max={q.r_max:.3f} R_mean={q.r_mean:.3f}")
    record(4, ok, "; ".join(parts) + " (need >= 0.85 / 0.95)")


@pytest.mark.slow
def test_5_sdd_fidelity():
    m, _, ref = reference("running")
    parts, ok = [], True
    for seed in SEEDS:
        t0 = time.perf_counter()
        _, mesh = sdd_mesh("running", "all", 1e4, seed)
        q = quality_report(mesh, ref, m)
        ok &= q.r_max >= 0.97 and q.r_mean >= 0.99
        parts.append(f"seed {seed}: R_max={q.r_max:.3f} R_mean={q.r_mean:.4f} ({time.perf_counter() - t0:.0f}s)")
    record(5, ok, "; ".join(parts) + " (need >= 0.97 / 0.99)")


@pytest.mark.slow
def test_6_mackenzie_lambda_trend():
    m, _, ref = reference("mackenzie")
    parts, ok = [], True
    for seed in SEEDS:
        r = {lam: quality_report(sdd_mesh("mackenzie", "all", lam, seed)[1], ref, m).r_mean for lam in (1e3, 1e4)}
        ok &= r[1e4] >= r[1e3] - 0.01 and r[1e4] >= 0.97
        parts.append(f"seed {seed}: R_mean {r[1e3]:.4f} -> {r[1e4]:.4f}")
    record(6, ok, "; ".join(parts) + " (need non-decreasing within 0.01 and >= 0.97)")


@pytest.mark.slow
def test_7_placement_superiority():
    m, _, ref = reference("running")
    parts, ok = [], True
    for seed in SEEDS:
        opt = l_inf_error(sdd_mesh("running", "optimal", 1e4, seed)[1], ref, m)
        eq = l_inf_error(sdd_mesh("running", "equispaced", 1e4, seed, k=7)[1], ref, m)
        ok &= opt / eq <= 0.5
        parts.append(f"seed {seed}: l_inf {opt:.3f} / {eq:.3f} = {opt / eq:.3f}")
    record(7, ok, "; ".join(parts) + " (need <= 0.5)")


@pytest.mark.slow
def test_8_smoothing_recovery():
    m, sol, _ = reference("running")
    parts, ok = [], True
    for seed in SEEDS:
        noisy = solve_fully_stochastic(m, G29, WalkConfig.exponential(1000.0, 1000, seed=seed)).solution
        r = {}
        for steps in (1, 5, 10):
            cfg = SmoothConfig(k=1000.0, dt=1e-4, steps=steps)
            q = quality_report(invert_mesh(perona_malik(noisy, cfg)), invert_mesh(perona_malik(sol, cfg)), m)
            r[steps] = q.r_max
        ok &= r[5] >= r[1] - 0.05 and r[10] >= r[5] - 0.05 and r[10] >= 0.90
        parts.append(f"seed {seed}: R_max m=1/5/10 {r[1]:.3f}/{r[5]:.3f}/{r[10]:.3f}")
    record(8, ok, "; ".join(parts) + " (need non-decreasing within 0.05, m=10 >= 0.90)")


@pytest.mark.slow
def test_9_exit_test_equivalence():
    m = constant()
    bd = build_boundary_data(m, G29)
    cfgs = {"linear 1e-3 + bridge": lambda s: WalkConfig.linear(1e-3, 10_000, seed=s),
            "linear 1e-5": lambda s: WalkConfig.linear(1e-5, 10_000, seed=s, bridge=False),
            "exponential 1e4": lambda s: WalkConfig.exponential(1e4, 10_000, seed=s)}
    parts, ok = [], True
    for seed in SEEDS:
        est = {name: mc_estimate((0.3, 0.7), m, bd, make(seed)) for name, make in cfgs.items()}
        worst = 0.0
        names = list(est)
        for i in range(3):
            for j in range(i + 1, 3):
                a, b = est[names[i]], est[names[j]]
                for va, vb, sa, sb in ((a.xi, b.xi, a.stderr_xi, b.stderr_xi),
                                       (a.eta, b.eta, a.stderr_eta, b.stderr_eta)):
                    worst = max(worst, abs(va - vb) / math.hypot(sa, sb))
        ok &= worst <= 3.0
        parts.append(f"seed {seed}: xi " + "/".join(f"{e.xi:.4f}" for e in est.values())
                     + f", worst |diff|/combined stderr {worst:.2f}")
    record(9, ok, "; ".join(parts) + " (need <= 3)")


def _cli_hash(tmp_path, threads):
    out = tmp_path / f"mesh_{threads}.txt"
    cmd = [sys.executable, "-m", "sddmesh", "sdd", "--monitor", "running", "--grid", "29x29",
           "--subdomains", "2x2", "--walks", "10000", "--scheme", "exponential:1000", "--placement", "optimal",
           "--seed", "7", "--threads", str(threads), "--out", str(out)]
    env = dict(os.environ)
    env.pop("NUMBA_NUM_THREADS", None)
    subprocess.run(cmd, check=True, capture_output=True, env=env, timeout=600)
    return hashlib.sha256(out.read_bytes()).hexdigest()


@pytest.mark.slow
def test_10_thread_determinism(tmp_path):
    t0 = time.perf_counter()
    h1 = _cli_hash(tmp_path, 1)
    h8 = _cli_hash(tmp_path, 8)
    record(10, h1 == h8, f"sha256 1 thread {h1[:16]}, 8 threads {h8[:16]} ({time.perf_counter() - t0:.0f}s "
                         f"for both runs incl. compilation)")


@pytest.mark.slow
def test_11_performance_trends():
    m = five_ring()
    t = {}
    for n in (77, 157):
        g = GridSpec(n, n, m.domain)
        t0 = time.perf_counter()
        solve_single_domain(m, g)
        t_1 = time.perf_counter() - t0
        lay = build_layout(None, g, 4, 4)
        res = solve_sdd(m, g, lay, plan_interface_points("optimal", m, lay),
                        WalkConfig.exponential(1000.0, 5000, seed=1))
        t[n] = (t_1, res.t_stoc, res.t_total)
    stoc_ratio = t[157][1] / t[77][1]
    t1_ratio = t[157][0] / t[77][0]
    cores = len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count()
    faster = t[157][2] < t[157][0]
    ok = stoc_ratio <= 1.5 and t1_ratio >= 4 and faster
    record(11, ok, f"t_stoc ratio {stoc_ratio:.2f} (<= 1.5), t_1 ratio {t1_ratio:.1f} (>= 4), "
                   f"t_total(157)={t[157][2]:.2f}s vs t_1(157)={t[157][0]:.2f}s on {cores} core(s) "
                   f"(criterion asks for >= 4 cores)")


@pytest.mark.slow
def test_12_invariant_suites():
    here = os.path.dirname(__file__)
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-m", "invariant", "-p", "no:cacheprovider",
                           here, "--ignore", os.path.join(here, "test_acceptance.py")],
                          capture_output=True, text=True, timeout=3600)
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    record(12, proc.returncode == 0, f"pytest -m invariant: {tail}")
