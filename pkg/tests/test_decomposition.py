import numpy as np
import pytest

from sddmesh.decomposition import (_block_boundary, build_layout, dedupe, equispaced_indices,
                                   plan_interface_points, solve_fully_stochastic, solve_interfaces,
                                   solve_sdd, strict_extrema)
from sddmesh.detsolver import SolverConfig, build_boundary_data, solve_single_domain
from sddmesh.domain import GridSpec, RectDomain, invert_mesh
from sddmesh.errors import LayoutError
from sddmesh.monitor import constant, running_example
from sddmesh.quality import l_inf_error
from sddmesh.sde import WalkConfig


def test_layout_29_by_2x2():
    g = GridSpec(29, 29)
    lay = build_layout(g.domain, g, 2, 2)
    assert len(lay.subdomains) == 4
    assert all(s.grid.nx == 15 and s.grid.ny == 15 for s in lay.subdomains)
    assert {(ln.orientation, ln.index) for ln in lay.lines} == {("vertical", 14), ("horizontal", 14)}
    covered = np.zeros(g.shape, dtype=int)
    for s in lay.subdomains:
        covered[s.index_slice] += 1
    assert covered.min() == 1 and covered[14, 14] == 4  # shared nodes counted per block
    X, Y = g.meshgrid()
    for ln in lay.lines:
        pts = ln.points()
        ids = ln.global_nodes(g)
        np.testing.assert_array_equal(pts[:, 0], X.ravel()[ids])
        np.testing.assert_array_equal(pts[:, 1], Y.ravel()[ids])


def test_layout_157_by_4x4_and_1x1():
    g = GridSpec(157, 157, RectDomain(-1, 1, -1, 1))
    lay = build_layout(None, g, 4, 4)
    assert len(lay.subdomains) == 16 and len(lay.lines) == 6
    assert all(s.grid.shape == (40, 40) for s in lay.subdomains)
    one = build_layout(None, g, 1, 1)
    assert one.lines == () and one.subdomains[0].grid == g


def test_layout_errors_name_the_axis():
    with pytest.raises(LayoutError, match="y"):
        build_layout(None, GridSpec(29, 30), 2, 2)
    with pytest.raises(LayoutError, match="x"):
        build_layout(None, GridSpec(30, 29), 2, 2)


def test_equispaced_rule():
    idx = equispaced_indices(29, 7)
    assert list(idx) == [4, 7, 11, 14, 18, 21, 25]
    assert len(equispaced_indices(157, 7)) == 7
    with pytest.raises(ValueError):
        equispaced_indices(5, 4)


def test_extrema_and_dedupe_helpers():
    assert list(strict_extrema([0, 1, 0, 0, -1, 0])) == [1, 4]
    assert list(strict_extrema([0, 1, 1, 0])) == []  # plateau is not strict
    assert list(dedupe([5, 3, 4, 9, 10])) == [3, 5, 9]


def test_plan_counts_running_example():
    g = GridSpec(29, 29)
    lay = build_layout(None, g, 2, 2)
    m = running_example()
    opt = plan_interface_points("optimal", m, lay)
    # junction at index 14 is always included
    assert [len(v) for v in opt.mc_nodes] == [5, 6]
    assert all(14 in v for v in opt.mc_nodes)
    eq = plan_interface_points("equispaced", m, lay, k=7)
    assert [len(v) for v in eq.mc_nodes] == [7, 7]
    al = plan_interface_points("all", m, lay)
    assert [len(v) for v in al.mc_nodes] == [27, 27]
    for v in opt.mc_nodes + eq.mc_nodes + al.mc_nodes:
        assert v.min() > 0 and v.max() < 28  # endpoints stay anchors


def test_constant_monitor_falls_back_to_midpoint():
    g = GridSpec(29, 29)
    plan = plan_interface_points("optimal", constant(), build_layout(None, g, 2, 1))
    assert [list(v) for v in plan.mc_nodes] == [[14]]


def test_flat_interfaces_carry_coordinates():
    g = GridSpec(29, 29)
    lay = build_layout(None, g, 2, 1)
    m = constant()
    bd = build_boundary_data(m, g)
    plan = plan_interface_points("all", m, lay)
    iv = solve_interfaces(plan, m, bd, WalkConfig.exponential(1e3, 4000, seed=1))
    idx = plan.mc_nodes[0]
    assert np.all(np.abs(iv.xi[0][idx] - 0.5) <= 3.5 * iv.stderr_xi[0][idx])
    assert np.all(np.abs(iv.eta[0][idx] - g.y[idx]) <= 4 * iv.stderr_eta[0][idx])
    assert np.isnan(iv.stderr_xi[0][0]) and iv.xi[0][0] == 0.5 and iv.eta[0][-1] == 1.0
    assert iv.mc_points == 27


def test_interpolation_between_known_nodes():
    g = GridSpec(29, 29)
    lay = build_layout(None, g, 1, 2)
    m = running_example()
    bd = build_boundary_data(m, g)
    plan = plan_interface_points("equispaced", m, lay, k=3)
    iv = solve_interfaces(plan, m, bd, WalkConfig.exponential(1e3, 200, seed=1))
    line, xi = lay.lines[0], iv.xi[0]
    known = np.concatenate(([0], plan.mc_nodes[0], [28]))
    np.testing.assert_allclose(xi, np.interp(line.s, line.s[known], xi[known]), atol=1e-15)


@pytest.mark.invariant
def test_shared_lines_get_identical_values_and_one_solve_per_block():
    g = GridSpec(29, 29)
    lay = build_layout(None, g, 2, 2)
    m = running_example()
    res = solve_sdd(m, g, lay, plan_interface_points("optimal", m, lay), WalkConfig.exponential(1e3, 300, seed=2))
    assert res.subdomain_solves == 4
    bd = build_boundary_data(m, g)
    subs = {(s.a, s.b): s for s in lay.subdomains}
    for which in ("xi", "eta"):
        left = _block_boundary(subs[0, 0], lay, bd, res.interfaces, which)
        right = _block_boundary(subs[1, 0], lay, bd, res.interfaces, which)
        top = _block_boundary(subs[0, 1], lay, bd, res.interfaces, which)
        assert np.array_equal(left["right"], right["left"])
        assert np.array_equal(left["top"], top["bottom"])
    # the assembled field on an interface is the interface table itself
    np.testing.assert_array_equal(res.solution.xi.values[:, 14], res.interfaces.xi[0])


@pytest.mark.invariant
def test_1x1_layout_is_bit_exact():
    g = GridSpec(29, 29)
    m = running_example()
    lay = build_layout(None, g, 1, 1)
    res = solve_sdd(m, g, lay, plan_interface_points("optimal", m, lay), WalkConfig())
    ref = solve_single_domain(m, g)
    assert np.array_equal(res.solution.xi.values, ref.xi.values)
    assert np.array_equal(res.solution.eta.values, ref.eta.values)
    assert res.t_stoc == 0.0 and res.mc_points == 0 and res.subdomain_solves == 1


def test_flat_sdd_matches_single_domain():
    g = GridSpec(29, 29)
    m = constant()
    lay = build_layout(None, g, 2, 2)
    res = solve_sdd(m, g, lay, plan_interface_points("all", m, lay), WalkConfig.exponential(1e3, 10_000, seed=3),
                    SolverConfig(tol=1e-10))
    X, Y = g.meshgrid()
    # interface nodes within 4 stderr of the exact coordinate, blocks exact given them
    for ln, sx, xi in zip(lay.lines, res.interfaces.stderr_xi, res.interfaces.xi):
        ok = ~np.isnan(sx)
        truth = np.full(ln.n, ln.coord) if ln.orientation == "vertical" else ln.s
        assert np.all(np.abs(xi[ok] - truth[ok]) <= 4 * sx[ok])
    assert np.max(np.abs(res.solution.xi.values - X)) <= 4 * max(np.nanmax(s) for s in res.interfaces.stderr_xi)


@pytest.mark.invariant
def test_all_points_beat_interpolation():
    g = GridSpec(29, 29)
    m = running_example()
    lay = build_layout(None, g, 2, 2)
    ref = invert_mesh(solve_single_domain(m, g))
    cfg = WalkConfig.exponential(1e3, 4000, seed=1)
    err = {}
    for name, k in (("all", None), ("equispaced", 7)):
        res = solve_sdd(m, g, lay, plan_interface_points(name, m, lay, k=k), cfg)
        err[name] = l_inf_error(invert_mesh(res.solution), ref, m)
    assert err["all"] <= err["equispaced"]


def test_fully_stochastic_keeps_boundary_and_reports_stderr():
    g = GridSpec(9, 9)
    m = constant()
    res = solve_fully_stochastic(m, g, WalkConfig.exponential(1e3, 2000, seed=1))
    X, Y = g.meshgrid()
    xi = res.solution.xi.values
    np.testing.assert_array_equal(xi[:, 0], 0.0)
    np.testing.assert_allclose(xi[0], X[0], atol=1e-12)
    assert np.all(res.stderr_xi[0] == 0) and np.all(res.stderr_xi[1:-1, 1:-1] > 0)
    assert np.all(np.abs(xi - X)[1:-1, 1:-1] <= 4.5 * res.stderr_xi[1:-1, 1:-1])
