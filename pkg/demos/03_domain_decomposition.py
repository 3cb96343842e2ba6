# Stochastic domain decomposition.
#
# Only the interface lines between subdomains are computed by Monte Carlo.
# Every subdomain is then solved once, independently, with those values as
# Dirichlet data. Nothing is iterated.
from sddmesh.decomposition import build_layout, plan_interface_points, solve_sdd
from sddmesh.detsolver import solve_single_domain
from sddmesh.domain import GridSpec, invert_mesh
from sddmesh.monitor import running_example
from sddmesh.quality import quality_report
from sddmesh.sde import WalkConfig

m = running_example()
grid = GridSpec(29, 29)
layout = build_layout(None, grid, 2, 2)
for sub in layout.subdomains:
    print("block", (sub.a, sub.b), "nodes", sub.grid.shape, "x in", (sub.grid.domain.xmin, sub.grid.domain.xmax))
print("interface lines:", [(ln.orientation, ln.index) for ln in layout.lines])

# Which interface nodes get random walks?
# "optimal" looks for extrema of rho' and rho'' along each line
for strategy, k in (("all", None), ("equispaced", 7), ("optimal", None)):
    plan = plan_interface_points(strategy, m, layout, k=k)
    print(f"{strategy:10s}", [v.tolist() for v in plan.mc_nodes])

ref = invert_mesh(solve_single_domain(m, grid))
cfg = WalkConfig.exponential(1e4, 2000, seed=1)
for strategy, k in (("equispaced", 7), ("optimal", None)):
    res = solve_sdd(m, grid, layout, plan_interface_points(strategy, m, layout, k=k), cfg)
    q = quality_report(invert_mesh(res.solution), ref, m)
    print(f"{strategy:10s} MC points {res.mc_points:2d}  t_stoc {res.t_stoc:.2f}s  t_sub {res.t_sub:.3f}s  "
          f"R_max {q.r_max:.3f}  R_mean {q.r_mean:.4f}  l_inf {q.l_inf:.3f}")

# Interface values straight from the estimator, with their standard errors
iv = res.interfaces
print("vertical line xi at MC nodes:", iv.xi[0][res.plan.mc_nodes[0]].round(4))
print("standard errors:", iv.stderr_xi[0][res.plan.mc_nodes[0]].round(4))
