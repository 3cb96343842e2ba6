# The same mesh coordinates from random walks.
#
# xi(p) is the expected boundary value of xi where a drift-diffusion path
# started at p first leaves the domain. Each walk is keyed by
# (seed, point id, walk id), so estimates never depend on thread count.
import math

import numpy as np

from sddmesh.detsolver import build_boundary_data, solve_single_domain
from sddmesh.domain import GridSpec, RectDomain
from sddmesh.monitor import constant, running_example
from sddmesh.sde import (WalkConfig, WalkStream, bridge_exit_test, bridge_hit_probability,
                         exponential_hit_probability, mc_estimate, step_linear)

# One Euler-Maruyama step. The drift used by the walker is half of grad(w)/w
m = running_example()
print("full drift at (0.85, 0.5):", m.drift(0.85, 0.5))
print("step with z = 0, dt = 1e-3:", step_linear((0.85, 0.5), m, 1e-3, z=(0.0, 0.0)))

# Brownian bridge: chance that a step touched an edge although both ends are inside
print("bridge probability d0 = d1 = 0.1, dt = 0.01:", bridge_hit_probability(0.1, 0.1, 0.01), math.exp(-2))
s = WalkStream(seed=1)
hits = sum(bridge_exit_test((0.5, 0.1), (0.55, 0.1), 0.01, RectDomain.unit(), s) is not None
           for _ in range(20000))
print("empirical rate over 20000 trials:", hits / 20000)

# With exponential steps the same question has a closed form too
print("exponential-step hit probability:", exponential_hit_probability(0.01, 0.02, 0.015, 1e3))

# w = 1: the exact answer at (0.3, 0.7) is xi = 0.3, eta = 0.7
grid = GridSpec(29, 29)
bd1 = build_boundary_data(constant(), grid)
for cfg in (WalkConfig.linear(1e-3, 4000, seed=1), WalkConfig.exponential(1e4, 4000, seed=1)):
    r = mc_estimate((0.3, 0.7), constant(), bd1, cfg)
    print(f"{cfg.scheme:12s} xi = {r.xi:.4f} +- {r.stderr_xi:.4f}, eta = {r.eta:.4f} +- {r.stderr_eta:.4f}")

# The running example against the deterministic solution at one node
bd = build_boundary_data(m, grid)
sol = solve_single_domain(m, grid)
i, j = 20, 14
r = mc_estimate((grid.x[i], grid.y[j]), m, bd, WalkConfig.exponential(1e3, 10000, seed=2), point_id=j * 29 + i)
print(f"node ({i},{j}): MC xi = {r.xi:.4f} +- {r.stderr_xi:.4f}, Jacobi xi = {sol.xi.values[j, i]:.4f}")
print("mean steps per walk", r.mean_steps, "edge frequencies",
      {k: round(float(f), 4) for k, f in r.edge_frequencies().items()})

# The error shrinks like N^(-1/2)
errs = [mc_estimate((0.5, 0.5), constant(), bd1, WalkConfig.exponential(1e3, n, seed=3)).stderr_xi
        for n in (1000, 4000, 16000)]
print("stderr for N = 1000, 4000, 16000:", np.round(errs, 5))
