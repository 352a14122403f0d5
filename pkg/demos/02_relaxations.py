"""
The SSE relaxations and the dominance chain
===========================================

The semidefinite relaxation puts a vector on every vertex (the origin is an
implicit extra point) and minimizes the normalized cut energy under l2^2
triangle inequalities, spreading rows, and a mass row.  The linear
relaxation mirrors it with per-vertex values x(u) and a semi-metric
z(u, v).  Any integral solution embeds into both, so

    LP value  <=  SDP value  <=  cheapest integral boundary.
"""

import numpy as np

from minmaxpart import (Graph, Measure, build_sse_lp, build_sse_sdp,
                        exact_min_boundary, sdp_residuals, solve_lp,
                        solve_sdp)
from minmaxpart.relaxation import integral_gram

rng = np.random.default_rng(7)
n = 9
edges = [(u, v, float(rng.integers(1, 4)))
         for u in range(n) for v in range(u + 1, n) if rng.random() < 0.5]
g = Graph(n, edges)
mu = Measure.uniform(n)
eta = Measure.from_counts([1.0 + g.weighted_degree(v) for v in range(n)])
rho, H = 0.5, 0.9 * float(eta.values.max())

sdp = solve_sdp(build_sse_sdp(g, mu, eta, rho, H))
lp = solve_lp(build_sse_lp(g, mu, rho, eta=eta, H=H))
exact = exact_min_boundary(g, mu, eta, rho, H)

print(f"LP    = {lp.objective:.6f}   (max violation {lp.max_violation:.1e})")
print(f"SDP   = {sdp.objective:.6f}   (max violation {sdp.max_violation:.1e})")
print(f"exact = {exact.objective:.6f}   at S = {exact.vertices.tolist()}")
assert lp.objective <= sdp.objective + 1e-4 <= exact.objective + 2e-4

# The 0/1 embedding of the exact optimum is feasible for the SDP and pays
# exactly its normalized boundary; the solver can only do better.
witness = integral_gram(n, exact.vertices)
prog = build_sse_sdp(g, mu, eta, rho, H)
print("witness residuals:", sdp_residuals(prog, witness)["max"])

# "part2" mode adds the near-mass cap (eta-mass within ||u||^2 of each
# vector is at most 2H) and the global mu cap, used by the accumulation
# rounding.
part2 = solve_sdp(build_sse_sdp(g, mu, eta, rho, H, mode="part2"))
print(f"part-II SDP = {part2.objective:.6f} ({part2.status})")
