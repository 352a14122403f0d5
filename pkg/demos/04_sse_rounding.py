"""
Rounding small-set expansion
============================

The general-graph algorithm solves the SDP, then repeatedly draws
orthogonal separators until an acceptance function fires; the returned set
deterministically satisfies its size gate and an arithmetic quality bound.
The accumulation variant targets a mass window [H, 2H].  On minor-free
inputs the LP and LP separators take over.
"""

import numpy as np

from minmaxpart import (Graph, Measure, SseInstance, exact_sse,
                        exact_unbalanced_cut, sse_round_minorfree,
                        sse_round_part1, sse_round_part2,
                        weighted_unbalanced_cut)
from minmaxpart.instances import gen_random
from minmaxpart.rngstreams import stream

rng = stream(42, "separator")

# --- Algorithm I on the 6-cycle ------------------------------------------
cycle = Graph(6, [(i, (i + 1) % 6, 1.0) for i in range(6)])
inst = SseInstance(cycle, Measure.uniform(6), Measure.uniform(6), rho=0.5,
                   epsilon=0.1)
sol = sse_round_part1(inst, rng)
opt = exact_sse(cycle, inst.mu, inst.eta, 0.5)
print("part I on the 6-cycle:")
print("  returned", sol.vertices.tolist(), "objective", round(sol.objective, 3),
      "after", sol.iterations, "draws")
print("  exact optimum", round(opt.objective, 3),
      " quality bound 4*D*SDP/H =",
      round(4 * sol.D_used * sol.relaxation_value / sol.H_used, 3))

# --- Algorithm II: accumulation with a mass guess -------------------------
inst2 = SseInstance(cycle, Measure.uniform(6), Measure.uniform(6), rho=0.25,
                    H=0.25, epsilon=0.1)
sol2 = sse_round_part2(inst2, rng)
print("\npart II (H = 1/4):", sol2.vertices.tolist(),
      " eta =", round(sol2.report.eta, 3),
      " floor H/16 =", 0.25 / 16, " steps =", sol2.accum_steps)

# --- the minor-free path on a grid ----------------------------------------
grid = gen_random("grid", {"rows": 4, "cols": 4}, seed=0)
inst3 = SseInstance(grid, Measure.uniform(16), Measure.uniform(16), rho=0.25,
                    epsilon=0.1)
sol3 = sse_round_minorfree(inst3, rng)
print("\nminor-free (LP) on the 4x4 grid:", sol3.vertices.tolist(),
      " mu =", round(sol3.report.mu, 3), " backend =", sol3.backend)

# --- weighted rho-unbalanced cut vs the oracle -----------------------------
g = gen_random("gnp", {"n": 9, "p": 0.5}, seed=5)
y = Measure(np.linspace(0.5, 1.5, 9))
got = weighted_unbalanced_cut(g, y, tau=0.25, rho=1 / 3, epsilon=0.25,
                              rng=rng)
ref = exact_unbalanced_cut(g, y, 0.25, 1 / 3)
print("\nweighted unbalanced cut: |S| =", len(got.vertices),
      " boundary =", got.report.boundary,
      " (exact non-bicriteria optimum =", ref.objective, ")",
      " captured", round(got.y_capture, 3), "of y")
