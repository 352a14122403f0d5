"""
Graphs, cuts, and the exact oracles
===================================

Every randomized component in this package is checked against brute force.
This script builds a few small graphs and runs the exact solvers that
provide the ground truth.
"""

import numpy as np

from minmaxpart import (Graph, Measure, cut_weight, expansion,
                        exact_minmax_kpart, exact_multiway, exact_sse,
                        exact_unbalanced_cut, weighted_expansion)

# A 6-cycle: the classic small instance.  Three consecutive vertices form
# the sparsest small set.
cycle = Graph(6, [(i, (i + 1) % 6, 1.0) for i in range(6)])
print("6-cycle, S = {0,1,2}:")
print("  cut weight:", cut_weight(cycle, {0, 1, 2}))
print("  expansion:", expansion(cycle, {0, 1, 2}))

# Weighted small-set expansion normalizes the boundary by total edge weight
# and by the eta-mass of the set.
mu = Measure.uniform(6)
eta = Measure.uniform(6)
print("  weighted expansion:", weighted_expansion(cycle, {0, 1, 2}, eta))

# The exact SSE oracle enumerates all subsets (vectorized over bitmask
# chunks) and reports the optimum with deterministic tie-breaking.
best = exact_sse(cycle, mu, eta, rho=0.5)
print("exact SSE on the 6-cycle:", best.vertices, "objective", best.objective)

# Min-max balanced partitioning: the 4-cycle splits into antipodal pairs.
square = Graph(4, [(i, (i + 1) % 4, 1.0) for i in range(4)])
part, opt = exact_minmax_kpart(square, 2, 2)
print("4-cycle into 2 parts: optimum", opt, "parts", [p.tolist() for p in part.parts])

# Min-max multiway cut on a star: the only choice is which terminal keeps
# the center, and every choice pays k-1.
k = 4
star = Graph(k + 1, [(i, k, 1.0) for i in range(k)])
part, opt = exact_multiway(star, list(range(k)))
print(f"star with {k} terminals: optimum", opt)

# Weighted rho-unbalanced cut: the cheapest set carrying a quarter of the
# vertex weight using at most half the vertices.
rng = np.random.default_rng(0)
g = Graph(8, [(u, v, float(rng.integers(1, 4)))
              for u in range(8) for v in range(u + 1, 8)
              if rng.random() < 0.5])
y = Measure(rng.uniform(0.5, 1.5, size=8))
cut = exact_unbalanced_cut(g, y, tau=0.25, rho=0.5)
print("unbalanced cut:", cut.vertices, "boundary", cut.objective)
