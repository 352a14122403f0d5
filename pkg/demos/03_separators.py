"""
Randomized separators
=====================

Three sampling primitives drive the rounding algorithms:

* orthogonal separators draw vertex subsets from a Gram matrix so that
  Pr(u in S) is exactly alpha * ||u||^2 while beta-far pairs almost never
  co-occur;
* diameter-bounded decompositions chop a shortest-path metric into clusters
  of diameter at most Delta;
* LP separators draw from (x, z) values with Pr(u in S) exactly x(u)/n and
  zero co-occurrence for far pairs.

Distortion (how often close pairs are separated) is measured and reported,
never asserted against a big-O constant.
"""

import numpy as np

from minmaxpart import Graph, Measure, build_sse_sdp, solve_sdp
from minmaxpart.instances import gen_random
from minmaxpart.rngstreams import stream
from minmaxpart.separators import (decomposition_stats,
                                   lp_separator_stats,
                                   orthogonal_separator_stats)

# --- orthogonal separators on a solved 6-cycle relaxation ---------------
g6 = Graph(6, [(i, (i + 1) % 6, 1.0) for i in range(6)])
sol = solve_sdp(build_sse_sdp(g6, Measure.uniform(6), Measure.uniform(6),
                              0.5, 1 / 6))
stats = orthogonal_separator_stats(sol.gram, m=4, beta=0.25, draws=40000,
                                   rng=stream(0, "separator"),
                                   zeroed=sol.zeroed)
print("orthogonal separator (m=4, beta=0.25):")
print("  alpha =", stats["alpha"], " word bits =", stats["word_bits"],
      " pattern length =", stats["pattern_len"])
print("  worst co-occurrence excess over min(Pr)/m:",
      f"{stats['cooccurrence_excess']:.2e}")
print("  measured distortion:", round(stats["measured_distortion"], 2))

# --- diameter-bounded decomposition on a grid ---------------------------
grid = gen_random("grid", {"rows": 10, "cols": 10}, seed=0)
dstats = decomposition_stats(grid, np.ones(grid.m), delta=5.0, draws=300,
                             rng=stream(1, "separator"))
print("\ndecomposition of the 10x10 grid at delta = 5:")
print("  clusters checked:", dstats["clusters_checked"],
      " diameter compliant:", dstats["diameter_compliant"])
print("  measured D:", round(dstats["measured_D"], 2))

# --- LP separators from a line metric -----------------------------------
g = gen_random("grid", {"rows": 4, "cols": 5}, seed=0)
x = np.random.default_rng(2).uniform(0.05, 1.0, size=20)
z = np.abs(x[:, None] - x[None, :])
lstats = lp_separator_stats(g, x, z, beta=0.5, draws=20000,
                            rng=stream(2, "separator"))
print("\nLP separator (alpha = 1/n):")
print("  far-pair violations:", lstats["far_pair_violations"])
worst = max(abs(a - b) for a, b in
            zip(lstats["inclusion_rate"], lstats["expected_rate"]))
print("  worst |empirical - x(u)/n|:", f"{worst:.2e}")
