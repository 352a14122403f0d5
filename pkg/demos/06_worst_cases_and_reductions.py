"""
Worst-case certificates and executable reductions
=================================================

Two constructions certify limits of relaxation-based approaches, and two
reductions are runnable transforms rather than proofs.
"""

import math

from minmaxpart import (Partition, exact_minsum_kpart, exact_multiway,
                        recursive_boost, reduce_mmmc_to_ksum,
                        verify_multiway_sdp_gap)
from minmaxpart.instances import gen_random, mmmc_gadget

# --- the multiway-cut SDP has an integrality gap of k/2 -------------------
# On a star with k terminals the explicit fractional solution (a regular
# simplex in the complement of one unit vector) is feasible and pays
# 2(k-1)/k, while any integral assignment pays k-1.
for k in (3, 4, 8):
    rep = verify_multiway_sdp_gap(k)
    print(f"k={k}: fractional {rep.fractional:.4f}, integral {rep.integral},"
          f" gap {rep.ratio}, worst residual {rep.max_residual:.1e}")

# --- min-sum balanced partitioning via min-max multiway cut ---------------
# Attaching k terminals to every vertex at weight B/n converts the implicit
# edge balance of the min-max objective into a vertex balance.  Sweeping B
# over powers of two and keeping the cheapest balanced answer is a
# (5k, 10)-approximation when the multiway solver is exact.
g = gen_random("gnp", {"n": 8, "p": 0.5}, seed=11)


def exact_solver(gb, terminals):
    part, _ = exact_multiway(gb, terminals)
    return part


res = reduce_mmmc_to_ksum(g, 2, exact_solver)
_, opt = exact_minsum_kpart(g, 2, math.ceil(g.n / 2))
print(f"\nreduction on n=8: cost {res.minsum_cost} <= 5k*OPT = {10 * opt},"
      f" B used {res.B_used}, balance {res.balance}")
gb, terms = mmmc_gadget(g, 2, res.B_used)
print(f"gadget added {gb.m - g.m} edges of weight {res.B_used / g.n:g}")

# --- boosting a weak bicriteria partitioner --------------------------------
# A solver that only guarantees k^(1-eps) balance recurses on its own parts
# (padded with dummy singletons) until the residual part count drops below
# 3^(2/eps); balance improves to a constant while cost grows by the depth.
def chopper(gg, kk, cap):
    parts = [list(range(gg.n))[i * cap:(i + 1) * cap]
             for i in range(math.ceil(gg.n / cap))]
    return Partition(gg.n, [p for p in parts if p])


g32 = gen_random("gnp", {"n": 32, "p": 0.3}, seed=6)
res = recursive_boost(g32, 16, 1.0, chopper)
print(f"\nboost on n=32, k=16: depth {res.depth}, level part counts"
      f" {res.k_levels}, instances per level {res.instances_per_level},"
      f" final sizes {res.partition.sizes()}")
