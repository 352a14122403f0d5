"""Min-max graph partitioning toolkit.

Balanced min-max partitioning, min-max multiway cut, and their common
generalization, solved by small-set-expansion rounding (SDP or LP
relaxation plus randomized separators), a multiplicative-weights covering
loop, and an uncrossing/aggregation step; exact brute-force oracles and
worst-case instance generators back every randomized component.
"""

from .aggregation import (AggregationResult, aggregate,
                          aggregate_with_terminals, check_agg_lemma)
from .covering import (Cover, CoveringLevelError, cover_minmax_cut,
                       cover_minmax_kpart, make_backend)
from .graphs import (CapacityError, ContractError, CutReport, Graph,
                     InfeasibleError, InputError, Measure, Partition,
                     PartitionReport, cut_report, cut_weight, expansion,
                     validate_partition, weighted_expansion)
from .instances import (gen_greedy_bad_tree, gen_random, greedy_peel_minmax,
                        mmmc_gadget, recursive_boost, reduce_mmmc_to_ksum,
                        star_with_terminals, verify_multiway_sdp_gap)
from .oracle import (exact_min_boundary, exact_minmax_kpart,
                     exact_minsum_kpart, exact_multiway, exact_sse,
                     exact_unbalanced_cut, min_cut_of_size_forest)
from .pipeline import RunReport, bench, run_minmax_cut, run_minmax_kpart, \
    run_minmax_multiway
from .relaxation import (LpProgram, LpSolution, SdpProgram, SdpSolution,
                         build_sse_lp, build_sse_sdp, lp_residuals,
                         pin_terminals, sdp_residuals, solve_lp, solve_sdp)
from .rngstreams import stream, streams
from .separators import (Decomposition, DecompositionSampler,
                         LpSeparatorSampler, OrthogonalSeparatorSampler,
                         SeparatorSample, probabilistic_partitioning,
                         sample_lp_separator, sample_orthogonal_separator,
                         separating_decomposition)
from .sse import (RoundingConfig, SseInstance, SseSolution, sse_round_part1,
                  sse_round_part2, sse_round_minorfree,
                  weighted_unbalanced_cut)

__version__ = "0.1.0"
