"""From a uniform cover to a bounded partition.

Three steps. (1) Shuffle the cover sets and let them claim vertices in
order: P_i = S_i minus everything claimed earlier. (2) Uncross: while some
part has boundary above 2B, replace it by its full cover set and carve that
set out of everyone else; each such replacement lowers the total boundary by
at least 2B, so the loop is a potential argument.  (3) Merge parts greedily
while both a size cap and a cost cap allow it; the greedy-aggregation
counting lemma turns maximal unmergeability into a bound on the number of
parts.

The terminal-aware variant merges only terminal-free pairs under tighter
caps, then sorts parts by size, forms groups of k, and assembles the final
parts by taking at most one member per group with terminal consistency.

Every structural claim (partition validity after each step, per-iteration
potential drop, final caps) is asserted on every run; the audit object
counts the asserted events.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import Graph, InputError, Partition, cut_weight


@dataclass
class AggregationAudit:
    step2_iterations: int = 0
    step2_min_drop: float = math.inf
    step3_merges: int = 0
    events: int = 0
    b_prime: float = 0.0


@dataclass
class AggregationResult:
    partition: Partition
    b_prime: float
    audit: AggregationAudit
    terminal_part: dict[int, int] | None = None  # terminal id -> part index


@dataclass
class LemmaCheck:
    ok: bool
    t: int
    bound: float
    mergeable_pair: tuple[int, int] | None


def check_agg_lemma(a, b, A: float, B: float, S: float, T: float) -> LemmaCheck:
    """Validate the greedy-aggregation counting bound on a maximal family.

    For nonnegative a_i < A, b_i < B with Σa ≤ S, Σb ≤ T and every pair
    unmergeable (a_i+a_j > A or b_i+b_j > B), the family size t satisfies
    t < S/A + T/B + max(S/A, T/B, 1).  A mergeable pair is reported instead
    of a verdict: the caller should have merged it.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) != len(b):
        raise InputError("a and b must have equal length")
    tol = 1e-9
    if (a < -tol).any() or (b < -tol).any():
        raise InputError("entries must be nonnegative")
    if (a >= A + tol).any() or (b >= B + tol).any():
        raise InputError("entries must be below their caps")
    if a.sum() > S + tol or b.sum() > T + tol:
        raise InputError("sums exceed their budgets")
    t = len(a)
    for i in range(t):
        for j in range(i + 1, t):
            if a[i] + a[j] <= A + tol and b[i] + b[j] <= B + tol:
                return LemmaCheck(ok=False, t=t, bound=math.nan,
                                  mergeable_pair=(i, j))
    bound = S / A + T / B + max(S / A, T / B, 1.0)
    return LemmaCheck(ok=t < bound + tol, t=t, bound=bound,
                      mergeable_pair=None)


def _claim_in_order(n: int, sets, order) -> list[set]:
    parts = [set() for _ in sets]
    claimed = np.zeros(n, dtype=bool)
    for rank, idx in enumerate(order):
        for v in sets[idx]:
            if not claimed[v]:
                claimed[v] = True
                parts[rank].add(int(v))
    if not claimed.all():
        missing = int(np.flatnonzero(~claimed)[0])
        raise InputError(f"vertex {missing} is not covered by any set")
    return parts


def _assert_partition(n: int, parts, supersets=None, audit=None):
    seen = np.zeros(n, dtype=np.int64)
    for i, p in enumerate(parts):
        for v in p:
            seen[v] += 1
        if supersets is not None:
            assert p <= supersets[i], "part escaped its cover set"
    assert (seen == 1).all(), "parts must partition V"
    if audit is not None:
        audit.events += 1


def _uncross(g: Graph, parts, sets_in_order, B: float, audit: AggregationAudit):
    """Step 2: replace expanding parts by their cover sets."""
    deltas = [cut_weight(g, p) for p in parts]
    potential = sum(deltas)
    cap = potential / (2 * B) + 1 if B > 0 else 1
    while True:
        viol = next((i for i, d in enumerate(deltas) if d > 2 * B), None)
        if viol is None:
            break
        full = sets_in_order[viol]
        parts[viol] = set(int(v) for v in full)
        for j in range(len(parts)):
            if j != viol:
                parts[j] -= parts[viol]
        deltas = [cut_weight(g, p) for p in parts]
        new_potential = sum(deltas)
        drop = potential - new_potential
        assert drop >= 2 * B - 1e-9, \
            f"uncrossing must drop the potential by 2B, got {drop:g}"
        audit.step2_iterations += 1
        audit.step2_min_drop = min(audit.step2_min_drop, drop)
        audit.events += 1
        potential = new_potential
        assert audit.step2_iterations <= cap + 1, "uncrossing ran too long"
        _assert_partition(g.n, parts,
                          [set(int(v) for v in s) for s in sets_in_order],
                          audit)
    return parts, deltas


def aggregate(g: Graph, cover_sets, k: int, c: float, B: float,
              epsilon: float, rng: np.random.Generator) -> AggregationResult:
    """Turn a uniform cover into at most k parts with size and cost caps.

    Preconditions (hard errors): every vertex lies in at least a c/k
    fraction of the sets, every set has at most 2n/k vertices and boundary
    at most B.  Output: at most k nonempty parts, each with at most
    2(1+ε)n/k vertices and boundary at most 2B'/ε for
    B' = max((1/k)Σδ(P_i), 2B).
    """
    if not (0 < epsilon <= 1):
        raise InputError(f"epsilon must be in (0,1], got {epsilon}")
    if not cover_sets:
        raise InputError("empty cover")
    n = g.n
    sets = [np.asarray(sorted(int(v) for v in s), dtype=np.int64)
            for s in cover_sets]
    counts = np.zeros(n, dtype=np.int64)
    for s in sets:
        counts[s] += 1
    short = np.flatnonzero(counts < c / k * len(sets) - 1e-9)
    if len(short):
        raise InputError(
            f"vertex {int(short[0])} is covered by {counts[short[0]]} sets, "
            f"below the required c/k fraction")
    for idx, s in enumerate(sets):
        if len(s) > 2 * n / k + 1e-9:
            raise InputError(f"cover set {idx} has {len(s)} > 2n/k vertices")
        if cut_weight(g, s) > B * (1 + 1e-9) + 1e-12:
            raise InputError(f"cover set {idx} has boundary above B = {B:g}")

    audit = AggregationAudit()
    audit.events += 2 * len(sets)  # per-set size and boundary preconditions
    order = rng.permutation(len(sets))
    parts = _claim_in_order(n, sets, order)
    sets_in_order = [sets[i] for i in order]
    supersets = [set(int(v) for v in s) for s in sets_in_order]
    _assert_partition(n, parts, supersets, audit)

    parts, deltas = _uncross(g, parts, sets_in_order, B, audit)

    b_prime = max(sum(deltas) / k, 2 * B)
    audit.b_prime = b_prime
    size_cap = 2 * (1 + epsilon) * n / k
    cost_cap = 2 * b_prime / epsilon
    parts, deltas = _greedy_merge(g, parts, deltas, size_cap, cost_cap,
                                  audit, frozen=None, stop_at=k)

    live = [sorted(p) for p in parts if p]
    final = Partition(n, live)
    fd = [cut_weight(g, p) for p in live]
    assert len(live) <= k, f"{len(live)} parts remain, expected <= {k}"
    assert all(len(p) <= size_cap + 1e-9 for p in live)
    assert all(d <= cost_cap * (1 + 1e-9) for d in fd)
    audit.events += 1 + 2 * len(live)  # count cap + per-part size/cost caps
    return AggregationResult(partition=final, b_prime=b_prime, audit=audit)


def _greedy_merge(g: Graph, parts, deltas, size_cap, cost_cap, audit,
                  frozen=None, weights=None, stop_at=None):
    """Step 3: merge pairs, smallest combined size first.

    ``frozen`` marks parts that may never participate in a merge (parts
    holding terminals in the generalized variant); ``weights`` switches the
    size caps from cardinality to vertex weight.  Merging stops once the
    nonempty-part count reaches ``stop_at``: the counting lemma proves a
    maximal-unmergeable family is that small, so stopping early preserves
    every cap while avoiding needless collapse of tiny instances.
    """
    parts = [set(p) for p in parts]

    def sz(p):
        if weights is None:
            return len(p)
        return float(sum(weights[v] for v in p))

    while True:
        if stop_at is not None and sum(1 for p in parts if p) <= stop_at:
            break
        best = None
        for i in range(len(parts)):
            if not parts[i] or (frozen and frozen[i]):
                continue
            for j in range(i + 1, len(parts)):
                if not parts[j] or (frozen and frozen[j]):
                    continue
                if sz(parts[i]) + sz(parts[j]) <= size_cap + 1e-9 and \
                        deltas[i] + deltas[j] <= cost_cap * (1 + 1e-9):
                    key = (sz(parts[i]) + sz(parts[j]), i, j)
                    if best is None or key < best:
                        best = key
        if best is None:
            break
        _, i, j = best
        parts[i] |= parts[j]
        parts[j] = set()
        deltas[i] = cut_weight(g, parts[i])
        deltas[j] = 0.0
        assert sz(parts[i]) <= size_cap + 1e-9
        assert deltas[i] <= cost_cap * (1 + 1e-9)
        audit.step3_merges += 1
        audit.events += 1
    return parts, deltas


def aggregate_with_terminals(g: Graph, cover_sets, k: int, rho: float,
                             B: float, epsilon: float, terminals,
                             rng: np.random.Generator,
                             size_weights=None) -> AggregationResult:
    """The grouped aggregation achieving the (2+ε)ρn size bound.

    Runs steps 1-2 as usual, merges only terminal-free pairs under the caps
    |P_i|+|P_j| ≤ (1+ε)ρn and δ(P_i)+δ(P_j) ≤ 2B', sorts the parts by
    non-increasing size into ⌈t/k⌉ groups of k, and assembles Q_1..Q_k by
    taking at most one part per group so that Q_i contains terminal i and no
    other.  Guarantees: ≤ k parts, ≤ 1 terminal each, |Q_i| ≤ (2+ε)ρn,
    δ(Q_i) ≤ 8B', and t ≤ 4k parts after merging.
    """
    if not (0 < epsilon <= 1):
        raise InputError(f"epsilon must be in (0,1], got {epsilon}")
    n = g.n
    weights = np.ones(n) if size_weights is None \
        else np.asarray(size_weights, dtype=float)
    total = float(weights.sum())

    def wsize(p):
        return float(sum(weights[v] for v in p))

    terminals = [int(t) for t in terminals]
    tset = set(terminals)
    sets = [np.asarray(sorted(int(v) for v in s), dtype=np.int64)
            for s in cover_sets]
    for idx, s in enumerate(sets):
        inside = tset.intersection(int(v) for v in s)
        if len(inside) > 1:
            raise InputError(f"cover set {idx} holds {len(inside)} terminals")
        if wsize(s) > (1 + epsilon) * rho * total + 1e-9:
            raise InputError(f"cover set {idx} exceeds (1+ε)ρn weight")
        if cut_weight(g, s) > B * (1 + 1e-9) + 1e-12:
            raise InputError(f"cover set {idx} has boundary above B = {B:g}")

    audit = AggregationAudit()
    audit.events += 3 * len(sets)  # per-set terminal/size/boundary checks
    order = rng.permutation(len(sets))
    parts = _claim_in_order(n, sets, order)
    sets_in_order = [sets[i] for i in order]
    supersets = [set(int(v) for v in s) for s in sets_in_order]
    _assert_partition(n, parts, supersets, audit)
    parts, deltas = _uncross(g, parts, sets_in_order, B, audit)

    b_prime = max(sum(deltas) / k, 2 * B)
    audit.b_prime = b_prime
    frozen = [bool(tset.intersection(p)) for p in parts]
    parts, deltas = _greedy_merge(g, parts, deltas,
                                  size_cap=(1 + epsilon) * rho * total,
                                  cost_cap=2 * b_prime, audit=audit,
                                  frozen=frozen, weights=weights,
                                  stop_at=4 * k)

    live = [(sorted(p), cut_weight(g, p)) for p in parts if p]
    t = len(live)
    assert t <= 4 * k, f"{t} parts after merging, expected <= 4k = {4 * k}"
    audit.events += 1
    live.sort(key=lambda pc: (-wsize(pc[0]), pc[0]))
    groups = [live[j * k:(j + 1) * k] for j in range(math.ceil(t / k))]

    q_parts: list[set] = [set() for _ in range(k)]
    q_first: list[int] = [0] * k  # size of the group-1 part of each Q
    term_to_q = {term: i for i, term in enumerate(terminals)}
    for gi, group in enumerate(groups):
        taken = [False] * k
        rest = []
        for p, _ in group:
            owner = next((term_to_q[v] for v in p if v in tset), None)
            if owner is not None:
                assert not taken[owner], "two parts of one terminal in a group"
                q_parts[owner] |= set(p)
                taken[owner] = True
                if gi == 0:
                    q_first[owner] = wsize(p)
            else:
                rest.append(p)
        free = [i for i in range(k) if not taken[i]]
        assert len(rest) <= len(free), "group has more parts than free slots"
        for p, qi in zip(rest, free):
            q_parts[qi] |= set(p)
            if gi == 0:
                q_first[qi] = wsize(p)
    audit.events += len(groups)

    sizes = [wsize(q) for q in q_parts]
    for i, q in enumerate(q_parts):
        inside = tset.intersection(q)
        assert len(inside) <= 1, "a final part holds two terminals"
        if i < len(terminals):
            assert terminals[i] in q, "terminal i must land in part i"
        # averaging chain: everything beyond the group-1 part fits in n/k
        assert sizes[i] - q_first[i] <= total / k + 1e-9, "size chain violated"
        assert sizes[i] <= (2 + epsilon) * rho * total + 1e-9
        if q:
            assert cut_weight(g, q) <= 8 * b_prime * (1 + 1e-9) + 1e-12
    audit.events += 4 * len(q_parts)  # terminal, chain, size, cost per part

    live_parts = [sorted(q) for q in q_parts if q]
    final = Partition(n, live_parts)
    terminal_part = {}
    for term in terminals:
        idx = int(final.part_of[term])
        terminal_part[term] = idx
    # one terminal per part, and distinct parts across terminals
    assert len(set(terminal_part.values())) == len(terminals)
    audit.events += 1
    return AggregationResult(partition=final, b_prime=b_prime, audit=audit,
                             terminal_part=terminal_part)
