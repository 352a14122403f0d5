"""Exact brute-force solvers for small instances.

These are the reference backends used in tests and the source of ground
truth for every randomized component.  Subset problems are enumerated over
bitmasks in vectorized chunks; partition problems use a pruned
restricted-growth recursion; a forest specialization covers size-restricted
minimum cuts beyond the bitmask cap.

Deterministic tie-breaking throughout: (objective, |S|, bitmask) for subset
problems, first-found under canonical enumeration order for partitions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import (CapacityError, CutReport, Graph, InfeasibleError,
                     InputError, Measure, Partition, cut_weight)

FEAS_TOL = 1e-12
_CHUNK_BITS = 17


@dataclass(frozen=True)
class OracleSolution:
    """A certified optimum for one of the subset problems."""

    vertices: np.ndarray
    objective: float
    report: CutReport


def _mask_to_vertices(mask: int, n: int) -> np.ndarray:
    return np.array([v for v in range(n) if (mask >> v) & 1], dtype=np.int64)


def _subset_chunks(n: int):
    total = 1 << n
    step = min(total, 1 << _CHUNK_BITS)
    for lo in range(0, total, step):
        yield np.arange(lo, min(lo + step, total), dtype=np.uint64)


def _chunk_stats(g: Graph, masks: np.ndarray, *measures):
    """Per-mask cut weight and measure sums for a chunk of subsets."""
    bits = ((masks[None, :] >> np.arange(g.n, dtype=np.uint64)[:, None])
            & np.uint64(1)).astype(bool)
    delta = np.zeros(len(masks))
    for u, v, w in zip(g.edge_u, g.edge_v, g.edge_w):
        delta += w * (bits[u] != bits[v])
    sums = [m.values @ bits for m in measures]
    return bits, delta, sums


def _best_by_tiebreak(masks: np.ndarray, objective: np.ndarray):
    """Chunk-local winner under the (objective, popcount, mask) order."""
    finite = np.isfinite(objective)
    if not finite.any():
        return None
    lowest = objective[finite].min()
    cand = np.flatnonzero(objective == lowest)
    keys = sorted((int(np.bitwise_count(masks[i])), int(masks[i])) for i in cand)
    return lowest, keys[0][0], keys[0][1]


def _check_cap(g: Graph, cap: int):
    if g.n > cap:
        raise CapacityError(f"n={g.n} exceeds enumeration cap {cap}")


def exact_sse(g: Graph, mu: Measure, eta: Measure, rho: float,
              cap: int = 22) -> OracleSolution:
    """Minimize (δ(S)/w(E))·(1/η(S)) over nonempty S with μ(S) ≤ ρ, η(S) > 0."""
    _check_cap(g, cap)
    if g.n == 0:
        raise InfeasibleError("empty graph")
    wE = g.total_weight
    best = None
    for masks in _subset_chunks(g.n):
        if masks[0] == 0:
            masks = masks[1:]
            if len(masks) == 0:
                continue
        _, delta, (mu_s, eta_s) = _chunk_stats(g, masks, mu, eta)
        feasible = (mu_s <= rho * (1 + FEAS_TOL) + FEAS_TOL) & (eta_s > 0)
        norm = delta / wE if wE > 0 else np.zeros_like(delta)
        with np.errstate(divide="ignore", invalid="ignore"):
            obj = np.where(feasible, norm / eta_s, np.inf)
        cand = _best_by_tiebreak(masks, obj)
        if cand is not None and (best is None or cand < best):
            best = cand
    if best is None:
        raise InfeasibleError("no nonempty S with mu(S) <= rho and eta(S) > 0")
    verts = _mask_to_vertices(best[2], g.n)
    return OracleSolution(
        vertices=verts,
        objective=best[0],
        report=CutReport(set_size=len(verts), boundary=cut_weight(g, verts),
                         mu=mu.of(verts), eta=eta.of(verts),
                         expansion=(cut_weight(g, verts) / len(verts)
                                    if len(verts) <= g.n / 2 else None)),
    )


def exact_min_boundary(g: Graph, mu: Measure, eta: Measure, rho: float,
                       H: float, cap: int = 22) -> OracleSolution:
    """Minimize δ(S)/w(E) over nonempty S with μ(S) ≤ ρ and η(S) ≥ H."""
    _check_cap(g, cap)
    wE = g.total_weight
    best = None
    for masks in _subset_chunks(g.n):
        if masks[0] == 0:
            masks = masks[1:]
            if len(masks) == 0:
                continue
        _, delta, (mu_s, eta_s) = _chunk_stats(g, masks, mu, eta)
        feasible = ((mu_s <= rho * (1 + FEAS_TOL) + FEAS_TOL)
                    & (eta_s >= H * (1 - FEAS_TOL) - FEAS_TOL))
        norm = delta / wE if wE > 0 else np.zeros_like(delta)
        obj = np.where(feasible, norm, np.inf)
        cand = _best_by_tiebreak(masks, obj)
        if cand is not None and (best is None or cand < best):
            best = cand
    if best is None:
        raise InfeasibleError("no nonempty S with mu(S) <= rho and eta(S) >= H")
    verts = _mask_to_vertices(best[2], g.n)
    return OracleSolution(
        vertices=verts, objective=best[0],
        report=CutReport(set_size=len(verts), boundary=cut_weight(g, verts),
                         mu=mu.of(verts), eta=eta.of(verts), expansion=None))


def exact_unbalanced_cut(g: Graph, y: Measure, tau: float, rho: float,
                         terminals=None, size_weights=None,
                         cap: int = 22) -> OracleSolution:
    """Minimize δ(S) over nonempty S with y(S) ≥ τ·y(V) and |S| ≤ ρn.

    With ``terminals`` given, S may contain at most one of them.  With
    ``size_weights`` given (shrunk-terminal instances), the size constraint
    becomes weight(S) ≤ ρ·weight(V) instead of a cardinality cap.
    """
    _check_cap(g, cap)
    need = tau * y.total
    weighted = size_weights is not None
    if weighted:
        size_meas = Measure(size_weights)
        wcap = rho * size_meas.total
    else:
        size_cap = int(np.floor(rho * g.n + FEAS_TOL))
    term_mask_bits = 0
    if terminals:
        for t in terminals:
            term_mask_bits |= 1 << int(t)
    best = None
    for masks in _subset_chunks(g.n):
        if masks[0] == 0:
            masks = masks[1:]
            if len(masks) == 0:
                continue
        if weighted:
            _, delta, (y_s, w_s) = _chunk_stats(g, masks, y, size_meas)
            size_ok = w_s <= wcap * (1 + FEAS_TOL) + FEAS_TOL
        else:
            _, delta, (y_s,) = _chunk_stats(g, masks, y)
            size_ok = np.bitwise_count(masks) <= size_cap
        feasible = size_ok & (y_s >= need * (1 - FEAS_TOL) - FEAS_TOL)
        if term_mask_bits:
            tcount = np.bitwise_count(masks & np.uint64(term_mask_bits))
            feasible &= tcount <= 1
        obj = np.where(feasible, delta, np.inf)
        cand = _best_by_tiebreak(masks, obj)
        if cand is not None and (best is None or cand < best):
            best = cand
    if best is None:
        cap_txt = f"weight {wcap:g}" if weighted else f"{size_cap} vertices"
        raise InfeasibleError(
            f"no nonempty S with y(S) >= {need:g} within {cap_txt}")
    verts = _mask_to_vertices(best[2], g.n)
    return OracleSolution(
        vertices=verts, objective=best[0],
        report=CutReport(set_size=len(verts), boundary=best[0],
                         mu=len(verts) / g.n, eta=y.of(verts) / y.total,
                         expansion=None))


class _PartitionSearch:
    """Pruned recursion over restricted-growth assignments.

    ``cross[p]`` tracks the weight of edges between part p and other parts
    among assigned vertices; it only grows as vertices are assigned, so both
    the min-max and the min-sum objectives admit monotone pruning.
    """

    def __init__(self, g: Graph, k: int, size_cap: int, minsum: bool,
                 seeds=None):
        self.g = g
        self.k = k
        self.size_cap = size_cap
        self.minsum = minsum
        self.best_val = np.inf
        self.best_assign = None
        self.part_of = np.full(g.n, -1, dtype=np.int64)
        self.sizes = [0] * k
        self.cross = [0.0] * k
        self.cross_sum = 0.0
        self.order = [v for v in range(g.n)
                      if seeds is None or v not in seeds]
        self.seeds = seeds or {}
        for v, p in self.seeds.items():
            self.part_of[v] = p
            self.sizes[p] += 1

    def _value(self, used: int) -> float:
        if self.minsum:
            return self.cross_sum / 2
        return max(self.cross[:used], default=0.0)

    def run(self):
        for v, p in self.seeds.items():
            for u, w in zip(*self.g.neighbors(v)):
                q = self.part_of[u]
                if q >= 0 and q != p and u < v:
                    self.cross[p] += w
                    self.cross[q] += w
                    self.cross_sum += 2 * w
        self._rec(0, len(set(self.seeds.values())))
        if self.best_assign is None:
            raise InfeasibleError("no partition satisfies the size caps")
        return Partition.from_assignment(self.best_assign), self.best_val

    def _rec(self, idx: int, used: int):
        if self._value(used) >= self.best_val:
            return
        if idx == len(self.order):
            val = self._value(used)
            if val < self.best_val:
                self.best_val = val
                self.best_assign = self.part_of.copy()
            return
        remaining = len(self.order) - idx
        capacity = sum(self.size_cap - s for s in self.sizes[:used])
        capacity += (self.k - used) * self.size_cap
        if remaining > capacity:
            return
        v = self.order[idx]
        nbrs, wts = self.g.neighbors(v)
        limit = min(used + 1, self.k) if not self.seeds else self.k
        for p in range(limit):
            if self.sizes[p] >= self.size_cap:
                continue
            added = []
            for u, w in zip(nbrs, wts):
                q = self.part_of[u]
                if q >= 0 and q != p:
                    self.cross[p] += w
                    self.cross[q] += w
                    self.cross_sum += 2 * w
                    added.append((q, w))
            self.part_of[v] = p
            self.sizes[p] += 1
            self._rec(idx + 1, max(used, p + 1))
            self.sizes[p] -= 1
            self.part_of[v] = -1
            for q, w in added:
                self.cross[p] -= w
                self.cross[q] -= w
                self.cross_sum -= 2 * w


def exact_minmax_kpart(g: Graph, k: int, size_cap: int,
                       cap: int = 14) -> tuple[Partition, float]:
    """Optimal partition into ≤ k parts of size ≤ size_cap minimizing max δ."""
    _check_cap(g, cap)
    if k * size_cap < g.n:
        raise InfeasibleError(f"k*size_cap = {k * size_cap} < n = {g.n}")
    return _PartitionSearch(g, k, size_cap, minsum=False).run()


def exact_minsum_kpart(g: Graph, k: int, size_cap: int,
                       cap: int = 14) -> tuple[Partition, float]:
    """Optimal partition into ≤ k parts of size ≤ size_cap minimizing Σ inter-part weight."""
    _check_cap(g, cap)
    if k * size_cap < g.n:
        raise InfeasibleError(f"k*size_cap = {k * size_cap} < n = {g.n}")
    return _PartitionSearch(g, k, size_cap, minsum=True).run()


def exact_multiway(g: Graph, terminals, cap: int = 14) -> tuple[Partition, float]:
    """Optimal min-max multiway partition: one terminal per part, no balance."""
    _check_cap(g, cap)
    terminals = [int(t) for t in terminals]
    if len(set(terminals)) != len(terminals):
        raise InputError("terminals must be distinct")
    seeds = {t: i for i, t in enumerate(terminals)}
    search = _PartitionSearch(g, len(terminals), g.n, minsum=False, seeds=seeds)
    return search.run()


def _forest_roots(g: Graph):
    """Connected components of a forest; raises if g has a cycle."""
    parent = list(range(g.n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v, _ in g.edges():
        ru, rv = find(u), find(v)
        if ru == rv:
            raise InputError("graph is not a forest")
        parent[ru] = rv
    comps: dict[int, list[int]] = {}
    for v in range(g.n):
        comps.setdefault(find(v), []).append(v)
    return list(comps.values())


def min_cut_of_size_forest(g: Graph, size: int) -> tuple[float, np.ndarray]:
    """Minimum δ(S) over |S| = size exactly, for forest inputs.

    Subtree knapsack over each tree, then a knapsack across trees.  Scales
    far beyond the bitmask cap (O(n·size²) per tree).
    """
    if not (0 < size <= g.n):
        raise InputError(f"size must be in 1..n, got {size}")
    tree_tables = []
    for comp in _forest_roots(g):
        root = comp[0]
        # dp[v][b] = array over j of (cost, choice trace)
        order = []
        parent = {root: None}
        stack = [root]
        seen = {root}
        while stack:
            v = stack.pop()
            order.append(v)
            for u, _ in zip(*g.neighbors(v)):
                if u not in seen:
                    seen.add(u)
                    parent[u] = v
                    stack.append(u)
        dp: dict[int, list] = {}
        for v in reversed(order):
            tab = [{0: (0.0, [])}, {1: (0.0, [])}]  # index by b = v in S
            for u, w in zip(*g.neighbors(v)):
                if parent.get(u) != v:
                    continue
                new = [dict(), dict()]
                for b in (0, 1):
                    for j, (cost, trace) in tab[b].items():
                        for bu in (0, 1):
                            for ju, (cu, _) in dp[u][bu].items():
                                jj = j + ju
                                if jj > size:
                                    continue
                                cc = cost + cu + (w if b != bu else 0.0)
                                cur = new[b].get(jj)
                                if cur is None or cc < cur[0]:
                                    new[b][jj] = (cc, trace + [(u, bu, ju)])
                tab = new
            dp[v] = tab
        best = {}
        for b in (0, 1):
            for j, (cost, trace) in dp[root][b].items():
                cur = best.get(j)
                if cur is None or cost < cur[0]:
                    best[j] = (cost, (root, b, trace))
        tree_tables.append((root, dp, best))

    # knapsack across trees
    acc = {0: (0.0, [])}
    for ti, (_, _, best) in enumerate(tree_tables):
        new = {}
        for j, (cost, picks) in acc.items():
            for jt, (ct, head) in best.items():
                jj = j + jt
                if jj > size:
                    continue
                cc = cost + ct
                cur = new.get(jj)
                if cur is None or cc < cur[0]:
                    new[jj] = (cc, picks + [(ti, jt)])
        acc = new
    if size not in acc:
        raise InfeasibleError("forest cannot supply the requested size")
    total, picks = acc[size]

    selected = np.zeros(g.n, dtype=bool)

    def expand(dp, v, b, j):
        if b:
            selected[v] = True
        _, trace = dp[v][b][j]
        for (u, bu, ju) in trace:
            expand(dp, u, bu, ju)

    for ti, jt in picks:
        root, dp, best = tree_tables[ti]
        _, (rv, rb, _) = best[jt]
        expand(dp, rv, rb, jt)
    verts = np.flatnonzero(selected)
    assert len(verts) == size
    return float(total), verts
