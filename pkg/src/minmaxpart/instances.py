"""Instance generators, worst-case constructions, and executable reductions.

* the k²-vertex spider tree on which greedy small-set peeling pays k−1
  while chunking a DFS order pays at most 4;
* the star instance whose multiway-cut semidefinite relaxation has an
  explicit fractional solution of value 2(k−1)/k against an integral
  optimum of k−1 (integrality gap k/2), realized in coordinates and checked
  numerically;
* the reduction from min-sum balanced partitioning to min-max multiway cut
  through the B/n complete-bipartite gadget, swept over B = 2^i;
* the recursive boosting of a (α, k^(1-ε))-bicriteria min-sum partitioner
  to balance 3^(2/ε);
* seeded random families (gnp, grid, tree, planar triangulation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import (ContractError, Graph, InfeasibleError, InputError,
                     Partition, cut_weight)
from .oracle import min_cut_of_size_forest
from .rngstreams import stream


# ---------------------------------------------------------------------------
# the greedy-bad tree


def gen_greedy_bad_tree(k: int) -> Graph:
    """Tree on k² vertices: a spine of k-1 hubs, each with a length-k arm,
    plus an apex hanging off the first hub.  Unit weights."""
    if k < 2:
        raise InputError(f"k must be >= 2, got {k}")
    labels = ["v"]
    index = {"v": 0}
    for i in range(1, k):
        for j in range(k + 1):
            index[f"u_{i},{j}"] = len(labels)
            labels.append(f"u_{i},{j}")
    edges = []
    for i in range(1, k):
        for j in range(1, k + 1):
            edges.append((index[f"u_{i},{j}"], index[f"u_{i},{j - 1}"], 1.0))
    for i in range(2, k):
        edges.append((index[f"u_{i},0"], index[f"u_{i - 1},0"], 1.0))
    edges.append((index["v"], index["u_1,0"], 1.0))
    g = Graph(k * k, edges, labels=labels)
    assert g.m == g.n - 1
    return g


def greedy_peel_minmax(g: Graph, k: int, enumeration_cap: int = 22
                       ) -> tuple[Partition, float]:
    """The naive baseline: repeatedly carve out a minimum-boundary set of
    exactly n/k vertices (exact on the residual graph), k-1 times.

    Per-part boundaries of the result are evaluated in the original graph.
    Residual forests use the tree knapsack; anything else must fit the
    enumeration cap.
    """
    n = g.n
    if n % k:
        raise InputError("greedy peeling needs k | n")
    s = n // k
    remaining = list(range(n))
    parts = []
    for _ in range(k - 1):
        sub, ids = g.induced(remaining)
        try:
            _, verts = min_cut_of_size_forest(sub, s)
        except InputError:
            if sub.n > enumeration_cap:
                raise
            verts = _min_cut_exact_size(sub, s)
        chosen = ids[verts]
        parts.append(sorted(int(v) for v in chosen))
        keep = set(remaining) - set(int(v) for v in chosen)
        remaining = sorted(keep)
    parts.append(sorted(remaining))
    partition = Partition(n, parts)
    return partition, max(cut_weight(g, p) for p in parts)


def _min_cut_exact_size(g: Graph, size: int) -> np.ndarray:
    """Vectorized enumeration of min-boundary sets of an exact size."""
    opt = None
    masks_all = np.arange(1, 1 << g.n, dtype=np.uint64)
    sizes = np.bitwise_count(masks_all)
    masks = masks_all[sizes == size]
    bits = ((masks[None, :] >> np.arange(g.n, dtype=np.uint64)[:, None])
            & np.uint64(1)).astype(bool)
    delta = np.zeros(len(masks))
    for u, v, w in zip(g.edge_u, g.edge_v, g.edge_w):
        delta += w * (bits[u] != bits[v])
    best = delta.min()
    cand = masks[delta == best]
    mask = int(cand.min())
    return np.array([v for v in range(g.n) if (mask >> v) & 1], dtype=np.int64)


def consecutive_partition_bad_tree(k: int) -> tuple[Partition, float]:
    """Chunk the DFS-ish ordering v, u_{1,0..k}, u_{2,0..k}, ... into k
    blocks of k consecutive vertices; the max boundary is at most 4."""
    g = gen_greedy_bad_tree(k)
    order = [0] + list(range(1, k * k))
    parts = [order[i * k:(i + 1) * k] for i in range(k)]
    partition = Partition(g.n, parts)
    return partition, max(cut_weight(g, p) for p in parts)


# ---------------------------------------------------------------------------
# the multiway-cut SDP integrality gap


@dataclass
class GapReport:
    k: int
    fractional: float
    integral: float
    ratio: float
    max_residual: float
    center_norms_ok: bool


def star_with_terminals(k: int) -> tuple[Graph, list[int]]:
    """Star: one center joined by unit edges to k terminal leaves.

    Terminals are vertices 0..k-1, the center is vertex k.
    """
    g = Graph(k + 1, [(i, k, 1.0) for i in range(k)],
              labels=[f"t{i + 1}" for i in range(k)] + ["u"])
    return g, list(range(k))


def verify_multiway_sdp_gap(k: int, tol: float = 1e-9) -> GapReport:
    """Build the explicit fractional solution for the star and certify it.

    Vectors live in R^(k+1): e is the first basis vector and x_1..x_k are
    unit vectors orthogonal to e with pairwise inner product -1/(k-1)
    (a regular simplex in the complement).  Assignment vectors:
    y[t_i, i] = e, y[t_i, j] = 0 for j != i, and
    y[u, i] = e/k + (sqrt(k-1)/k)·x_i.

    All relaxation constraints are checked numerically; the fractional
    value is 2(k-1)/k while the integral optimum is k-1, a gap of k/2.
    """
    if k < 3:
        raise InputError(f"k must be >= 3, got {k}")
    d = k + 1
    e = np.zeros(d)
    e[0] = 1.0
    basis = np.eye(k)
    centroid = basis.mean(axis=0)
    xs = np.zeros((k, d))
    xs[:, 1:] = math.sqrt(k / (k - 1)) * (basis - centroid)
    # vectors indexed by (vertex, i); vertices 0..k-1 terminals, k center
    Y = np.zeros((k + 1, k, d))
    for i in range(k):
        Y[i, i] = e
        Y[k, i] = e / k + (math.sqrt(k - 1) / k) * xs[i]

    flat = Y.reshape((k + 1) * k, d)
    gram = flat @ flat.T
    norms = np.diag(gram)
    worst = 0.0

    def bump(val):
        nonlocal worst
        worst = max(worst, float(val))

    # sum of per-terminal assignment masses is 1 at every vertex
    mass = Y.reshape(k + 1, k, d)
    bump(np.abs((mass * mass).sum(axis=(1, 2)) - 1.0).max())
    # pinned terminals
    bump(np.abs([np.dot(Y[i, i], Y[i, i]) - 1.0 for i in range(k)]).max())
    # per-vertex orthogonality across assignments
    for u in range(k + 1):
        gi = Y[u] @ Y[u].T
        off = gi - np.diag(np.diag(gi))
        bump(np.abs(off).max())
    # consistency: y_{u,i}·sum_j y_{v,j} = ||y_{u,i}||² for all u, v, i
    sums = Y.sum(axis=1)
    for u in range(k + 1):
        for i in range(k):
            want = float(np.dot(Y[u, i], Y[u, i]))
            got = sums @ Y[u, i]
            bump(np.abs(got - want).max())
    # nonnegativity and origin rows over all pairs of assignment vectors
    bump(max(0.0, -gram.min()))
    bump(max(0.0, (gram - np.minimum(norms[:, None], norms[None, :])).max()))
    # full l2^2 triangle family
    dist = norms[:, None] + norms[None, :] - 2 * gram
    N = len(flat)
    for mid in range(N):
        viol = dist - dist[:, mid][:, None] - dist[mid][None, :]
        viol[mid, :] = 0
        viol[:, mid] = 0
        np.fill_diagonal(viol, 0)
        bump(viol.max())

    if worst > tol:
        raise ContractError(
            f"fractional solution violates a constraint by {worst:g}")

    g, terminals = star_with_terminals(k)
    per_i = []
    for i in range(k):
        total = 0.0
        for (a, b, w) in g.edges():
            diff = Y[a, i] - Y[b, i]
            total += w * float(diff @ diff)
        per_i.append(total)
    fractional = max(per_i)
    from .oracle import exact_multiway
    _, integral = exact_multiway(g, terminals, cap=k + 1)
    center_ok = bool(np.allclose(
        [np.dot(Y[k, i], Y[k, i]) for i in range(k)], 1.0 / k, atol=tol))
    return GapReport(k=k, fractional=float(fractional),
                     integral=float(integral),
                     ratio=float(integral / fractional),
                     max_residual=worst, center_norms_ok=center_ok)


# ---------------------------------------------------------------------------
# reduction: min-sum balanced partitioning via min-max multiway cut


def mmmc_gadget(g: Graph, k: int, B: float) -> tuple[Graph, list[int]]:
    """G_B: add k terminals, each joined to every original vertex at B/n."""
    n = g.n
    edges = list(g.edges())
    for i in range(k):
        t = n + i
        for u in range(n):
            edges.append((t, u, B / n))
    labels = None
    if g.labels is not None:
        labels = list(g.labels) + [f"_t{i + 1}" for i in range(k)]
    return Graph(n + k, edges, labels=labels), [n + i for i in range(k)]


@dataclass
class ReductionResult:
    partition: Partition
    B_used: float
    minsum_cost: float
    balance: int
    tried: list[float]


def _minsum_cost(g: Graph, parts) -> float:
    labels = -np.ones(g.n, dtype=np.int64)
    for i, p in enumerate(parts):
        labels[np.asarray(sorted(p), dtype=np.int64)] = i
    crossing = labels[g.edge_u] != labels[g.edge_v]
    return float(g.edge_w[crossing].sum())


def reduce_mmmc_to_ksum(g: Graph, k: int, mmmc_solver,
                        rho_hat: float = 1.0) -> ReductionResult:
    """Sweep B over powers of two, solve Min-Max Multiway Cut on each G_B,
    and keep the cheapest (10·ρ̂)-balanced induced partition of V."""
    if g.total_weight <= 0:
        raise InputError("reduction needs positive total weight")
    imax = max(0, math.ceil(math.log2(g.total_weight)))
    tried = [float(2 ** i) for i in range(imax + 1)]
    balance_cap = 10 * rho_hat * g.n / k
    best = None
    for B in tried:
        gb, terminals = mmmc_gadget(g, k, B)
        partition = mmmc_solver(gb, terminals)
        induced = [[v for v in part if v < g.n] for part in partition.parts]
        induced = [p for p in induced if p]
        if max((len(p) for p in induced), default=0) > balance_cap + 1e-9:
            continue
        cost = _minsum_cost(g, induced)
        if best is None or cost < best[0]:
            best = (cost, B, induced)
    if best is None:
        raise InfeasibleError(
            f"no B in the sweep produced a {10 * rho_hat:g}-balanced partition")
    cost, B_used, parts = best
    partition = Partition(g.n, parts)
    return ReductionResult(partition=partition, B_used=B_used,
                           minsum_cost=cost,
                           balance=max(len(p) for p in parts), tried=tried)


# ---------------------------------------------------------------------------
# recursive bicriteria boosting


@dataclass
class BoostResult:
    partition: Partition
    depth: int
    k_levels: list[int]
    size_caps: list[int]
    instances_per_level: list[int]


def recursive_boost(g: Graph, k: int, eps: float,
                    bicriteria_solver) -> BoostResult:
    """Boost an (α, k^(1-ε))-bicriteria min-sum partitioner to 3^(2/ε) balance.

    Levels run k_i ≈ k^((1-ε/2)^i) until k_t ≤ 3^(2/ε); each level-i
    instance is split by the solver and its parts are padded with dummy
    singletons to a common size before recursing.  Dummies are stripped at
    the bottom and small pieces are merged pairwise up to n/k.
    """
    if not (0 < eps <= 2):
        raise InputError(f"eps must be in (0,2], got {eps}")
    if k < 1:
        raise InputError("k must be >= 1")
    limit = 3.0 ** (2.0 / eps)
    k_levels = [k]
    while k_levels[-1] > limit:
        nxt = max(2, math.ceil(k_levels[-1] ** (1 - eps / 2)))
        if nxt >= k_levels[-1]:
            nxt = k_levels[-1] - 1
        k_levels.append(nxt)
    depth = len(k_levels) - 1
    n = g.n

    # an instance is (graph, real_ids) where dummy vertices have real_id -1
    instances = [(g, np.arange(n, dtype=np.int64))]
    counts = [1]
    size_caps = [math.ceil(n / k * k_levels[0])]
    for lvl in range(depth):
        ki = k_levels[lvl]
        cap = math.ceil(instances[0][0].n / ki * ki ** (1 - eps))
        nxt_size = max(cap, math.ceil(instances[0][0].n / ki * k_levels[lvl + 1]))
        size_caps.append(nxt_size)
        nxt_instances = []
        for inst_g, ids in instances:
            part = bicriteria_solver(inst_g, ki, cap)
            if len(part.parts) > ki:
                raise ContractError(
                    f"solver returned {len(part.parts)} > k_i = {ki} parts")
            for p in part.parts:
                if len(p) > cap:
                    raise ContractError(
                        f"solver part of size {len(p)} exceeds its cap {cap}")
                sub, old = inst_g.induced(p)
                sub_ids = ids[old]
                pad = nxt_size - sub.n
                if pad:
                    padded = Graph(sub.n + pad, list(sub.edges()))
                    sub_ids = np.concatenate(
                        [sub_ids, -np.ones(pad, dtype=np.int64)])
                    sub = padded
                nxt_instances.append((sub, sub_ids))
        instances = nxt_instances
        counts.append(len(instances))
        if len(instances) > k ** (2 / eps) + 1e-9:
            raise ContractError("level instance count exceeded k^(2/eps)")

    pieces = []
    for inst_g, ids in instances:
        real = sorted(int(v) for v in ids if v >= 0)
        if real:
            pieces.append(real)
    # merge pairs of small pieces; at most one piece below n/k can remain
    target = n / k
    pieces.sort(key=len)
    merged = [set(p) for p in pieces]
    while True:
        small = [i for i, p in enumerate(merged) if p and len(p) < target]
        if len(small) < 2:
            break
        a, b = small[0], small[1]
        merged[a] |= merged[b]
        merged[b] = set()
        merged.sort(key=len)
    final = [sorted(p) for p in merged if p]
    cap_final = limit * n / k
    if len(final) > k:
        raise ContractError(f"{len(final)} parts after merging, want <= {k}")
    for p in final:
        if len(p) > cap_final + 1e-9:
            raise ContractError("a final part exceeds 3^(2/eps)·n/k")
    return BoostResult(partition=Partition(n, final), depth=depth,
                       k_levels=k_levels, size_caps=size_caps,
                       instances_per_level=counts)


# ---------------------------------------------------------------------------
# random families


def gen_random(family: str, params: dict, seed: int) -> Graph:
    """Reproducible generators: gnp, grid, tree, planar-triangulation."""
    rng = stream(seed, "instance")
    if family == "gnp":
        n = int(params["n"])
        p = float(params.get("p", 0.5))
        wlo, whi = params.get("weights", (1, 1))
        edges = []
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() < p:
                    w = float(rng.integers(wlo, whi + 1)) if whi > wlo else float(wlo)
                    edges.append((u, v, w))
        return Graph(n, edges)
    if family == "grid":
        rows, cols = int(params["rows"]), int(params["cols"])
        def vid(r, c):
            return r * cols + c
        edges = []
        for r in range(rows):
            for c in range(cols):
                if c + 1 < cols:
                    edges.append((vid(r, c), vid(r, c + 1), 1.0))
                if r + 1 < rows:
                    edges.append((vid(r, c), vid(r + 1, c), 1.0))
        return Graph(rows * cols, edges)
    if family == "tree":
        n = int(params["n"])
        edges = [(int(rng.integers(0, v)), v, 1.0) for v in range(1, n)]
        return Graph(n, edges)
    if family == "planar-triangulation":
        from scipy.spatial import Delaunay
        n = int(params["n"])
        pts = rng.random((n, 2))
        tri = Delaunay(pts)
        pairs = set()
        for simplex in tri.simplices:
            for a in range(3):
                u, v = int(simplex[a]), int(simplex[(a + 1) % 3])
                pairs.add((min(u, v), max(u, v)))
        return Graph(n, [(u, v, 1.0) for (u, v) in sorted(pairs)])
    raise InputError(f"unknown family {family!r}")
