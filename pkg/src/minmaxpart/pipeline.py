"""End-to-end drivers: cover, aggregate, report.

Each driver expands one 64-bit seed into the named randomness streams
(cover, aggregate, separator), runs the covering loop with the requested
backend, aggregates, validates the output partition against its declared
caps, and returns a report.  Identical (input, flags, seed) gives identical
output.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .aggregation import aggregate, aggregate_with_terminals
from .covering import (CoveringLevelError, cover_minmax_cut,
                       cover_minmax_kpart, make_backend)
from .graphs import (Graph, InfeasibleError, InputError, Partition,
                     validate_partition)
from .rngstreams import stream
from .sse import RoundingConfig


@dataclass
class RunReport:
    partition: Partition
    max_boundary: float
    sum_boundary: float
    max_size: int
    size_cap: float
    cost_cap: float
    backend: str
    seed: int
    cover_iterations: int = 0
    B: float = 0.0
    coverage_c: float = 0.0
    b_prime: float = 0.0
    terminal_parts: dict | None = None
    C_used: float | None = None
    D_used: float | None = None
    max_weighted_size: float | None = None
    audit_events: int = 0


def run_minmax_kpart(g: Graph, k: int, eps: float = 0.25,
                     backend: str = "exact", seed: int = 0,
                     config: RoundingConfig | None = None) -> RunReport:
    """Cover with τ = ρ = 1/k, then aggregate into ≤ k bounded parts."""
    if k < 1:
        raise InputError("k must be >= 1")
    if k == 1 or g.n <= 1:
        part = Partition(g.n, [list(range(g.n))] if g.n else [])
        return RunReport(partition=part, max_boundary=0.0, sum_boundary=0.0,
                         max_size=g.n, size_cap=max(g.n, 1), cost_cap=0.0,
                         backend=backend, seed=seed)
    be = make_backend(backend, epsilon=eps, config=config)
    cover = cover_minmax_kpart(g, k, be, stream(seed, "cover"))
    B = cover.max_delta
    c = k * cover.coverage_fraction()
    # the aggregation step runs at eps/2, so the part-size guarantee is
    # 2(1 + eps/2)·n/k = (2 + eps)·n/k
    eps_agg = eps / 2
    res = aggregate(g, cover.sets, k, c, B, eps_agg,
                    stream(seed, "aggregate"))
    part = res.partition
    boundaries = part.boundaries(g)
    size_cap = (2 + eps) * g.n / k
    cost_cap = 2 * res.b_prime / eps_agg
    check = validate_partition(g, part, k, size_cap, cost_cap)
    assert check.ok, f"driver produced an invalid partition: {check}"
    return RunReport(partition=part, max_boundary=max(boundaries, default=0.0),
                     sum_boundary=sum(boundaries), max_size=check.max_size,
                     size_cap=size_cap, cost_cap=cost_cap, backend=backend,
                     seed=seed, cover_iterations=cover.iterations, B=B,
                     coverage_c=c, b_prime=res.b_prime,
                     audit_events=res.audit.events)


def _shrink_terminal_sets(g: Graph, terminal_sets):
    """Contract each terminal set to its smallest member; carry weights."""
    rep_of = {}
    for idx, group in enumerate(terminal_sets):
        if not group:
            continue
        rep = min(int(t) for t in group)
        for t in group:
            t = int(t)
            if t in rep_of:
                raise InputError("terminal sets must be disjoint")
            rep_of[t] = rep
    forward = {}
    new_id = 0
    for v in range(g.n):
        if rep_of.get(v, v) == v:  # survives contraction
            forward[v] = new_id
            new_id += 1
    mapping = np.zeros(g.n, dtype=np.int64)
    for v in range(g.n):
        mapping[v] = forward[rep_of.get(v, v)]
    n2 = new_id
    weights = np.zeros(n2)
    for v in range(g.n):
        weights[mapping[v]] += 1.0
    merged: dict[tuple[int, int], float] = {}
    for u, v, w in g.edges():
        a, b = int(mapping[u]), int(mapping[v])
        if a == b:
            continue
        key = (min(a, b), max(a, b))
        merged[key] = merged.get(key, 0.0) + w
    shrunk = Graph(n2, [(a, b, w) for (a, b), w in sorted(merged.items())])
    reps = [int(mapping[min(int(t) for t in group)])
            for group in terminal_sets if group]
    return shrunk, mapping, weights, reps


def run_minmax_cut(g: Graph, terminal_sets, k: int, rho: float,
                   C: float | None = None, D: float | None = None,
                   eps: float = 0.25, backend: str = "exact", seed: int = 0,
                   config: RoundingConfig | None = None) -> RunReport:
    """The generalized driver: terminal sets, size cap ρn, caps C and D.

    When C or D is missing, sweeps C over powers of two (and D over
    {C, kC}) and keeps the first feasible pair.
    """
    if not (0 < rho <= 1):
        raise InputError("rho must be in (0,1]")
    if len([T for T in terminal_sets if T]) > k:
        raise InputError("more nonempty terminal sets than parts")
    shrunk, mapping, weights, reps = _shrink_terminal_sets(g, terminal_sets)
    be = make_backend(backend, epsilon=eps, config=config)
    rng_cover = stream(seed, "cover")

    def attempt(Cv, Dv):
        cover = cover_minmax_cut(shrunk, k, rho, Cv, Dv, reps, be, rng_cover,
                                 size_weights=weights)
        B = be.alpha_hat * Cv
        res = aggregate_with_terminals(shrunk, cover.sets, k, rho, B, eps,
                                       reps, stream(seed, "aggregate"),
                                       size_weights=weights)
        return cover, res

    if C is not None:
        c_candidates = [float(C)]
    else:
        top = max(1.0, g.total_weight)
        c_candidates = []
        j = 0
        while 2.0 ** j <= 2 * top:
            c_candidates.append(2.0 ** j)
            j += 1
    pairs = []
    for Cv in c_candidates:
        pairs.extend([(Cv, float(D))] if D is not None
                     else [(Cv, Cv), (Cv, k * Cv)])
    last_err = None
    for Cv, Dv in pairs:
        try:
            cover, res = attempt(Cv, Dv)
        except (CoveringLevelError, InfeasibleError) as exc:
            last_err = exc
            continue
        break
    else:
        raise InfeasibleError(f"no (C, D) pair was feasible: {last_err}")

    # expand contracted vertices back to the original ids
    parts = []
    for p in res.partition.parts:
        members = set(int(x) for x in p)
        parts.append(sorted(v for v in range(g.n) if mapping[v] in members))
    partition = Partition(g.n, parts)
    terminal_parts = {}
    for gi, group in enumerate([T for T in terminal_sets if T]):
        rep = reps[gi]
        pidx = res.terminal_part[rep]
        terminal_parts[gi] = pidx
        for t in group:
            assert partition.part_of[int(t)] == pidx, \
                "a terminal escaped its part"
    boundaries = partition.boundaries(g)
    wsizes = [float(weights[[int(x) for x in p]].sum())
              for p in res.partition.parts]
    size_cap = (2 + eps) * rho * g.n
    cost_cap = 8 * res.b_prime
    assert max(wsizes, default=0.0) <= size_cap + 1e-9
    check = validate_partition(g, partition, k, g.n, cost_cap)
    assert check.disjoint and check.covers and check.k_ok
    return RunReport(partition=partition,
                     max_boundary=max(boundaries, default=0.0),
                     sum_boundary=sum(boundaries),
                     max_size=max((len(p) for p in parts), default=0),
                     size_cap=size_cap, cost_cap=cost_cap, backend=backend,
                     seed=seed, cover_iterations=cover.iterations,
                     B=be.alpha_hat * Cv, coverage_c=k * cover.coverage_fraction(),
                     b_prime=res.b_prime, terminal_parts=terminal_parts,
                     C_used=Cv, D_used=Dv,
                     max_weighted_size=max(wsizes, default=0.0),
                     audit_events=res.audit.events)


def run_minmax_multiway(g: Graph, terminals, eps: float = 0.25,
                        backend: str = "exact", seed: int = 0,
                        config: RoundingConfig | None = None) -> RunReport:
    """Min-max multiway cut: singleton terminal sets, no balance (ρ = 1)."""
    terminals = [int(t) for t in terminals]
    if len(set(terminals)) != len(terminals):
        raise InputError("terminals must be distinct")
    return run_minmax_cut(g, [[t] for t in terminals], k=len(terminals),
                          rho=1.0, eps=eps, backend=backend, seed=seed,
                          config=config)


# ---------------------------------------------------------------------------
# benchmark harness


def bench(tasks, seeds, timings: bool = True,
          config: RoundingConfig | None = None) -> list[dict]:
    """Run (task, seed) pairs and emit one record per run.

    A task is a dict with keys: id, graph (Graph), kind
    ("kpart" | "multiway"), and kind-specific parameters (k / terminals,
    eps, backend).  Records are emitted in deterministic order; wall time
    is included only when ``timings`` is set.
    """
    records = []
    for task in tasks:
        g = task["graph"]
        for seed in seeds:
            t0 = time.perf_counter()
            if task["kind"] == "kpart":
                rep = run_minmax_kpart(g, task["k"],
                                       eps=task.get("eps", 0.25),
                                       backend=task.get("backend", "exact"),
                                       seed=seed, config=config)
            elif task["kind"] == "multiway":
                rep = run_minmax_multiway(g, task["terminals"],
                                          eps=task.get("eps", 0.25),
                                          backend=task.get("backend", "exact"),
                                          seed=seed, config=config)
            else:
                raise InputError(f"unknown bench kind {task['kind']!r}")
            elapsed = time.perf_counter() - t0
            rec = {
                "instance": task["id"],
                "strategy": f"{task['kind']}-{task.get('backend', 'exact')}",
                "seed": int(seed),
                "max_boundary": rep.max_boundary,
                "sum_boundary": rep.sum_boundary,
                "max_size": rep.max_size,
            }
            if timings:
                rec["wall_time_s"] = round(elapsed, 6)
            records.append(rec)
    return records
