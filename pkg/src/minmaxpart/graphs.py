"""Weighted undirected graphs, vertex measures, cuts, and partitions.

These are the primitives shared by every solver in the package: an immutable
edge-weighted graph with a cached total weight, normalized vertex measures,
cut/expansion evaluators, and a partition container with a validation report.

Vertex ids are dense integers ``0..n-1``.  Loaders that accept arbitrary
labels remap them and keep the label table on the graph for output.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

REL_TOL = 1e-12


class InputError(ValueError):
    """Malformed input: bad vertex ids, negative weights, empty sets, ..."""


class InfeasibleError(RuntimeError):
    """The instance admits no feasible solution under the given constraints."""


class CapacityError(RuntimeError):
    """Instance exceeds the size cap of an exact enumeration routine."""


class ContractError(RuntimeError):
    """A pluggable component violated its declared contract."""


class Graph:
    """Immutable weighted undirected graph.

    Parallel edges in the input are merged by summing their weights (a
    warning is emitted); self-loops are rejected.  Weights are stored as
    64-bit floats, so integer weights below 2**53 round-trip exactly.
    """

    __slots__ = ("n", "edge_u", "edge_v", "edge_w", "total_weight", "labels",
                 "_adj_index", "_adj_nbr", "_adj_w", "_degw")

    def __init__(self, n: int, edges, labels=None):
        if n < 0:
            raise InputError(f"vertex count must be >= 0, got {n}")
        self.n = int(n)
        merged: dict[tuple[int, int], float] = {}
        dup = False
        for (u, v, w) in edges:
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u},{v}) out of range for n={n}")
            if w < 0:
                raise InputError(f"negative weight {w} on edge ({u},{v})")
            key = (u, v) if u < v else (v, u)
            if key in merged:
                dup = True
                merged[key] += w
            else:
                merged[key] = w
        if dup:
            warnings.warn("parallel edges merged by weight addition", stacklevel=2)
        keys = sorted(merged)
        self.edge_u = np.array([k[0] for k in keys], dtype=np.int64)
        self.edge_v = np.array([k[1] for k in keys], dtype=np.int64)
        self.edge_w = np.array([merged[k] for k in keys], dtype=np.float64)
        self.total_weight = float(self.edge_w.sum())
        self.labels = list(labels) if labels is not None else None
        if self.labels is not None and len(self.labels) != n:
            raise InputError("label table length must equal n")
        # CSR-style adjacency for O(deg) neighborhood scans.
        deg = np.zeros(n, dtype=np.int64)
        np.add.at(deg, self.edge_u, 1)
        np.add.at(deg, self.edge_v, 1)
        index = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=index[1:])
        nbr = np.zeros(index[-1], dtype=np.int64)
        wts = np.zeros(index[-1], dtype=np.float64)
        cursor = index[:-1].copy()
        for a, b, w in zip(self.edge_u, self.edge_v, self.edge_w):
            nbr[cursor[a]] = b
            wts[cursor[a]] = w
            cursor[a] += 1
            nbr[cursor[b]] = a
            wts[cursor[b]] = w
            cursor[b] += 1
        self._adj_index = index
        self._adj_nbr = nbr
        self._adj_w = wts
        self._degw = np.zeros(n, dtype=np.float64)
        np.add.at(self._degw, self.edge_u, self.edge_w)
        np.add.at(self._degw, self.edge_v, self.edge_w)

    @property
    def m(self) -> int:
        return len(self.edge_w)

    def neighbors(self, v: int):
        """Neighbor ids and edge weights of ``v`` as parallel arrays."""
        lo, hi = self._adj_index[v], self._adj_index[v + 1]
        return self._adj_nbr[lo:hi], self._adj_w[lo:hi]

    def weighted_degree(self, v: int) -> float:
        return float(self._degw[v])

    def edges(self):
        """Iterate ``(u, v, w)`` triples with ``u < v``."""
        return zip(self.edge_u.tolist(), self.edge_v.tolist(), self.edge_w.tolist())

    def induced(self, vertices) -> tuple["Graph", np.ndarray]:
        """Subgraph induced on ``vertices``; returns it with the old-id map."""
        vs = np.asarray(sorted(int(v) for v in vertices), dtype=np.int64)
        pos = -np.ones(self.n, dtype=np.int64)
        pos[vs] = np.arange(len(vs))
        keep = (pos[self.edge_u] >= 0) & (pos[self.edge_v] >= 0)
        edges = zip(pos[self.edge_u[keep]], pos[self.edge_v[keep]], self.edge_w[keep])
        labels = [self.labels[v] for v in vs] if self.labels is not None else None
        return Graph(len(vs), edges, labels=labels), vs

    def label_of(self, v: int):
        return self.labels[v] if self.labels is not None else v

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m}, w(E)={self.total_weight:g})"


def vertex_mask(n: int, s) -> np.ndarray:
    """Boolean membership mask for the vertex set ``s``."""
    if isinstance(s, np.ndarray) and s.dtype == bool:
        if len(s) != n:
            raise InputError("mask length mismatch")
        return s
    mask = np.zeros(n, dtype=bool)
    idx = np.asarray(list(s), dtype=np.int64)
    if idx.size:
        if idx.min() < 0 or idx.max() >= n:
            raise InputError("vertex id out of range")
        mask[idx] = True
    return mask


def cut_weight(g: Graph, s) -> float:
    """Total weight of edges with exactly one endpoint in ``s``."""
    mask = vertex_mask(g.n, s)
    crossing = mask[g.edge_u] != mask[g.edge_v]
    return float(g.edge_w[crossing].sum())


def expansion(g: Graph, s) -> float:
    """Edge expansion: cut weight divided by set size."""
    mask = vertex_mask(g.n, s)
    size = int(mask.sum())
    if size == 0:
        raise InputError("expansion of the empty set is undefined")
    return cut_weight(g, mask) / size


class Measure:
    """Nonnegative vertex weighting; μ, η, and covering weights y all use it."""

    __slots__ = ("values", "total")

    def __init__(self, values):
        vals = np.asarray(values, dtype=np.float64)
        if vals.ndim != 1:
            raise InputError("measure values must be a 1-d array")
        if (vals < 0).any():
            raise InputError("measure values must be nonnegative")
        self.values = vals
        self.total = float(vals.sum())

    @staticmethod
    def uniform(n: int) -> "Measure":
        return Measure(np.full(n, 1.0 / n))

    @staticmethod
    def from_counts(counts) -> "Measure":
        """Normalize arbitrary nonnegative weights to total 1."""
        vals = np.asarray(counts, dtype=np.float64)
        tot = vals.sum()
        if tot <= 0:
            raise InputError("cannot normalize a zero measure")
        return Measure(vals / tot)

    @property
    def n(self) -> int:
        return len(self.values)

    def is_normalized(self) -> bool:
        return abs(self.total - 1.0) <= REL_TOL * max(1.0, abs(self.total))

    def of(self, s) -> float:
        """Measure of a vertex set."""
        mask = vertex_mask(self.n, s)
        return float(self.values[mask].sum())

    def __getitem__(self, v):
        return float(self.values[v])

    def __repr__(self):
        return f"Measure(n={self.n}, total={self.total:g})"


def weighted_expansion(g: Graph, s, eta: Measure) -> float:
    """Normalized boundary per η-mass: (δ(S)/w(E)) / η(S)."""
    mask = vertex_mask(g.n, s)
    es = eta.of(mask)
    if es <= 0:
        raise InputError("weighted expansion needs eta(S) > 0")
    boundary = cut_weight(g, mask)
    if g.total_weight == 0:
        return 0.0
    return (boundary / g.total_weight) / es


@dataclass(frozen=True)
class CutReport:
    """Summary of a single cut: size, boundary, measures, expansion."""

    set_size: int
    boundary: float
    mu: float
    eta: float
    expansion: float | None  # only defined for |S| <= n/2


def cut_report(g: Graph, s, mu: Measure | None = None,
               eta: Measure | None = None) -> CutReport:
    mask = vertex_mask(g.n, s)
    size = int(mask.sum())
    boundary = cut_weight(g, mask)
    phi = boundary / size if 0 < size <= g.n / 2 else None
    return CutReport(
        set_size=size,
        boundary=boundary,
        mu=mu.of(mask) if mu is not None else size / g.n if g.n else 0.0,
        eta=eta.of(mask) if eta is not None else size / g.n if g.n else 0.0,
        expansion=phi,
    )


class Partition:
    """Disjoint vertex sets covering V (validation is separate, report-only)."""

    __slots__ = ("n", "parts", "part_of")

    def __init__(self, n: int, parts):
        self.n = int(n)
        self.parts = [np.asarray(sorted(int(v) for v in p), dtype=np.int64)
                      for p in parts]
        self.part_of = -np.ones(n, dtype=np.int64)
        for i, p in enumerate(self.parts):
            self.part_of[p] = i

    @staticmethod
    def from_assignment(assignment) -> "Partition":
        assignment = np.asarray(assignment, dtype=np.int64)
        ids = sorted(set(assignment.tolist()))
        return Partition(len(assignment),
                         [np.flatnonzero(assignment == i) for i in ids])

    @property
    def k(self) -> int:
        return len(self.parts)

    def sizes(self) -> list[int]:
        return [len(p) for p in self.parts]

    def boundaries(self, g: Graph) -> list[float]:
        return [cut_weight(g, p) for p in self.parts]

    def __repr__(self):
        return f"Partition(n={self.n}, k={self.k}, sizes={self.sizes()})"


@dataclass
class PartitionReport:
    """Report-only validation of a partition against caps."""

    disjoint: bool
    covers: bool
    k_ok: bool
    oversized_parts: list[int] = field(default_factory=list)
    overcost_parts: list[int] = field(default_factory=list)
    max_boundary: float = 0.0
    sum_boundary: float = 0.0
    max_size: int = 0

    @property
    def ok(self) -> bool:
        return (self.disjoint and self.covers and self.k_ok
                and not self.oversized_parts and not self.overcost_parts)


def validate_partition(g: Graph, p: Partition, k: int, size_cap: float,
                       cost_cap: float) -> PartitionReport:
    """Check disjointness/coverage and per-part size and boundary caps."""
    seen = np.zeros(g.n, dtype=np.int64)
    for part in p.parts:
        seen[part] += 1
    boundaries = p.boundaries(g)
    sizes = p.sizes()
    return PartitionReport(
        disjoint=bool((seen <= 1).all()),
        covers=bool((seen >= 1).all()),
        k_ok=len(p.parts) <= k,
        oversized_parts=[i for i, s in enumerate(sizes) if s > size_cap + REL_TOL],
        overcost_parts=[i for i, b in enumerate(boundaries)
                        if b > cost_cap * (1 + REL_TOL) + REL_TOL],
        max_boundary=max(boundaries, default=0.0),
        sum_boundary=float(sum(boundaries)),
        max_size=max(sizes, default=0),
    )
