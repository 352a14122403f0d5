"""Reading and writing instances.

Two formats:

* edge-list text: one header line ``n m``, then ``m`` lines ``u v w``;
* JSON: ``{"n":..., "edges": [[u,v,w],...], "measures": {"mu": [...],
  "eta": [...]}, "terminals": [[...],...]}`` with measures/terminals optional.

Vertex tokens that are not already dense integers ``0..n-1`` are remapped in
order of first appearance; the label table is kept on the graph.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .graphs import Graph, InputError, Measure


@dataclass
class Instance:
    graph: Graph
    mu: Measure | None = None
    eta: Measure | None = None
    terminals: list[list[int]] | None = None


def _remap(n, raw_edges):
    """Map arbitrary vertex tokens to 0..n-1, preserving int ids if dense."""
    tokens = []
    seen = set()
    for u, v, _ in raw_edges:
        for t in (u, v):
            if t not in seen:
                seen.add(t)
                tokens.append(t)
    dense = all(isinstance(t, int) and 0 <= t < n for t in seen)
    if dense:
        return [(int(u), int(v), w) for u, v, w in raw_edges], None
    if len(seen) > n:
        raise InputError(f"{len(seen)} distinct vertex labels but n={n}")
    table = {t: i for i, t in enumerate(tokens)}
    labels = tokens + [f"_isolated_{i}" for i in range(len(tokens), n)]
    return [(table[u], table[v], w) for u, v, w in raw_edges], labels


def _int_token(tok):
    try:
        return int(tok)
    except ValueError:
        return tok


def load_edgelist(path) -> Instance:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise InputError("empty edge-list file")
    head = lines[0].split()
    if len(head) != 2:
        raise InputError("header must be 'n m'")
    n, m = int(head[0]), int(head[1])
    if len(lines) - 1 != m:
        raise InputError(f"expected {m} edge lines, found {len(lines) - 1}")
    raw = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) not in (2, 3):
            raise InputError(f"bad edge line: {ln!r}")
        w = float(parts[2]) if len(parts) == 3 else 1.0
        raw.append((_int_token(parts[0]), _int_token(parts[1]), w))
    edges, labels = _remap(n, raw)
    return Instance(graph=Graph(n, edges, labels=labels))


def dump_edgelist(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{g.n} {g.m}\n")
        for u, v, w in g.edges():
            fh.write(f"{u} {v} {w:.17g}\n")


def load_json(path) -> Instance:
    with open(path) as fh:
        doc = json.load(fh)
    n = int(doc["n"])
    raw = [(_int_token(e[0]), _int_token(e[1]),
            float(e[2]) if len(e) > 2 else 1.0) for e in doc.get("edges", [])]
    edges, labels = _remap(n, raw)
    g = Graph(n, edges, labels=labels)
    measures = doc.get("measures") or {}
    mu = Measure(measures["mu"]) if "mu" in measures else None
    eta = Measure(measures["eta"]) if "eta" in measures else None
    terminals = None
    if doc.get("terminals") is not None:
        terminals = [[int(t) for t in group] for group in doc["terminals"]]
    return Instance(graph=g, mu=mu, eta=eta, terminals=terminals)


def dump_json(g: Graph, path, mu: Measure | None = None,
              eta: Measure | None = None, terminals=None) -> None:
    doc = {"n": g.n, "edges": [[int(u), int(v), w] for u, v, w in g.edges()]}
    measures = {}
    if mu is not None:
        measures["mu"] = mu.values.tolist()
    if eta is not None:
        measures["eta"] = eta.values.tolist()
    if measures:
        doc["measures"] = measures
    if terminals is not None:
        doc["terminals"] = [[int(t) for t in group] for group in terminals]
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_instance(path, fmt: str = "auto") -> Instance:
    if fmt == "auto":
        fmt = "json" if str(path).endswith(".json") else "edgelist"
    if fmt == "json":
        return load_json(path)
    if fmt == "edgelist":
        return load_edgelist(path)
    raise InputError(f"unknown format {fmt!r}")
