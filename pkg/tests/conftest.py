"""Shared test helpers: independent brute-force oracles.

These are deliberately written in plain Python over edge lists, with no
shared code paths with the library implementations they check.
"""

from __future__ import annotations

import itertools
import random

import numpy as np
import pytest


def naive_cut(edges, inside) -> float:
    inside = set(inside)
    return sum(w for (u, v, w) in edges if (u in inside) != (v in inside))


def naive_sse(n, edges, mu, eta, rho):
    """Minimize (cut/w(E))·(1/eta(S)) over nonempty S with mu(S) <= rho."""
    wE = sum(w for (_, _, w) in edges)
    best = None
    for r in range(1, n + 1):
        for combo in itertools.combinations(range(n), r):
            s = set(combo)
            if sum(mu[v] for v in s) > rho + 1e-12:
                continue
            es = sum(eta[v] for v in s)
            if es <= 0:
                continue
            obj = (naive_cut(edges, s) / wE if wE else 0.0) / es
            if best is None or obj < best[0] - 1e-15:
                best = (obj, s)
    return best


def naive_min_boundary(n, edges, mu, eta, rho, H):
    wE = sum(w for (_, _, w) in edges)
    best = None
    for r in range(1, n + 1):
        for combo in itertools.combinations(range(n), r):
            s = set(combo)
            if sum(mu[v] for v in s) > rho + 1e-12:
                continue
            if sum(eta[v] for v in s) < H - 1e-12:
                continue
            obj = naive_cut(edges, s) / wE if wE else 0.0
            if best is None or obj < best - 1e-15:
                best = obj
    return best


def naive_ucut(n, edges, y, tau, rho):
    need = tau * sum(y)
    cap = int(rho * n + 1e-12)
    best = None
    for r in range(1, cap + 1):
        for combo in itertools.combinations(range(n), r):
            s = set(combo)
            if sum(y[v] for v in s) < need - 1e-12:
                continue
            d = naive_cut(edges, s)
            if best is None or d < best[0] - 1e-15:
                best = (d, s)
    return best


def naive_bisection(n, edges, cap):
    """Min-max value over 2-partitions with both sides of size <= cap."""
    best = None
    for r in range(n - cap, cap + 1):
        for combo in itertools.combinations(range(1, n), r - 1):
            s = {0, *combo}
            d = naive_cut(edges, s)
            if best is None or d < best:
                best = d
    return best


def naive_multiway(n, edges, terminals):
    k = len(terminals)
    others = [v for v in range(n) if v not in set(terminals)]
    best = None
    for assign in itertools.product(range(k), repeat=len(others)):
        label = {}
        for i, t in enumerate(terminals):
            label[t] = i
        for v, a in zip(others, assign):
            label[v] = a
        val = max(
            naive_cut(edges, {v for v in range(n) if label[v] == i})
            for i in range(k))
        if best is None or val < best:
            best = val
    return best


def naive_minsum(n, edges, k, cap):
    best = None

    def rec(v, labels, used):
        nonlocal best
        if v == n:
            cost = sum(w for (a, b, w) in edges if labels[a] != labels[b])
            if best is None or cost < best:
                best = cost
            return
        for p in range(min(used + 1, k)):
            if labels.count(p) >= cap:
                continue
            rec(v + 1, labels + [p], max(used, p + 1))

    rec(0, [], 0)
    return best


def random_edges(rng, n, p=0.5, wmax=3):
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.append((u, v, float(rng.randint(1, wmax))))
    return edges


@pytest.fixture
def pyrng():
    return random.Random(20240911)


@pytest.fixture
def nprng():
    return np.random.default_rng(20240911)
