import itertools

import numpy as np
import pytest

from minmaxpart.graphs import (Graph, InputError, Measure, Partition,
                               cut_report, cut_weight, expansion,
                               validate_partition, weighted_expansion)

from conftest import naive_cut, random_edges


def triangle():
    return Graph(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])


def cycle(n):
    return Graph(n, [(i, (i + 1) % n, 1.0) for i in range(n)])


def test_cut_weight_examples():
    assert cut_weight(triangle(), {0}) == 2.0
    assert cut_weight(triangle(), set()) == 0.0
    # the k=4 spider tree: a full arm has boundary 1
    from minmaxpart.instances import gen_greedy_bad_tree
    g = gen_greedy_bad_tree(4)
    arm = [g.labels.index(f"u_1,{j}") for j in range(1, 5)]
    assert cut_weight(g, arm) == 1.0


def test_expansion_examples():
    assert expansion(triangle(), {0}) == 2.0
    path = Graph(3, [(0, 1, 1.0), (1, 2, 1.0)])
    assert expansion(path, {0, 1}) == 0.5
    # derived: minimum expansion over 3-subsets of the 6-cycle is 2/3,
    # attained by consecutive arcs
    g = cycle(6)
    best = min(naive_cut(list(g.edges()), set(c)) / 3
               for c in itertools.combinations(range(6), 3))
    assert best == pytest.approx(2 / 3)
    assert expansion(g, {0, 1, 2}) == pytest.approx(best)
    with pytest.raises(InputError):
        expansion(g, set())


def test_weighted_expansion(pyrng):
    g = cycle(4)
    eta = Measure.uniform(4)
    assert weighted_expansion(g, {0, 1}, eta) == pytest.approx(1.0)
    assert weighted_expansion(g, range(4), eta) == 0.0
    edges = random_edges(pyrng, 8)
    if edges:
        g = Graph(8, edges)
        eta = Measure(np.arange(1.0, 9.0) / 36.0)
        s = {1, 4, 6}
        direct = (naive_cut(edges, s) / sum(w for *_, w in edges)) / \
            sum(eta.values[v] for v in s)
        assert weighted_expansion(g, s, eta) == pytest.approx(direct)
    with pytest.raises(InputError):
        weighted_expansion(g, {0}, Measure([0.0] * 7 + [1.0]))


def test_graph_invariants():
    g = triangle()
    assert g.total_weight == pytest.approx(3.0, rel=1e-12)
    with pytest.raises(InputError):
        Graph(3, [(0, 0, 1.0)])
    with pytest.raises(InputError):
        Graph(3, [(0, 5, 1.0)])
    with pytest.raises(InputError):
        Graph(3, [(0, 1, -2.0)])
    with pytest.warns(UserWarning):
        g2 = Graph(2, [(0, 1, 1.0), (1, 0, 2.5)])
    assert g2.total_weight == 3.5 and g2.m == 1


def test_cut_symmetry_and_submodularity(pyrng):
    # cut(S) == cut(complement); submodularity checked exhaustively at n<=6
    for trial in range(5):
        n = pyrng.randint(3, 6)
        edges = random_edges(pyrng, n)
        g = Graph(n, edges)
        subsets = [set(c) for r in range(n + 1)
                   for c in itertools.combinations(range(n), r)]
        for s in subsets:
            comp = set(range(n)) - s
            assert cut_weight(g, s) == pytest.approx(cut_weight(g, comp))
        for a in subsets:
            for b in subsets:
                lhs = cut_weight(g, a) + cut_weight(g, b)
                rhs = cut_weight(g, a | b) + cut_weight(g, a & b)
                assert lhs >= rhs - 1e-9


def test_partition_boundary_double_counts_crossings(pyrng):
    for trial in range(5):
        n = pyrng.randint(4, 9)
        edges = random_edges(pyrng, n)
        g = Graph(n, edges)
        labels = [pyrng.randint(0, 2) for _ in range(n)]
        parts = [[v for v in range(n) if labels[v] == i] for i in range(3)]
        parts = [p for p in parts if p]
        p = Partition(n, parts)
        inter = sum(w for (u, v, w) in edges if labels[u] != labels[v])
        assert sum(p.boundaries(g)) == pytest.approx(2 * inter)


def test_validate_partition_reports():
    g = cycle(4)
    p = Partition(4, [[0, 1], [2, 3]])
    rep = validate_partition(g, p, 2, size_cap=2, cost_cap=2.0)
    assert rep.ok and rep.max_boundary == 2.0 and rep.max_size == 2
    bad = validate_partition(g, p, 1, size_cap=1, cost_cap=0.5)
    assert not bad.ok
    assert bad.oversized_parts == [0, 1] and bad.overcost_parts == [0, 1]
    hole = Partition(4, [[0, 1], [2]])
    assert not validate_partition(g, hole, 2, 4, 10).covers


def test_measures():
    m = Measure.uniform(5)
    assert m.is_normalized()
    assert m.of({0, 3}) == pytest.approx(0.4)
    with pytest.raises(InputError):
        Measure([-0.1, 1.1])
    m2 = Measure.from_counts([2, 2, 4])
    assert m2.values.tolist() == [0.25, 0.25, 0.5]


def test_cut_report():
    g = cycle(6)
    rep = cut_report(g, {0, 1, 2})
    assert rep.set_size == 3 and rep.boundary == 2.0
    assert rep.expansion == pytest.approx(2 / 3)
    big = cut_report(g, {0, 1, 2, 3})
    assert big.expansion is None
