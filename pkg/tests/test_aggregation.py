import itertools

import numpy as np
import pytest

from minmaxpart.aggregation import (aggregate, aggregate_with_terminals,
                                    check_agg_lemma)
from minmaxpart.covering import ExactCoverBackend, cover_minmax_kpart
from minmaxpart.graphs import Graph, InputError, cut_weight

from conftest import random_edges


def rng(seed=0):
    return np.random.default_rng(seed)


def cycle(n):
    return Graph(n, [(i, (i + 1) % n, 1.0) for i in range(n)])


class TestAggregate:
    def test_partition_cover_passes_through(self):
        g = cycle(8)
        cover = [[0, 1, 2, 3], [4, 5, 6, 7]]
        B = max(cut_weight(g, s) for s in cover)
        res = aggregate(g, cover, 2, c=1.0, B=B, epsilon=0.25, rng=rng(0))
        assert len(res.partition.parts) <= 2
        assert all(len(p) <= 2 * 1.25 * 4 for p in res.partition.parts)

    def test_uncrossing_fires_and_pays(self):
        # two small sets claimed early shred the long middle set into
        # fragments whose boundary exceeds 2B, forcing replacements
        g = Graph(16, [(i, i + 1, 1.0) for i in range(15)])
        cover = [[5, 6], [8, 9], list(range(4, 12)), [0, 1, 2, 3],
                 [12, 13, 14, 15]]
        B = max(cut_weight(g, s) for s in cover)
        fired = 0
        for seed in range(24):
            res = aggregate(g, cover, 4, c=4 / len(cover), B=B,
                            epsilon=0.25, rng=rng(seed))
            fired += res.audit.step2_iterations
            if res.audit.step2_iterations:
                assert res.audit.step2_min_drop >= 2 * B - 1e-9
        assert fired > 0  # the potential argument was exercised

    def test_pipeline_cover_outputs_capped_partition(self, pyrng):
        for (n, k, seed) in [(9, 3, 0), (12, 4, 1), (10, 2, 2)]:
            edges = random_edges(pyrng, n, p=0.5)
            g = Graph(n, edges)
            cover = cover_minmax_kpart(g, k, ExactCoverBackend(), rng(seed))
            c = k * cover.coverage_fraction()
            res = aggregate(g, cover.sets, k, c, cover.max_delta, 0.25,
                            rng(seed))
            p = res.partition
            assert len(p.parts) <= k
            assert max(len(q) for q in p.parts) <= 2 * 1.25 * n / k + 1e-9
            for q in p.parts:
                assert cut_weight(g, q) <= 2 * res.b_prime / 0.25 + 1e-9

    def test_precondition_violations(self):
        g = cycle(6)
        with pytest.raises(InputError):
            aggregate(g, [[0, 1], [2, 3]], 2, c=1.0, B=2.0, epsilon=0.25,
                      rng=rng(0))  # vertices 4, 5 uncovered
        with pytest.raises(InputError):
            aggregate(g, [[0, 1, 2, 3, 4], [5, 0]], 3, c=0.5, B=10.0,
                      epsilon=0.25, rng=rng(0))  # a set above 2n/k
        with pytest.raises(InputError):
            aggregate(g, [[0, 1, 2], [3, 4, 5]], 2, c=2.0, B=0.5,
                      epsilon=0.25, rng=rng(0))  # boundary above B


class TestLemma:
    def test_trivial_and_arithmetic(self):
        assert check_agg_lemma([0.5], [0.5], 1, 1, 1, 1).ok
        chk = check_agg_lemma([0.6, 0.6, 0.6], [0.0, 0.0, 0.0], 1, 1, 1.8, 1)
        assert chk.ok and chk.t == 3

    def test_reports_mergeable_pair(self):
        chk = check_agg_lemma([0.2, 0.2], [0.2, 0.2], 1, 1, 1, 1)
        assert not chk.ok and chk.mergeable_pair == (0, 1)

    def test_fuzz_maximal_families(self, pyrng):
        # randomized families merged to maximality never violate the bound
        for _ in range(1000):
            t = pyrng.randint(2, 12)
            a = [pyrng.random() for _ in range(t)]
            b = [pyrng.random() for _ in range(t)]
            A = B = 1.0
            merged = True
            while merged:
                merged = False
                for i, j in itertools.combinations(range(len(a)), 2):
                    if a[i] + a[j] <= A and b[i] + b[j] <= B:
                        a[i] += a[j]
                        b[i] += b[j]
                        del a[j], b[j]
                        merged = True
                        break
            if any(x >= A for x in a) or any(x >= B for x in b):
                continue  # merged entries may hit the caps; lemma needs <
            chk = check_agg_lemma(a, b, A, B, max(sum(a), 1e-9),
                                  max(sum(b), 1e-9))
            assert chk.ok, (a, b, chk)


class TestAggregateWithTerminals:
    def _cover_for(self, g, k, terminals, rho=1.0):
        from minmaxpart.covering import cover_minmax_cut
        from minmaxpart.oracle import exact_multiway
        _, opt = exact_multiway(g, terminals)
        cover = cover_minmax_cut(g, k, rho=rho, C=opt, D=k * opt,
                                 terminals=terminals,
                                 backend=ExactCoverBackend(), rng=rng(0))
        return cover, opt

    def test_star_end_to_end(self):
        k = 4
        g = Graph(k + 1, [(i, k, 1.0) for i in range(k)])
        terminals = list(range(k))
        cover, opt = self._cover_for(g, k, terminals)
        res = aggregate_with_terminals(g, cover.sets, k, rho=1.0, B=opt,
                                       epsilon=0.25, terminals=terminals,
                                       rng=rng(1))
        p = res.partition
        assert len(p.parts) <= k
        for i, t in enumerate(terminals):
            assert res.terminal_part[t] == p.part_of[t]
        for q in p.parts:
            inside = set(terminals) & set(int(v) for v in q)
            assert len(inside) <= 1
            assert cut_weight(g, q) <= 8 * res.b_prime + 1e-9

    def test_no_terminals_grouping_is_benign(self):
        g = cycle(8)
        cover = cover_minmax_kpart(g, 2, ExactCoverBackend(), rng(0))
        res = aggregate_with_terminals(g, cover.sets, 2, rho=0.5,
                                       B=cover.max_delta, epsilon=0.25,
                                       terminals=[], rng=rng(2))
        assert len(res.partition.parts) <= 2
        assert max(len(p) for p in res.partition.parts) <= (2 + 0.25) * 4

    def test_rejects_two_terminals_in_a_set(self):
        g = cycle(6)
        with pytest.raises(InputError):
            aggregate_with_terminals(g, [[0, 3], [1, 2, 4, 5]], 2, rho=1.0,
                                     B=10.0, epsilon=0.25, terminals=[0, 3],
                                     rng=rng(0))
