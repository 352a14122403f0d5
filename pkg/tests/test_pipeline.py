import numpy as np

from minmaxpart.graphs import Graph
from minmaxpart.instances import (gen_greedy_bad_tree, gen_random,
                                  star_with_terminals)
from minmaxpart.oracle import exact_minmax_kpart, exact_multiway
from minmaxpart.pipeline import (bench, run_minmax_cut, run_minmax_kpart,
                                 run_minmax_multiway)


def cycle(n):
    return Graph(n, [(i, (i + 1) % n, 1.0) for i in range(n)])


class TestKpartDriver:
    def test_four_cycle_matches_oracle(self):
        rep = run_minmax_kpart(cycle(4), 2, backend="exact", seed=0)
        _, opt = exact_minmax_kpart(cycle(4), 2, 2)
        assert rep.max_boundary == opt == 2.0

    def test_k_one_single_part(self):
        rep = run_minmax_kpart(cycle(5), 1, backend="exact", seed=0)
        assert rep.max_boundary == 0.0
        assert rep.partition.sizes() == [5]

    def test_bad_tree_seed_mean_bound(self):
        g = gen_greedy_bad_tree(4)
        eps = 0.25
        vals = []
        for seed in range(10):
            rep = run_minmax_kpart(g, 4, eps=eps, backend="exact", seed=seed)
            vals.append(rep.max_boundary)
            assert rep.max_size <= 2 * (1 + eps) * 16 / 4 + 1e-9
        rep0 = run_minmax_kpart(g, 4, eps=eps, backend="exact", seed=0)
        bound = 8 * rep0.B / (rep0.coverage_c * eps)
        assert float(np.mean(vals)) <= bound + 1e-9

    def test_deterministic_given_seed(self):
        g = gen_random("gnp", {"n": 10, "p": 0.5}, seed=4)
        a = run_minmax_kpart(g, 3, backend="exact", seed=7)
        b = run_minmax_kpart(g, 3, backend="exact", seed=7)
        assert [p.tolist() for p in a.partition.parts] == \
            [p.tolist() for p in b.partition.parts]


class TestMultiwayDriver:
    def test_star_hits_integral_value(self):
        g, terms = star_with_terminals(4)
        rep = run_minmax_multiway(g, terms, backend="exact", seed=0)
        assert rep.max_boundary == 3.0
        for i in range(4):
            assert rep.partition.part_of[i] == rep.terminal_parts[i]

    def test_disconnected_terminals_zero_cost(self):
        g = Graph(4, [(0, 1, 1.0), (2, 3, 1.0)])
        rep = run_minmax_multiway(g, [0, 2], backend="exact", seed=0)
        assert rep.max_boundary == 0.0

    def test_random_ratio_finite(self):
        g = gen_random("gnp", {"n": 10, "p": 0.5}, seed=6)
        terms = [0, 4, 8]
        rep = run_minmax_multiway(g, terms, backend="exact", seed=1)
        _, opt = exact_multiway(g, terms)
        assert np.isfinite(rep.max_boundary / max(opt, 1e-12))


class TestMinmaxCutDriver:
    def test_terminal_sets_stay_together(self):
        g = gen_random("gnp", {"n": 9, "p": 0.55}, seed=3)
        groups = [[0, 1], [2], [5]]
        rep = run_minmax_cut(g, groups, k=3, rho=0.8, backend="exact", seed=2)
        for gi, group in enumerate(groups):
            pidx = rep.terminal_parts[gi]
            for t in group:
                assert rep.partition.part_of[t] == pidx
        assert rep.max_weighted_size <= rep.size_cap + 1e-9

    def test_explicit_caps_accepted(self):
        g = cycle(8)
        _, opt = exact_minmax_kpart(g, 2, 4)
        rep = run_minmax_cut(g, [[0], [4]], k=2, rho=0.75, C=opt,
                             D=2 * opt, backend="exact", seed=0)
        assert rep.C_used == opt and rep.D_used == 2 * opt
        assert rep.max_boundary <= 8 * rep.b_prime + 1e-9


class TestBench:
    def _tasks(self):
        return [
            {"id": "cycle8-k2", "graph": cycle(8), "kind": "kpart", "k": 2,
             "backend": "exact"},
            {"id": "star4", "graph": star_with_terminals(4)[0],
             "kind": "multiway", "terminals": [0, 1, 2, 3],
             "backend": "exact"},
        ]

    def test_records_and_determinism(self):
        rec1 = bench(self._tasks(), seeds=[0, 1], timings=False)
        rec2 = bench(self._tasks(), seeds=[0, 1], timings=False)
        assert rec1 == rec2
        assert len(rec1) == 4
        assert {r["instance"] for r in rec1} == {"cycle8-k2", "star4"}
        assert all("wall_time_s" not in r for r in rec1)

    def test_timings_flag(self):
        recs = bench(self._tasks()[:1], seeds=[0], timings=True)
        assert "wall_time_s" in recs[0]


class TestLpBackend:
    def test_grid_pipeline_caps(self):
        from minmaxpart.instances import gen_random
        g = gen_random("grid", {"rows": 3, "cols": 4}, seed=0)
        rep = run_minmax_kpart(g, 3, eps=0.25, backend="lp", seed=0)
        assert len(rep.partition.parts) <= 3
        assert rep.max_size <= (2 + 0.25) * 12 / 3 + 1e-9
        _, opt = exact_minmax_kpart(g, 3, 4)
        assert rep.max_boundary / opt < 20  # finite, sane
