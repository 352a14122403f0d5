import itertools

import numpy as np
import pytest

from minmaxpart.graphs import Graph, InputError, Measure
from minmaxpart.relaxation import (build_sse_lp, build_sse_sdp, integral_gram,
                                   integral_lp_point, lp_residuals,
                                   pin_terminals, program_row_counts,
                                   sdp_residuals, solve_lp, solve_sdp)

from conftest import random_edges


def cycle(n):
    return Graph(n, [(i, (i + 1) % n, 1.0) for i in range(n)])


def uniform(n):
    return Measure.uniform(n)


def feasible_sets(n, mu, eta, rho, H, two_h_cap=False):
    for r in range(1, n + 1):
        for combo in itertools.combinations(range(n), r):
            s = set(combo)
            if sum(mu[v] for v in s) > rho + 1e-12:
                continue
            es = sum(eta[v] for v in s)
            if es < H - 1e-12:
                continue
            if two_h_cap and es > 2 * H + 1e-12:
                continue
            yield s


def test_program_row_counts_triangle_instance():
    g = cycle(3)
    p = build_sse_sdp(g, uniform(3), uniform(3), 0.5, 0.5)
    counts = program_row_counts(p)
    assert counts["measure"] == 1
    assert counts["spreading"] == 3
    # triangle rows over 3 vertices plus the origin splits into the pure
    # triple family and the two origin families
    assert counts["triangle"] == 3
    assert counts["origin_upper"] == 6
    assert counts["origin_nonneg"] == 3


def test_integral_witness_is_feasible_exhaustively(pyrng):
    # relaxation soundness: the 0/1 embedding of any feasible set satisfies
    # every row of both programs and pays exactly delta(S)/w(E)
    for trial in range(3):
        n = pyrng.randint(4, 8)
        edges = random_edges(pyrng, n)
        if not edges:
            continue
        g = Graph(n, edges)
        mu = uniform(n)
        eta = uniform(n)
        rho, H = 0.5, 1.5 / n
        sdp1 = build_sse_sdp(g, mu, eta, rho, H, mode="part1")
        sdp2 = build_sse_sdp(g, mu, eta, rho, H, mode="part2")
        lp1 = build_sse_lp(g, mu, rho, eta=eta, H=H, mode="part1")
        lp2 = build_sse_lp(g, mu, rho, eta=eta, H=H, mode="part2")
        wE = g.total_weight
        for s in feasible_sets(n, mu.values, eta.values, rho, H):
            gram = integral_gram(n, s)
            res = sdp_residuals(sdp1, gram)
            assert res["max"] <= 1e-9, (s, res)
            x, z = integral_lp_point(n, s)
            lres = lp_residuals(lp1, x, z)
            assert lres["max"] <= 1e-9
            from minmaxpart.graphs import cut_weight
            from minmaxpart.relaxation import _distance_matrix, sdp_objective
            assert sdp_objective(sdp1, _distance_matrix(gram)) == \
                pytest.approx(cut_weight(g, s) / wE)
        for s in feasible_sets(n, mu.values, eta.values, rho, H,
                               two_h_cap=True):
            gram = integral_gram(n, s)
            assert sdp_residuals(sdp2, gram)["max"] <= 1e-9
            x, z = integral_lp_point(n, s)
            assert lp_residuals(lp2, x, z)["max"] <= 1e-9


def test_solved_sdp_feasibility_and_psd():
    g = cycle(8)
    p = build_sse_sdp(g, uniform(8), uniform(8), 0.25, 0.25, mode="part2")
    sol = solve_sdp(p)
    assert sol.status == "optimal"
    assert sol.max_violation <= 1e-4
    eigs = np.linalg.eigvalsh(sol.gram)
    assert eigs.min() >= -1e-7


def test_objective_beats_integral_witness():
    g = Graph(2, [(0, 1, 1.0)])
    p = build_sse_sdp(g, uniform(2), uniform(2), 0.5, 0.5)
    sol = solve_sdp(p, warm_start=integral_gram(2, {0}))
    # cutting the single edge is feasible, so the optimum is at most 1
    assert sol.objective <= 1.0 + 1e-6
    lsol = solve_lp(build_sse_lp(g, uniform(2), 0.5, eta=uniform(2), H=0.5))
    assert lsol.objective <= 1.0 + 1e-9


def test_warm_start_feasible_point_never_hurts():
    g = cycle(6)
    p = build_sse_sdp(g, uniform(6), uniform(6), 0.5, 1 / 6)
    warm = integral_gram(6, {0})
    sol = solve_sdp(p, warm_start=warm)
    assert sol.max_violation <= 1e-5
    assert sol.objective <= 2 / 6 + 1e-6  # witness pays delta({0})/w(E)


def test_dominance_chain_small(pyrng):
    from conftest import naive_min_boundary
    for _ in range(5):
        n = pyrng.randint(4, 8)
        edges = random_edges(pyrng, n)
        if not edges:
            continue
        g = Graph(n, edges)
        mu, eta = uniform(n), uniform(n)
        H = 1.2 / n
        exact = naive_min_boundary(n, edges, mu.values, eta.values, 0.5, H)
        sdp = solve_sdp(build_sse_sdp(g, mu, eta, 0.5, H))
        lp = solve_lp(build_sse_lp(g, mu, 0.5, eta=eta, H=H))
        assert lp.objective <= sdp.objective + 1e-4
        assert sdp.objective <= exact + 1e-4


def test_homogeneity_in_eta_and_H():
    # scaling eta and H together leaves the program unchanged
    g = cycle(6)
    mu = uniform(6)
    base = solve_sdp(build_sse_sdp(g, mu, uniform(6), 0.5, 0.25))
    scaled_eta = Measure(np.full(6, 1 / 6) * 0.375)
    scaled = solve_sdp(build_sse_sdp(g, mu, scaled_eta, 0.5, 0.25 * 0.375))
    assert scaled.objective == pytest.approx(base.objective, abs=2e-4)


def test_eta_heavy_vertices_are_zeroed():
    g = cycle(5)
    eta = Measure([0.6, 0.1, 0.1, 0.1, 0.1])
    p = build_sse_sdp(g, uniform(5), eta, 0.5, 0.2)
    assert p.zeroed.tolist() == [True, False, False, False, False]
    sol = solve_sdp(p)
    assert abs(sol.gram[0, 0]) == 0.0


def test_infeasible_H_detected():
    g = cycle(4)
    eta = Measure([0.97, 0.01, 0.01, 0.01])
    # eta > 2H zeroes the heavy vertex; remaining mass cannot reach H
    p = build_sse_sdp(g, uniform(4), eta, 0.5, 0.4)
    sol = solve_sdp(p)
    assert sol.status == "infeasible"
    lsol = solve_lp(build_sse_lp(g, uniform(4), 0.5, eta=eta, H=0.4))
    assert lsol.status == "infeasible"


def test_pin_terminals():
    g = cycle(6)
    p = build_sse_sdp(g, uniform(6), uniform(6), 0.5, 1 / 6,
                      terminals=[0, 3], pinned=0)
    assert not p.zeroed[0] and p.zeroed[3] and p.pinned == 0
    p2 = pin_terminals(p, [0, 3], 3)
    assert p2.zeroed[0] and not p2.zeroed[3] and p2.pinned == 3
    sol = solve_sdp(p2)
    assert sol.gram[3, 3] == pytest.approx(1.0, abs=1e-6)
    assert abs(sol.gram[0, 0]) == 0.0
    with pytest.raises(InputError):
        pin_terminals(p, [0, 3], 1)


def test_lp_solution_is_semimetric(pyrng):
    n = 7
    edges = random_edges(pyrng, n)
    g = Graph(n, edges)
    sol = solve_lp(build_sse_lp(g, uniform(n), 0.5, eta=uniform(n), H=0.2))
    z = sol.z
    assert np.abs(z - z.T).max() <= 1e-9
    assert np.abs(np.diag(z)).max() <= 1e-9
    for v in range(n):
        viol = z - z[:, v][:, None] - z[v][None, :]
        viol[v, :] = 0
        viol[:, v] = 0
        np.fill_diagonal(viol, 0)
        assert viol.max() <= 1e-6
    assert (np.abs(sol.x[:, None] - sol.x[None, :]) - z).max() <= 1e-6


def test_lazy_triangle_rounds_large_n():
    # beyond the eager limit the solver adds violated triples in rounds
    g = Graph(18, [(i, (i + 1) % 18, 1.0) for i in range(18)]
              + [(i, (i + 2) % 18, 0.5) for i in range(18)])
    p = build_sse_sdp(g, uniform(18), uniform(18), 0.25, 0.25)
    sol = solve_sdp(p)
    assert sol.max_violation <= 1e-4


def test_lp_fractional_beats_half_single_vertex_cut():
    # path 0-1-2: the LP may scale the indicator of a single vertex down,
    # paying below half of the cheapest single-vertex cut normalized by w(E)
    g = Graph(3, [(0, 1, 1.0), (1, 2, 1.0)])
    sol = solve_lp(build_sse_lp(g, uniform(3), 0.5, eta=uniform(3), H=1 / 6))
    best_single = min(1.0, 2.0, 1.0)  # boundaries of {0}, {1}, {2}
    assert sol.objective <= 0.5 * best_single / g.total_weight + 1e-9
