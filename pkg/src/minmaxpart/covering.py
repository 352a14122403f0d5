"""Multiplicative-weights covering.

Start with unit weight on every vertex and repeatedly ask a Weighted
ρ-Unbalanced Cut backend for a cheap set carrying a constant fraction of the
current weight; halve the weight of covered vertices; stop when the total
weight drops below 1/n.  Every vertex then lies in at least log₂ n of the
collected sets, so the multiset of sets is a uniform fractional cover.

Two procedures: the balanced variant solves one instance ⟨G, yᵗ, w, 1/k, 1/k⟩
per iteration; the generalized variant (terminal sets, per-part cap C, total
cap D) searches mass levels τ = 2⁻ⁱ and accepts the first level whose set is
cheap enough for its level, δ(S) ≤ α̂·min(C, 4D/2ⁱ).

Backends declare a contract (α̂, β̂, γ): cost factor, size factor, and
weight-capture factor (the returned set carries at least τ·Y/γ weight).
Only the backend-reported contract is asserted; big-O constants never are.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import (ContractError, Graph, InfeasibleError, InputError,
                     Measure, cut_weight)
from .oracle import exact_unbalanced_cut
from .sse import UCUT_GAMMA, RelaxationCache, RoundingConfig, \
    weighted_unbalanced_cut


class CoveringLevelError(RuntimeError):
    """No mass level produced an acceptably cheap set.

    A feasible (C, D) pair always admits some level (there is an i with
    δ(Sᵗ(i)) ≤ α̂·min{C, 4D/2ⁱ}); hitting this error means C or D is below
    feasibility and the caller should re-guess.
    """


@dataclass
class Cover:
    """Ordered multiset of vertex sets with coverage bookkeeping."""

    sets: list[np.ndarray]
    deltas: list[float]
    levels: list[int]
    coverage: np.ndarray          # N_v: number of sets containing v
    iterations: int
    y_trace: list[float]
    alpha_hat: float
    beta_hat: float
    gamma: float
    min_capture_ratio: float      # min over iterations of y(S)/(τ·Y/γ)

    @property
    def max_delta(self) -> float:
        return max(self.deltas, default=0.0)

    @property
    def max_size(self) -> int:
        return max((len(s) for s in self.sets), default=0)

    def coverage_fraction(self) -> float:
        """c such that every vertex lies in at least c/k·|sets| of the sets
        (reported as min_v N_v / iterations; multiply by k at the caller)."""
        return float(self.coverage.min()) / max(self.iterations, 1)


class ExactCoverBackend:
    """Oracle-backed Weighted ρ-Unbalanced Cut: (α̂, β̂, γ) = (1, 1, 1)."""

    name = "exact"
    alpha_hat = 1.0
    beta_hat = 1.0
    gamma = 1.0

    def solve(self, g: Graph, y_vals: np.ndarray, tau: float, rho: float,
              terminals, rng, size_weights=None) -> np.ndarray:
        opt = exact_unbalanced_cut(g, Measure(y_vals), tau, rho,
                                   terminals=terminals,
                                   size_weights=size_weights)
        return opt.vertices


class RoundingCoverBackend:
    """SDP or LP rounding behind the covering loop.

    α̂ is self-tuned: it starts at 16(1+ε)·D_config and grows when the
    rounding loop escalates its threshold scale (a larger D only loosens
    the per-level acceptance test).
    """

    def __init__(self, kind: str = "sdp", epsilon: float = 0.25,
                 config: RoundingConfig | None = None):
        if kind not in ("sdp", "lp"):
            raise InputError(f"unknown rounding backend {kind!r}")
        self.name = kind
        self.epsilon = epsilon
        self.config = config or RoundingConfig()
        self.beta_hat = 1 + epsilon
        self.gamma = UCUT_GAMMA
        self._d_seen = 1.0
        self.cache = RelaxationCache()

    @property
    def alpha_hat(self) -> float:
        return 16 * (1 + self.epsilon) * self._d_seen

    def solve(self, g: Graph, y_vals: np.ndarray, tau: float, rho: float,
              terminals, rng, size_weights=None) -> np.ndarray:
        sol = weighted_unbalanced_cut(
            g, Measure(y_vals), tau, rho, terminals=terminals,
            epsilon=self.epsilon, rng=rng, backend=self.name,
            config=self.config, cache=self.cache, size_weights=size_weights)
        if sol.D_used:
            self._d_seen = max(self._d_seen, sol.D_used)
        return sol.vertices


def make_backend(name: str, epsilon: float = 0.25,
                 config: RoundingConfig | None = None):
    if name == "exact":
        return ExactCoverBackend()
    return RoundingCoverBackend(name, epsilon=epsilon, config=config)


def _run_cover(g: Graph, backend, rng, pick_set, k: float, gamma_bound: float,
               fail_cap: int) -> Cover:
    n = g.n
    y = np.ones(n)
    sets, deltas, levels, trace = [], [], [], []
    coverage = np.zeros(n, dtype=np.int64)
    min_capture = math.inf
    while y.sum() > 1.0 / n:
        Y = float(y.sum())
        trace.append(Y)
        verts, level, tau = pick_set(y, Y)
        mask = np.zeros(n, dtype=bool)
        mask[verts] = True
        captured = float(y[mask].sum())
        floor = tau * Y / backend.gamma
        if captured < floor * (1 - 1e-9):
            raise ContractError(
                f"backend captured y(S) = {captured:g} < τ·Y/γ = {floor:g}")
        min_capture = min(min_capture, captured / floor)
        sets.append(np.asarray(verts, dtype=np.int64))
        deltas.append(cut_weight(g, mask))
        levels.append(level)
        coverage[mask] += 1
        y = np.where(mask, y / 2.0, y)
        if len(sets) > fail_cap:
            raise ContractError(
                f"covering loop exceeded its iteration bound {fail_cap}")
    trace.append(float(y.sum()))
    ell = len(sets)
    # y-update exactness: y(v) = 2^-N_v, so N_v is recoverable as an integer
    expect = np.ldexp(1.0, -coverage)
    assert np.array_equal(expect, y), "y-update lost the power-of-two identity"
    assert all(b > a for a, b in zip(trace[1:], trace[:-1])), \
        "Y-trace must decrease strictly"
    return Cover(sets=sets, deltas=deltas, levels=levels, coverage=coverage,
                 iterations=ell, y_trace=trace,
                 alpha_hat=backend.alpha_hat, beta_hat=backend.beta_hat,
                 gamma=backend.gamma,
                 min_capture_ratio=float(min_capture))


def cover_minmax_kpart(g: Graph, k: int, backend, rng) -> Cover:
    """Uniform covering for min-max balanced partitioning.

    Each iteration solves ⟨G, yᵗ, w, 1/k, ⌈n/k⌉/n⟩ and halves the weight of
    the returned set.  On termination every vertex lies in at least
    ⌈log₂ n⌉ sets and the loop ran at most 1 + 4γk·ln n times.
    """
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    n = g.n
    tau = 1.0 / k
    rho = math.ceil(n / k) / n
    bound = int(math.ceil(1 + 4 * backend.gamma * k * math.log(max(n, 2)))) + 2

    def pick(y, Y):
        verts = backend.solve(g, y, tau, rho, None, rng)
        if len(verts) > backend.beta_hat * math.ceil(n / k) + 1e-9:
            raise ContractError(
                f"backend returned |S| = {len(verts)} > β̂·⌈n/k⌉")
        return verts, 0, tau

    cover = _run_cover(g, backend, rng, pick, k, backend.gamma, bound)
    assert cover.iterations <= bound
    assert cover.coverage.min() >= math.ceil(math.log2(max(n, 2)))
    return cover


def cover_minmax_cut(g: Graph, k: int, rho: float, C: float, D: float,
                     terminals, backend, rng, size_weights=None) -> Cover:
    """Covering with a per-set cost cap C and total-cost budget D.

    Level search per iteration: for i = 0..log₂k+1 solve the instance
    ⟨G, yᵗ, w, 2⁻ⁱ, ρ⟩ (with the ≤1-terminal side constraint) and accept the
    first S with δ(S) ≤ α̂·min{C, 4D/2ⁱ}.  The accepted set's level also
    certifies the geometric decay Yᵗ⁺¹ ≤ (1 − δ(Sᵗ)/(8α̂γD))·Yᵗ, which is
    asserted every iteration and yields Σδ ≤ 17α̂γ·log₂n·D.
    """
    if C <= 0 or D <= 0:
        raise InputError("C and D must be positive")
    n = g.n
    nlevels = int(math.floor(math.log2(max(k, 2)))) + 2
    bound = int(math.ceil(1 + 8 * backend.gamma * k * math.log(max(n, 2)))) + 2

    def pick(y, Y):
        last_err = None
        for i in range(nlevels):
            tau = 2.0 ** -i
            try:
                verts = backend.solve(g, y, tau, rho, terminals, rng,
                                      size_weights=size_weights)
            except InfeasibleError as exc:
                last_err = exc
                continue
            mask = np.zeros(n, dtype=bool)
            mask[verts] = True
            if cut_weight(g, mask) <= backend.alpha_hat * min(C, 4 * D / 2 ** i) \
                    * (1 + 1e-9):
                return verts, i, tau
        raise CoveringLevelError(
            "no level i had δ(S(i)) ≤ α̂·min(C, 4D/2^i); "
            "C or D is below feasibility"
            + (f" (last level error: {last_err})" if last_err else ""))

    cover = _run_cover(g, backend, rng, pick, k, backend.gamma, bound)
    # per-iteration geometric decay, recomputed from the trace
    a_hat, gam = cover.alpha_hat, cover.gamma
    for t in range(cover.iterations):
        lhs = cover.y_trace[t + 1]
        rhs = (1 - cover.deltas[t] / (8 * a_hat * gam * D)) * cover.y_trace[t]
        assert lhs <= rhs + 1e-9, "multiplicative-update decay violated"
    assert cover.iterations <= 9 * gam * k * math.log2(max(n, 2)) + 1
    assert cover.coverage.min() >= math.ceil(math.log2(max(n, 2)))
    assert sum(cover.deltas) <= 17 * a_hat * gam * math.log2(max(n, 2)) * D \
        * (1 + 1e-9) + 1e-9
    return cover
