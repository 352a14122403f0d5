"""Small-set expansion rounding.

The two general-graph rounding algorithms share one loop: solve a relaxation,
repeatedly draw separators, and return the first draw whose acceptance
function fires.

* Part I accepts on f(S) = η(S) − (δ(S)/w(E))·H/(4·D·relax) gated by S ≠ ∅
  and μ(S) < (1+10ε)ρ.  When it fires, (δ(S)/w(E))/η(S) ≤ 4·D·relax/H by
  arithmetic.
* Part II accepts on f'(S) = f(S) − μ(S)·H/(4ρ) with the extra gate
  η(S) ≤ 2(1+10ε)H, and accumulates accepted sets into T (removing their
  vectors) until μ(T) ≥ ρ/4 or η(T) ≥ H/4; it returns T if μ(T) ≤ ρ and
  η(T) ≤ H, otherwise the last accepted set.  Either way the result R has
  μ(R) ≤ (1+10ε)ρ, η(R) ∈ [H/16, 2(1+10ε)H], and
  δ(R)/w(E) ≤ 4·D·(relax/H)·η(R).

The μ/η caps are deterministic gates, not expectations.  D is the configured
acceptance-threshold scale c_D·sqrt(max(1,ln n)·max(1,ln m)); when a budget
of separator draws is exhausted without acceptance, D doubles and the loop
restarts (a larger D only loosens the threshold).

The minor-free variant swaps the SDP and orthogonal separators for the LP
and LP separators; nothing else changes.

``weighted_unbalanced_cut`` reduces Weighted ρ-Unbalanced Cut to part II via
μ(S) = |S|/n, η(S) = y(S)/y(V), guessing H over powers of two in [τ, 1].
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from . import relaxation as rx
from .graphs import (ContractError, CutReport, Graph, InfeasibleError,
                     InputError, Measure, cut_weight)
from .oracle import exact_sse, exact_unbalanced_cut
from .relaxation import pin_terminals  # re-exported: callers loop over guesses
from .separators import LpSeparatorSampler, OrthogonalSeparatorSampler

__all__ = [
    "SseInstance", "SseSolution", "RoundingConfig", "pin_terminals",
    "sse_round_part1", "sse_round_part2", "sse_round_minorfree",
    "weighted_unbalanced_cut", "UCUT_GAMMA",
]

# part II never returns less than H/16 of η-mass, so a backend that guesses
# H >= tau captures at least tau/16 of the y-weight
UCUT_GAMMA = 16.0


@dataclass
class SseInstance:
    graph: Graph
    mu: Measure
    eta: Measure
    rho: float
    H: float | None = None
    terminals: list[int] | None = None
    epsilon: float = 0.1

    def __post_init__(self):
        if not (0 < self.rho <= 1):
            raise InputError(f"rho must be in (0,1], got {self.rho}")
        if not (0 < self.epsilon <= 0.25):
            raise InputError(f"epsilon must be in (0,1/4], got {self.epsilon}")
        if not self.mu.is_normalized() or not self.eta.is_normalized():
            raise InputError("mu and eta must be normalized measures")
        if self.terminals is not None:
            ts = [int(t) for t in self.terminals]
            if len(set(ts)) != len(ts):
                raise InputError("terminals must be distinct")
            self.terminals = ts


@dataclass
class SseSolution:
    vertices: np.ndarray
    report: CutReport
    objective: float            # (δ(S)/w(E)) / η(S)
    accepted_by: str            # "f" | "f_prime" | "exact" | "fallback"
    iterations: int             # separator draws consumed
    backend: str
    flag: str = "ok"            # "ok" | "budget-exhausted"
    H_used: float | None = None
    relaxation_value: float | None = None
    D_used: float | None = None
    y_capture: float | None = None
    accum_steps: int = 0


@dataclass
class RoundingConfig:
    c_iter: int = 64
    c_D: float = 1.0
    m_rule: str = "max"         # "max" | "product": reading of the part-I m
    max_d_doublings: int = 10
    batch: int = 4096
    budget_cap: int = 200_000
    lp_rounds: int = 2
    max_accumulation_steps: int | None = None


def _normalized_objective(delta: float, wE: float, eta_s: float) -> float:
    if eta_s <= 0:
        return math.inf
    return (delta / wE if wE > 0 else 0.0) / eta_s


def _program_key(p) -> str:
    h = hashlib.sha256()
    for part in (p.edge_u, p.edge_v, p.edge_w, p.mu,
                 p.eta if p.eta is not None else np.zeros(0), p.zeroed):
        h.update(np.ascontiguousarray(part).tobytes())
    h.update(f"{type(p).__name__}|{p.n}|{p.rho}|{p.H}|{p.mode}|{p.pinned}".encode())
    return h.hexdigest()


class RelaxationCache:
    """Solve-once cache keyed by program content."""

    def __init__(self):
        self._store: dict[str, object] = {}

    def solve(self, program):
        key = _program_key(program)
        if key not in self._store:
            if isinstance(program, rx.SdpProgram):
                self._store[key] = rx.solve_sdp(program)
            else:
                self._store[key] = rx.solve_lp(program)
        return self._store[key]


class SdpRounding:
    """Relaxation + separator pair for the general-graph path."""

    name = "sdp"

    def __init__(self, cache: RelaxationCache | None = None):
        self.cache = cache or RelaxationCache()

    def solve(self, inst: SseInstance, H: float, mode: str, pinned):
        prog = rx.build_sse_sdp(inst.graph, inst.mu, inst.eta, inst.rho, H,
                                mode=mode, terminals=inst.terminals,
                                pinned=pinned)
        return self.cache.solve(prog)

    @staticmethod
    def value(sol) -> float:
        return sol.objective

    @staticmethod
    def feasible(sol) -> bool:
        return sol.status != "infeasible" and sol.gram is not None

    @staticmethod
    def sampler(sol, g: Graph, m: float, beta: float):
        return OrthogonalSeparatorSampler(sol.gram, m, beta, zeroed=sol.zeroed)

    @staticmethod
    def budget(n: int, alpha: float, config: RoundingConfig) -> int:
        want = max(config.c_iter * n * n, int(np.ceil(4.0 / alpha)))
        return min(want, config.budget_cap)


class LpRounding:
    """Relaxation + separator pair for the minor-free path (alpha = 1/n)."""

    name = "lp"

    def __init__(self, cache: RelaxationCache | None = None,
                 rounds: int = 2):
        self.cache = cache or RelaxationCache()
        self.rounds = rounds

    def solve(self, inst: SseInstance, H: float, mode: str, pinned):
        prog = rx.build_sse_lp(inst.graph, inst.mu, inst.rho, eta=inst.eta,
                               H=H, mode=mode, terminals=inst.terminals,
                               pinned=pinned)
        return self.cache.solve(prog)

    @staticmethod
    def value(sol) -> float:
        return sol.objective

    @staticmethod
    def feasible(sol) -> bool:
        return sol.status != "infeasible" and sol.x is not None

    def sampler(self, sol, g: Graph, m: float, beta: float):
        base = LpSeparatorSampler(g, sol.x, sol.z, beta, rounds=self.rounds,
                                  validate=False)

        class _Batch:
            alpha = base.alpha

            @staticmethod
            def draw(rng, count):
                return np.stack([base.draw(rng) for _ in range(count)])

        return _Batch()

    @staticmethod
    def budget(n: int, alpha: float, config: RoundingConfig) -> int:
        return min(n ** 3, config.budget_cap)


def _backend(name, cache=None, config: RoundingConfig | None = None):
    if name == "sdp":
        return SdpRounding(cache)
    if name == "lp":
        return LpRounding(cache, rounds=(config.lp_rounds if config else 2))
    raise InputError(f"unknown rounding backend {name!r}")


def _m_value(inst: SseInstance, H: float | None, part2: bool,
             config: RoundingConfig) -> float:
    eps, rho = inst.epsilon, inst.rho
    if part2:
        return max(1.0 / (eps * rho), 1.0 / (H * rho))
    if config.m_rule == "product":
        return 1.0 / (eps * rho)
    return max(1.0 / eps, 1.0 / rho)


def _d_config(n: int, m: float, c_D: float) -> float:
    return c_D * math.sqrt(max(1.0, math.log(max(n, 2)))
                           * max(1.0, math.log(max(m, 2.0))))


def _h_guesses(inst: SseInstance) -> list[float]:
    """The per-vertex dyadic guess set {2^t η(u)} ∩ (0, 1], deduplicated."""
    tmax = int(math.floor(math.log2(max(inst.graph.n, 2))))
    vals = set()
    for hu in inst.eta.values:
        if hu <= 0:
            continue
        for t in range(tmax + 1):
            h = (2.0 ** t) * hu
            if h <= 1.0:
                vals.add(h)
    if not vals:
        raise InfeasibleError("eta carries no positive mass")
    return sorted(vals)


@dataclass
class _RoundOutcome:
    accepted: bool
    mask: np.ndarray | None
    mu_s: float = 0.0
    eta_s: float = 0.0
    delta: float = 0.0
    draws: int = 0
    D_used: float = 0.0
    fallback: tuple | None = None   # (objective, mu, mask, eta, delta)


def _round_loop(g: Graph, inst: SseInstance, sampler, relax_value: float,
                H: float, D0: float, budget: int, part2: bool,
                config: RoundingConfig, rng, active: np.ndarray,
                mu_vals: np.ndarray, eta_vals: np.ndarray) -> _RoundOutcome:
    """Draw separators until the acceptance function fires.

    The acceptance threshold is evaluated on the whole doubling ladder
    D0·2^a in one pass over the draw stream: the threshold is monotone in
    D, so the draw minimizing (ladder level, draw index) is what the
    restart-with-doubled-D scheme would accept, without redrawing.
    """
    eps, rho = inst.epsilon, inst.rho
    wE = g.total_weight
    mu_gate = (1 + 10 * eps) * rho
    eta_gate = 2 * (1 + 10 * eps) * H
    relax = max(relax_value, 0.0)
    coef0 = H / (4 * D0 * max(relax, 1e-15))
    max_a = config.max_d_doublings
    total_draws = 0
    fallback = None
    best = None  # (ladder level, arrival order, mask, mu, eta, delta)
    term_mask = np.zeros(g.n, dtype=bool)
    if inst.terminals:
        term_mask[np.asarray(inst.terminals, dtype=np.int64)] = True
    B = min(256, config.batch)
    while total_draws < budget:
        B = min(B, budget - total_draws)
        mem = sampler.draw(rng, B) & active[None, :]
        total_draws += B
        B = min(B * 2, config.batch)
        nonempty = mem.any(axis=1)
        if not nonempty.any():
            continue
        memf = mem.astype(np.float64)
        mu_s = memf @ mu_vals
        eta_s = memf @ eta_vals
        crossing = mem[:, g.edge_u] != mem[:, g.edge_v]
        delta = crossing @ g.edge_w
        if term_mask.any():
            tin = mem[:, term_mask].sum(axis=1)
            assert tin.max(initial=0) <= 1, \
                "separator returned a set with more than one terminal"
        gate = nonempty & (mu_s < mu_gate)
        if part2:
            gate &= eta_s <= eta_gate
        term = np.where(wE > 0, delta / max(wE, 1e-300), 0.0) * coef0
        base = eta_s - (mu_s * H / (4 * rho) if part2 else 0.0)
        # minimal ladder level a with base > term / 2^a
        with np.errstate(divide="ignore", invalid="ignore"):
            lvl = np.where(
                base > 0,
                np.where(term < base, 0.0,
                         np.floor(np.log2(np.maximum(term, 1e-300)
                                          / np.maximum(base, 1e-300))) + 1),
                np.inf)
        lvl = np.where(gate, lvl, np.inf)
        usable = gate & (eta_s > 0)
        if usable.any():
            idx = np.flatnonzero(usable)
            objs = [(_normalized_objective(delta[i], wE, eta_s[i]),
                     mu_s[i], i) for i in idx]
            cand = min(objs)
            if fallback is None or cand[:2] < fallback[:2]:
                i = cand[2]
                fallback = (cand[0], cand[1], mem[i].copy(),
                            eta_s[i], delta[i])
        ok = lvl <= max_a
        if ok.any():
            i = int(np.flatnonzero(ok)[np.argmin(lvl[ok])])
            if best is None or lvl[i] < best[0]:
                best = (float(lvl[i]), total_draws, mem[i].copy(),
                        float(mu_s[i]), float(eta_s[i]), float(delta[i]))
            if best[0] == 0.0:
                break
    if best is not None:
        a, _, mask, mu_b, eta_b, delta_b = best
        return _RoundOutcome(True, mask, mu_b, eta_b, delta_b,
                             total_draws, D0 * (2.0 ** a), fallback)
    return _RoundOutcome(False, None, draws=total_draws,
                         D_used=D0 * 2.0 ** max_a, fallback=fallback)


def _degenerate_check(inst: SseInstance, part2: bool, H: float | None):
    """All η-mass on μ-infeasible vertices means no acceptable set exists."""
    eps = inst.epsilon
    ok = (inst.mu.values < (1 + 10 * eps) * inst.rho) & (inst.eta.values > 0)
    if not ok.any():
        raise InfeasibleError("every vertex with eta-mass violates the mu gate")


def _mask_report_plain(g, mask, y: Measure) -> CutReport:
    verts = np.flatnonzero(mask)
    boundary = cut_weight(g, mask)
    return CutReport(set_size=len(verts), boundary=boundary,
                     mu=len(verts) / g.n, eta=y.of(mask) / y.total,
                     expansion=(boundary / len(verts)
                                if 0 < len(verts) <= g.n / 2 else None))


def _mask_report(g, mask, inst) -> CutReport:
    verts = np.flatnonzero(mask)
    boundary = cut_weight(g, mask)
    return CutReport(set_size=len(verts), boundary=boundary,
                     mu=inst.mu.of(mask), eta=inst.eta.of(mask),
                     expansion=(boundary / len(verts)
                                if 0 < len(verts) <= g.n / 2 else None))


def _fallback_solution(inst, backend_name, outcome, H, part2) -> SseSolution:
    g = inst.graph
    if outcome.fallback is not None:
        obj, mu_s, mask, eta_s, delta = outcome.fallback
    else:
        eps = inst.epsilon
        ok = (inst.mu.values < (1 + 10 * eps) * inst.rho) & (inst.eta.values > 0)
        if part2:
            ok &= inst.eta.values <= 2 * (1 + 10 * eps) * H
        if inst.terminals:
            allowed = np.ones(g.n, dtype=bool)
            allowed[np.asarray(inst.terminals, dtype=np.int64)] = False
            ok_nonterm = ok & allowed
            ok = ok_nonterm if ok_nonterm.any() else ok
        if not ok.any():
            raise InfeasibleError("no single vertex satisfies the gates")
        cands = np.flatnonzero(ok)
        deltas = [cut_weight(g, [v]) for v in cands]
        v = int(cands[int(np.argmin(deltas))])
        mask = np.zeros(g.n, dtype=bool)
        mask[v] = True
        obj = _normalized_objective(cut_weight(g, mask), g.total_weight,
                                    inst.eta.of(mask))
    return SseSolution(vertices=np.flatnonzero(mask),
                       report=_mask_report(g, mask, inst), objective=obj,
                       accepted_by="fallback", iterations=outcome.draws,
                       backend=backend_name, flag="budget-exhausted",
                       H_used=H, D_used=outcome.D_used)


def sse_round_part1(inst: SseInstance, rng: np.random.Generator,
                    backend: str = "sdp",
                    config: RoundingConfig | None = None,
                    cache: RelaxationCache | None = None) -> SseSolution:
    """Part-I rounding; guesses H over the dyadic set unless inst.H is given."""
    config = config or RoundingConfig()
    if backend == "exact":
        return _exact_solution(inst)
    be = _backend(backend, cache, config)
    g = inst.graph
    _degenerate_check(inst, part2=False, H=None)
    guesses = [inst.H] if inst.H is not None else _h_guesses(inst)
    m = _m_value(inst, None, part2=False, config=config)
    D0 = _d_config(g.n, m, config.c_D)
    best: SseSolution | None = None
    total_draws = 0
    last_outcome = None
    for H in guesses:
        sol = be.solve(inst, H, "part1", pinned=None)
        if not be.feasible(sol):
            continue
        sampler = be.sampler(sol, g, m, inst.epsilon)
        budget = be.budget(g.n, sampler.alpha, config)
        out = _round_loop(g, inst, sampler, be.value(sol), H, D0, budget,
                          False, config, rng, np.ones(g.n, dtype=bool),
                          inst.mu.values, inst.eta.values)
        total_draws += out.draws
        last_outcome = out
        if not out.accepted:
            continue
        obj = _normalized_objective(out.delta, g.total_weight, out.eta_s)
        bound = 4 * out.D_used * max(be.value(sol), 0.0) / H
        assert out.eta_s > 0 and obj <= bound + 1e-9, \
            "acceptance arithmetic violated"
        cand = SseSolution(vertices=np.flatnonzero(out.mask),
                           report=_mask_report(g, out.mask, inst),
                           objective=obj, accepted_by="f",
                           iterations=total_draws, backend=be.name,
                           H_used=H, relaxation_value=be.value(sol),
                           D_used=out.D_used)
        if best is None or (cand.objective, cand.report.mu) < \
                (best.objective, best.report.mu):
            best = cand
    if best is not None:
        best.iterations = total_draws
        return best
    if last_outcome is None:
        raise InfeasibleError("relaxation infeasible for every guessed H")
    return _fallback_solution(inst, be.name, last_outcome,
                              guesses[-1], part2=False)


def sse_round_part2(inst: SseInstance, rng: np.random.Generator,
                    backend: str = "sdp",
                    config: RoundingConfig | None = None,
                    cache: RelaxationCache | None = None) -> SseSolution:
    """Part-II accumulation rounding; requires inst.H."""
    config = config or RoundingConfig()
    if inst.H is None:
        raise InputError("part II requires the mass guess H")
    if backend == "exact":
        return _exact_solution(inst)
    be = _backend(backend, cache, config)
    g = inst.graph
    H = inst.H
    _degenerate_check(inst, part2=True, H=H)
    m = _m_value(inst, H, part2=True, config=config)
    D0 = _d_config(g.n, m, config.c_D)
    pinned_guesses = [None]
    if inst.terminals:
        pinned_guesses = [None] + list(inst.terminals)
    best: SseSolution | None = None
    total_draws = 0
    last_outcome = None
    for pinned in pinned_guesses:
        sol = be.solve(inst, H, "part2", pinned=pinned)
        if not be.feasible(sol):
            continue
        relax = be.value(sol)
        sampler = be.sampler(sol, g, m, inst.epsilon)
        budget = be.budget(g.n, sampler.alpha, config)
        cand, draws, out = _accumulate(inst, be, sol, sampler, relax, H, D0,
                                       budget, config, rng)
        total_draws += draws
        last_outcome = out if out is not None else last_outcome
        if cand is None:
            continue
        if best is None or (cand.report.boundary, cand.report.mu) < \
                (best.report.boundary, best.report.mu):
            best = cand
    if best is not None:
        best.iterations = total_draws
        return best
    if last_outcome is None:
        raise InfeasibleError("part-II relaxation infeasible "
                              "(H too large for the mu cap)")
    return _fallback_solution(inst, be.name, last_outcome, H, part2=True)


def _accumulate(inst, be, sol, sampler, relax, H, D0, budget, config, rng):
    """The part-II loop: accept with f', remove vectors, grow T."""
    g = inst.graph
    eps, rho = inst.epsilon, inst.rho
    active = np.ones(g.n, dtype=bool)
    T = np.zeros(g.n, dtype=bool)
    last_mask = None
    draws = 0
    steps = 0
    last_outcome = None
    max_steps = config.max_accumulation_steps or 4 * g.n
    for _ in range(max_steps):
        out = _round_loop(g, inst, sampler, relax, H, D0, budget, True,
                          config, rng, active, inst.mu.values,
                          inst.eta.values)
        draws += out.draws
        last_outcome = out
        if not out.accepted:
            if T.any():
                break  # return what accumulated so far
            return None, draws, out
        # f' > 0 forces eta(S) > mu(S)·H/(4ρ), so the ratio invariant on T
        # survives every step
        steps += 1
        last_mask = out.mask
        T |= out.mask
        active &= ~out.mask
        assert inst.eta.of(T) >= inst.mu.of(T) * H / (4 * rho) - 1e-12
        if inst.mu.of(T) >= rho / 4 or inst.eta.of(T) >= H / 4:
            break
    else:
        if not T.any():
            return None, draws, last_outcome
    if not T.any():
        return None, draws, last_outcome
    if inst.mu.of(T) <= rho and inst.eta.of(T) <= H:
        chosen = T
    else:
        chosen = last_mask
    mu_R, eta_R = inst.mu.of(chosen), inst.eta.of(chosen)
    delta_R = cut_weight(g, chosen)
    wE = g.total_weight
    assert mu_R <= (1 + 10 * eps) * rho + 1e-12
    assert eta_R <= 2 * (1 + 10 * eps) * H + 1e-12
    stopped = inst.mu.of(T) >= rho / 4 or inst.eta.of(T) >= H / 4
    if stopped:
        assert eta_R >= H / 16 - 1e-12, "part-II mass floor violated"
    if wE > 0 and relax > 0:
        assert delta_R / wE <= 4 * out.D_used * (relax / H) * eta_R + 1e-9
    cand = SseSolution(vertices=np.flatnonzero(chosen),
                       report=_mask_report(g, chosen, inst),
                       objective=_normalized_objective(delta_R, wE, eta_R),
                       accepted_by="f_prime", iterations=draws,
                       backend=be.name, H_used=H, relaxation_value=relax,
                       D_used=out.D_used, accum_steps=steps,
                       flag="ok" if stopped else "budget-exhausted")
    return cand, draws, last_outcome


def sse_round_minorfree(inst: SseInstance, rng: np.random.Generator,
                        config: RoundingConfig | None = None,
                        cache: RelaxationCache | None = None) -> SseSolution:
    """LP relaxation + LP separators; guarantees apply to minor-free inputs."""
    if inst.H is None:
        return sse_round_part1(inst, rng, backend="lp", config=config,
                               cache=cache)
    return sse_round_part2(inst, rng, backend="lp", config=config,
                           cache=cache)


def _exact_solution(inst: SseInstance) -> SseSolution:
    opt = exact_sse(inst.graph, inst.mu, inst.eta, inst.rho)
    return SseSolution(vertices=opt.vertices, report=opt.report,
                       objective=opt.objective, accepted_by="exact",
                       iterations=0, backend="exact", H_used=inst.H)


# ---------------------------------------------------------------------------
# Weighted ρ-Unbalanced Cut


def _ucut_feasible(g: Graph, y: Measure, tau: float, rho: float, terminals,
                   size_weights=None):
    """Feasibility precheck: max y-mass of a size-capped, ≤1-terminal set.

    Exact for unit sizes; a fractional-knapsack upper bound for weighted
    sizes (a false positive just means every H guess fails downstream).
    """
    vals = y.values
    term = np.zeros(g.n, dtype=bool)
    if terminals:
        term[np.asarray(terminals, dtype=np.int64)] = True
    if size_weights is not None:
        w = np.asarray(size_weights, dtype=float)
        budget = rho * w.sum()
        order = np.argsort(-(vals / np.maximum(w, 1e-300)))
        got, used = 0.0, 0.0
        for v in order:
            take = min(1.0, max(0.0, (budget - used) / max(w[v], 1e-300)))
            got += take * vals[v]
            used += take * w[v]
            if used >= budget - 1e-15:
                break
        return got >= tau * y.total - 1e-9
    size_cap = int(np.floor(rho * g.n + 1e-12))
    if size_cap < 1:
        return False
    free = np.sort(vals[~term])[::-1]
    best = free[:size_cap].sum()
    if terminals:
        tbest = vals[term].max(initial=0.0)
        best = max(best, tbest + free[:size_cap - 1].sum())
    return best >= tau * y.total - 1e-12


def weighted_unbalanced_cut(g: Graph, y: Measure, tau: float, rho: float,
                            terminals=None, epsilon: float = 0.1,
                            rng: np.random.Generator | None = None,
                            backend: str = "sdp",
                            config: RoundingConfig | None = None,
                            cache: RelaxationCache | None = None,
                            size_weights=None) -> SseSolution:
    """Find S with |S| ≤ (1+ε)ρn and y(S) ≥ τ·y(V)/16 of small boundary.

    Sets μ(S) = |S|/n and η(S) = y(S)/y(V), guesses H over powers of two in
    [τ, 1], and invokes part II for each guess (and each terminal pinning);
    the cheapest returned set wins.  With ``size_weights`` the balance
    constraint uses weight(S) ≤ (1+ε)ρ·weight(V) instead of cardinality.
    """
    if not (0 < tau <= 1) or not (0 < rho <= 1):
        raise InputError("tau and rho must be in (0,1]")
    if y.total <= 0:
        raise InputError("y must have positive total mass")
    if not _ucut_feasible(g, y, tau, rho, terminals, size_weights):
        raise InfeasibleError(
            f"no S with y(S) >= {tau:g}·y(V) and |S| <= {rho:g}·n")
    mu_w = np.asarray(size_weights, dtype=float) if size_weights is not None \
        else np.ones(g.n)
    singleton_cap = (1 + epsilon) * rho * mu_w.sum()
    smallest_pair = np.sort(mu_w)[:2].sum() if g.n >= 2 else np.inf
    if backend != "exact" and smallest_pair > singleton_cap + 1e-12:
        # only singletons fit the relaxed size cap: solve exactly by a scan
        cands = [v for v in range(g.n)
                 if mu_w[v] <= singleton_cap + 1e-12
                 and y.values[v] >= tau * y.total - 1e-12]
        if not cands:
            raise InfeasibleError("no singleton satisfies the constraints")
        best_v = min(cands, key=lambda v: (cut_weight(g, [v]), v))
        mask = np.zeros(g.n, dtype=bool)
        mask[best_v] = True
        return SseSolution(vertices=np.array([best_v]),
                           report=_mask_report_plain(g, mask, y),
                           objective=cut_weight(g, [best_v]),
                           accepted_by="singleton-scan", iterations=0,
                           backend=backend, y_capture=y.of(mask) / y.total)
    if backend == "exact":
        opt = exact_unbalanced_cut(g, y, tau, rho, terminals=terminals,
                                   size_weights=size_weights)
        mask = np.zeros(g.n, dtype=bool)
        mask[opt.vertices] = True
        return SseSolution(vertices=opt.vertices, report=opt.report,
                           objective=opt.objective, accepted_by="exact",
                           iterations=0, backend="exact",
                           y_capture=y.of(mask) / y.total)
    if rng is None:
        raise InputError("rounding backends require an rng")
    config = config or RoundingConfig()
    eps_inner = min(epsilon / 10.0, 0.25)
    eta = Measure(y.values / y.total)
    mu = Measure.from_counts(size_weights) if size_weights is not None \
        else Measure.uniform(g.n)
    guesses = []
    h = tau
    while h < 1.0:
        guesses.append(h)
        h *= 2.0
    guesses.append(1.0)
    inst_base = SseInstance(graph=g, mu=mu, eta=eta, rho=rho,
                            terminals=list(terminals) if terminals else None,
                            epsilon=eps_inner)
    cache = cache or RelaxationCache()
    best: SseSolution | None = None
    total_draws = 0
    errors = []
    for H in guesses:
        inst = SseInstance(graph=g, mu=mu, eta=eta, rho=rho, H=H,
                           terminals=inst_base.terminals, epsilon=eps_inner)
        try:
            cand = sse_round_part2(inst, rng, backend=backend, config=config,
                                   cache=cache)
        except InfeasibleError as exc:
            errors.append(str(exc))
            continue
        total_draws += cand.iterations
        if cand.flag != "ok":
            if best is None:
                best = cand
            continue
        if best is None or best.flag != "ok" or \
                (cand.report.boundary, cand.report.mu) < \
                (best.report.boundary, best.report.mu):
            best = cand
    if best is None:
        raise InfeasibleError(
            "every H guess was infeasible: " + "; ".join(errors[:3]))
    mask = np.zeros(g.n, dtype=bool)
    mask[best.vertices] = True
    best.iterations = total_draws
    best.y_capture = y.of(mask) / y.total
    if mu.of(mask) > (1 + epsilon) * rho * (1 + 1e-9):
        raise ContractError(
            f"returned set has size measure {mu.of(mask):g} > (1+eps)·rho = "
            f"{(1 + epsilon) * rho:g}")
    return best
