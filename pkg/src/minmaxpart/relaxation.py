"""Relaxations of weighted small-set expansion.

Two programs over a graph G with measures μ, η, a size bound ρ, and a mass
guess H:

* a semidefinite program on vectors {ū} (represented by their Gram matrix,
  with the origin as an implicit extra point): minimize the normalized cut
  energy Σ w(u,v)‖ū−v̄‖²/w(E) subject to ℓ₂² triangle inequalities, per-vertex
  μ-spreading rows, and the η-mass row Σ η(v)‖v̄‖² ≥ H;
* a linear program on values x(u) ~ ‖ū‖² and a semi-metric z(u,v) ~ ‖ū−v̄‖²
  with the analogous spreading and mass rows.

"part2" mode adds the rows used by the accumulation variant of the rounding
algorithm: an η near-mass cap per vertex (the mass within distance ‖ū‖² of ū
is at most 2H‖ū‖²) and the global cap Σ μ(v)‖v̄‖² ≤ ρ.

Vertices with η(u) > 2H are pinned to the origin before solving.  Terminal
handling pins one guessed terminal to norm 1 and the rest to norm 0.

All residuals are evaluated by this module's own numpy code (with the true
minimum in the spreading terms), never trusted from the solver.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .graphs import Graph, InputError, Measure

PSD_FLOOR = 1e-7
DEFAULT_FEAS_TOL = 1e-5
DEFAULT_OBJ_TOL = 1e-4
_EAGER_TRIANGLE_LIMIT = 16  # materialize all O(n^3) rows up to here


# ---------------------------------------------------------------------------
# programs


@dataclass(frozen=True)
class SdpProgram:
    n: int
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_w: np.ndarray
    total_weight: float
    mu: np.ndarray
    eta: np.ndarray
    rho: float
    H: float
    mode: str                 # "part1" | "part2"
    zeroed: np.ndarray        # bool mask: ‖ū‖² pinned to 0
    pinned: int | None        # vertex with ‖ū‖² pinned to 1
    norm_cap: bool = True     # include ‖v̄‖² ≤ 1 rows


@dataclass(frozen=True)
class LpProgram:
    n: int
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_w: np.ndarray
    total_weight: float
    mu: np.ndarray
    eta: np.ndarray | None
    rho: float
    H: float | None
    mode: str
    zeroed: np.ndarray
    pinned: int | None


@dataclass
class SdpSolution:
    gram: np.ndarray | None
    objective: float
    max_violation: float
    status: str               # "optimal" | "unconverged" | "infeasible"
    residuals: dict
    zeroed: np.ndarray | None = None

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


@dataclass
class LpSolution:
    x: np.ndarray | None
    z: np.ndarray | None
    objective: float
    max_violation: float
    status: str
    residuals: dict


def _apply_pins(n, eta_vals, H, terminals, pinned, zero_heavy=True):
    zeroed = np.zeros(n, dtype=bool)
    if zero_heavy and eta_vals is not None and H is not None:
        zeroed |= eta_vals > 2 * H
    if terminals is not None:
        if pinned is not None and pinned not in set(int(t) for t in terminals):
            raise InputError(f"pinned vertex {pinned} not among terminals")
        for t in terminals:
            if int(t) != pinned:
                zeroed[int(t)] = True
    if pinned is not None:
        zeroed[pinned] = False
    return zeroed


def build_sse_sdp(g: Graph, mu: Measure, eta: Measure, rho: float, H: float,
                  mode: str = "part1", terminals=None,
                  pinned: int | None = None) -> SdpProgram:
    if not (0 < rho <= 1):
        raise InputError(f"rho must be in (0,1], got {rho}")
    if not (0 < H <= 1):
        raise InputError(f"H must be in (0,1], got {H}")
    if mode not in ("part1", "part2"):
        raise InputError(f"unknown mode {mode!r}")
    zeroed = _apply_pins(g.n, eta.values, H, terminals, pinned)
    return SdpProgram(
        n=g.n, edge_u=g.edge_u, edge_v=g.edge_v, edge_w=g.edge_w,
        total_weight=g.total_weight, mu=mu.values.copy(),
        eta=eta.values.copy(), rho=float(rho), H=float(H), mode=mode,
        zeroed=zeroed, pinned=None if pinned is None else int(pinned))


def build_sse_lp(g: Graph, mu: Measure, rho: float, eta: Measure | None = None,
                 H: float | None = None, mode: str = "part1", terminals=None,
                 pinned: int | None = None) -> LpProgram:
    if not (0 < rho <= 1):
        raise InputError(f"rho must be in (0,1], got {rho}")
    if mode == "part2" and (eta is None or H is None):
        raise InputError("part2 LP needs eta and H")
    zeroed = _apply_pins(g.n, None if eta is None else eta.values, H,
                         terminals, pinned)
    return LpProgram(
        n=g.n, edge_u=g.edge_u, edge_v=g.edge_v, edge_w=g.edge_w,
        total_weight=g.total_weight, mu=mu.values.copy(),
        eta=None if eta is None else eta.values.copy(), rho=float(rho),
        H=None if H is None else float(H), mode=mode, zeroed=zeroed,
        pinned=None if pinned is None else int(pinned))


def pin_terminals(program, terminals, pinned):
    """Copy of ``program`` with one terminal pinned to 1 and the rest to 0.

    ``pinned`` may be None (no terminal inside the solution).  Callers loop
    over all |T|+1 guesses and keep the best accepted set.
    """
    terminals = [int(t) for t in terminals]
    if pinned is not None and int(pinned) not in terminals:
        raise InputError(f"pinned vertex {pinned} not among terminals")
    zeroed = program.zeroed.copy()
    for t in terminals:
        zeroed[t] = t != pinned
    return replace(program, zeroed=zeroed,
                   pinned=None if pinned is None else int(pinned))


# ---------------------------------------------------------------------------
# residuals (shared between tests, the solver, and reporting)


def _distance_matrix(gram: np.ndarray) -> np.ndarray:
    d = np.diag(gram)
    return d[:, None] + d[None, :] - 2 * gram


def _max_triangle_violation(dist: np.ndarray) -> float:
    n = len(dist)
    worst = 0.0
    for v in range(n):
        # d(u,w) - d(u,v) - d(v,w) over all u,w for middle v
        viol = dist - dist[:, v][:, None] - dist[v][None, :]
        viol[v, :] = -np.inf
        viol[:, v] = -np.inf
        worst = max(worst, float(viol.max()) if n > 1 else 0.0)
    return worst


def sdp_residuals(p: SdpProgram, gram: np.ndarray) -> dict:
    """Max violation per constraint family, true min in spreading terms."""
    gram = (gram + gram.T) / 2
    norms = np.diag(gram).copy()
    dist = _distance_matrix(gram)
    res = {}
    eigs = np.linalg.eigvalsh(gram)
    res["psd_floor"] = float(-min(eigs.min(), 0.0))
    res["triangle"] = _max_triangle_violation(dist) if p.n >= 3 else 0.0
    # origin rows: <u,v> <= min(norms), <u,v> >= 0
    off = gram - np.minimum(norms[:, None], norms[None, :])
    np.fill_diagonal(off, -np.inf)
    res["origin_upper"] = float(max(off.max(), 0.0)) if p.n > 1 else 0.0
    neg = -gram.copy()
    np.fill_diagonal(neg, -np.inf)
    res["origin_nonneg"] = float(max(neg.max(), 0.0)) if p.n > 1 else 0.0
    # spreading rows
    spread = np.minimum(dist, norms[:, None]) @ p.mu - (1 - p.rho) * norms
    res["spreading"] = float(max(-spread.min(), 0.0))
    res["measure"] = float(max(p.H - p.eta @ norms, 0.0))
    if p.norm_cap:
        res["norm_cap"] = float(max(norms.max(initial=0.0) - 1.0, 0.0))
    if p.mode == "part2":
        near = np.maximum(norms[:, None] - dist, 0.0) @ p.eta
        res["eta_near_mass"] = float(max((near - 2 * p.H * norms).max(), 0.0))
        res["mu_cap"] = float(max(p.mu @ norms - p.rho, 0.0))
    if p.zeroed.any():
        res["zero_pins"] = float(np.abs(norms[p.zeroed]).max())
    if p.pinned is not None:
        res["one_pin"] = float(abs(norms[p.pinned] - 1.0))
    res["max"] = max(res.values())
    return res


def lp_residuals(p: LpProgram, x: np.ndarray, z: np.ndarray) -> dict:
    res = {}
    n = p.n
    res["range"] = float(max(0.0, -x.min(), x.max() - 1.0,
                             -z.min(), z.max() - 1.0))
    res["symmetry"] = float(np.abs(z - z.T).max()) if n else 0.0
    res["diag"] = float(np.abs(np.diag(z)).max()) if n else 0.0
    res["triangle"] = _max_triangle_violation(z) if n >= 3 else 0.0
    res["coupling"] = float(max((np.abs(x[:, None] - x[None, :]) - z).max(), 0.0)) \
        if n > 1 else 0.0
    spread = np.minimum(z, x[:, None]) @ p.mu - (1 - p.rho) * x
    res["spreading"] = float(max(-spread.min(), 0.0))
    if p.eta is not None and p.H is not None:
        res["measure"] = float(max(p.H - p.eta @ x, 0.0))
    if p.mode == "part2":
        near = np.maximum(x[:, None] - z, 0.0) @ p.eta
        res["eta_near_mass"] = float(max((near - 2 * p.H * x).max(), 0.0))
        res["mu_cap"] = float(max(p.mu @ x - p.rho, 0.0))
    if p.zeroed.any():
        res["zero_pins"] = float(np.abs(x[p.zeroed]).max())
    if p.pinned is not None:
        res["one_pin"] = float(abs(x[p.pinned] - 1.0))
    res["max"] = max(res.values())
    return res


def program_row_counts(p: SdpProgram | LpProgram) -> dict:
    """Constraint-family sizes of a program (diagnostic bookkeeping)."""
    n = p.n
    counts = {
        "triangle": n * (n - 1) * (n - 2) // 2,
        "origin_upper": n * (n - 1),
        "origin_nonneg": n * (n - 1) // 2,
        "spreading": n,
        "measure": 1 if (p.eta is not None and p.H is not None) else 0,
    }
    if isinstance(p, SdpProgram) and p.norm_cap:
        counts["norm_cap"] = n
    if p.mode == "part2":
        counts["eta_near_mass"] = n
        counts["mu_cap"] = 1
    return counts


def integral_gram(n: int, vertices) -> np.ndarray:
    """Gram matrix of the intended 0/1 embedding of a vertex set."""
    ind = np.zeros(n)
    ind[np.asarray(list(vertices), dtype=np.int64)] = 1.0
    return np.outer(ind, ind)


def integral_lp_point(n: int, vertices) -> tuple[np.ndarray, np.ndarray]:
    x = np.zeros(n)
    x[np.asarray(list(vertices), dtype=np.int64)] = 1.0
    z = np.abs(x[:, None] - x[None, :])
    return x, z


def sdp_objective(p: SdpProgram | LpProgram, dist: np.ndarray) -> float:
    if p.total_weight == 0:
        return 0.0
    return float(p.edge_w @ dist[p.edge_u, p.edge_v]) / p.total_weight


# ---------------------------------------------------------------------------
# SDP solver


def _cvxpy_solve(p: SdpProgram, triangles, tol: float, max_iters: int):
    import warnings

    import cvxpy as cp

    n = p.n
    G = cp.Variable((n, n), PSD=True)
    norms = cp.diag(G)
    col = cp.reshape(norms, (n, 1), order="C")
    row = cp.reshape(norms, (1, n), order="C")
    D = col + row - 2 * G
    cons = []
    if p.norm_cap:
        cons.append(norms <= 1.0)
    else:
        cons.append(norms <= float(n))  # keep the program bounded
    if n > 1:
        cons.append(G <= cp.minimum(col @ np.ones((1, n)),
                                    np.ones((n, 1)) @ row))
        cons.append(G >= 0)
    if triangles is not None and len(triangles[0]):
        iu, iv, iw = triangles
        cons.append(D[iu, iw] <= D[iu, iv] + D[iv, iw])
    ones_row = np.ones((1, n))
    spread_terms = cp.minimum(D, col @ ones_row)
    cons.append(spread_terms @ p.mu >= (1 - p.rho) * norms)
    cons.append(p.eta @ norms >= p.H)
    if p.mode == "part2":
        near = cp.pos(col @ ones_row - D)
        cons.append(near @ p.eta <= 2 * p.H * norms)
        cons.append(p.mu @ norms <= p.rho)
    if p.zeroed.any():
        cons.append(norms[np.flatnonzero(p.zeroed)] == 0)
    if p.pinned is not None:
        cons.append(norms[p.pinned] == 1)
    if p.total_weight > 0:
        obj = cp.sum(cp.multiply(p.edge_w / p.total_weight,
                                 D[p.edge_u, p.edge_v]))
    else:
        obj = cp.Constant(0.0)
    prob = cp.Problem(cp.Minimize(obj), cons)
    with warnings.catch_warnings():
        # reduced-accuracy terminations are re-judged by our own residual
        # check; cvxpy's warning is noise here
        warnings.simplefilter("ignore", UserWarning)
        try:
            prob.solve(solver=cp.CLARABEL, max_iter=max_iters)
        except cp.SolverError:
            prob.solve(solver=cp.SCS, eps=tol / 10, max_iters=max_iters)
    return prob.status, (None if G.value is None else np.asarray(G.value))


def _all_triangles(n: int):
    triples = [(u, v, w) for u, v, w in itertools.permutations(range(n), 3)
               if u < w]
    iu = np.array([t[0] for t in triples], dtype=np.int64)
    iv = np.array([t[1] for t in triples], dtype=np.int64)
    iw = np.array([t[2] for t in triples], dtype=np.int64)
    return iu, iv, iw


def _violated_triangles(dist: np.ndarray, tol: float, top_k: int):
    n = len(dist)
    rows = []
    for v in range(n):
        viol = dist - dist[:, v][:, None] - dist[v][None, :]
        viol[v, :] = 0
        viol[:, v] = 0
        np.fill_diagonal(viol, 0)
        us, ws = np.nonzero(np.triu(viol, 1) > tol)
        for u, w in zip(us, ws):
            rows.append((float(viol[u, w]), u, v, w))
    rows.sort(reverse=True)
    rows = rows[:top_k]
    if not rows:
        return None
    return (np.array([r[1] for r in rows]), np.array([r[2] for r in rows]),
            np.array([r[3] for r in rows]))


def solve_sdp(p: SdpProgram, tol: float = DEFAULT_FEAS_TOL,
              max_iters: int = 200000, warm_start: np.ndarray | None = None
              ) -> SdpSolution:
    """Solve the program; returns a PSD gram with reported true residuals.

    For small n every ℓ₂² triangle row is materialized; beyond the eager
    limit they are generated in violated-constraint rounds.  On solver
    failure the best available iterate (or the warm start) is returned
    flagged "unconverged".
    """
    n = p.n
    eager = n <= _EAGER_TRIANGLE_LIMIT
    triangles = _all_triangles(n) if eager and n >= 3 else None
    status, gram = _cvxpy_solve(p, triangles, tol, max_iters)
    if gram is not None and not eager and n >= 3:
        for _ in range(8):
            dist = _distance_matrix((gram + gram.T) / 2)
            extra = _violated_triangles(dist, tol, top_k=4000)
            if extra is None:
                break
            if triangles is None:
                triangles = extra
            else:
                triangles = tuple(np.concatenate([a, b])
                                  for a, b in zip(triangles, extra))
            status, gram = _cvxpy_solve(p, triangles, tol, max_iters)
            if gram is None:
                break
    if gram is None:
        if status in ("infeasible", "infeasible_inaccurate"):
            return SdpSolution(gram=None, objective=np.inf, max_violation=np.inf,
                               status="infeasible", residuals={})
        if warm_start is not None:
            gram = np.asarray(warm_start, dtype=float)
            status = "unconverged"
        else:
            return SdpSolution(gram=None, objective=np.inf, max_violation=np.inf,
                               status="infeasible", residuals={})
    gram = _clean_gram(p, gram)
    res = sdp_residuals(p, gram)
    obj = sdp_objective(p, _distance_matrix(gram))
    if warm_start is not None:
        warm = np.asarray(warm_start, dtype=float)
        warm_res = sdp_residuals(p, warm)
        warm_obj = sdp_objective(p, _distance_matrix(warm))
        if warm_res["max"] <= max(res["max"], tol) and warm_obj < obj:
            gram, res, obj = warm, warm_res, warm_obj
    solved = status in ("optimal", "optimal_inaccurate")
    final = "optimal" if (solved and res["max"] <= 10 * tol) \
        else ("unconverged" if status != "infeasible" else "infeasible")
    return SdpSolution(gram=gram, objective=obj, max_violation=res["max"],
                       status=final, residuals=res, zeroed=p.zeroed.copy())


def _clean_gram(p: SdpProgram, gram: np.ndarray) -> np.ndarray:
    gram = (np.asarray(gram, dtype=float) + np.asarray(gram, dtype=float).T) / 2
    z = np.flatnonzero(p.zeroed)
    if len(z):
        gram[z, :] = 0.0
        gram[:, z] = 0.0
    eigs, vecs = np.linalg.eigh(gram)
    if eigs.min() < -PSD_FLOOR / 10:
        gram = (vecs * np.clip(eigs, 0.0, None)) @ vecs.T
        gram = (gram + gram.T) / 2
    if p.norm_cap:
        top = np.diag(gram).max(initial=0.0)
        if top > 1.0:
            gram = gram / top
    return gram


# ---------------------------------------------------------------------------
# LP solver


def _pair_index(n: int):
    idx = {}
    c = 0
    for i in range(n):
        for j in range(i + 1, n):
            idx[(i, j)] = c
            c += 1
    return idx, c


def solve_lp(p: LpProgram, tol: float = DEFAULT_FEAS_TOL) -> LpSolution:
    """Solve via scipy's HiGHS backend; min terms carried by auxiliaries."""
    n = p.n
    pid, npairs = _pair_index(n)
    nm = n * (n - 1)
    mid = {}
    c = 0
    for u in range(n):
        for v in range(n):
            if u != v:
                mid[(u, v)] = c
                c += 1
    part2 = p.mode == "part2"
    nq = nm if part2 else 0
    N = n + npairs + nm + nq

    def X(u):
        return u

    def Z(u, v):
        return n + pid[(min(u, v), max(u, v))]

    def M(u, v):
        return n + npairs + mid[(u, v)]

    def Q(u, v):
        return n + npairs + nm + mid[(u, v)]

    rows, cols, vals, b_ub = [], [], [], []

    def add_row(entries, rhs):
        r = len(b_ub)
        for col_idx, val in entries:
            rows.append(r)
            cols.append(col_idx)
            vals.append(val)
        b_ub.append(rhs)

    for a, b, cc in itertools.permutations(range(n), 3):
        if a < cc:
            add_row([(Z(a, cc), 1.0), (Z(a, b), -1.0), (Z(b, cc), -1.0)], 0.0)
    for (i, j) in pid:
        add_row([(X(i), 1.0), (X(j), -1.0), (Z(i, j), -1.0)], 0.0)
        add_row([(X(i), -1.0), (X(j), 1.0), (Z(i, j), -1.0)], 0.0)
    for u in range(n):
        spread = [(X(u), (1 - p.rho))]
        for v in range(n):
            if v == u:
                continue
            add_row([(M(u, v), 1.0), (X(u), -1.0)], 0.0)
            add_row([(M(u, v), 1.0), (Z(u, v), -1.0)], 0.0)
            spread.append((M(u, v), -float(p.mu[v])))
        add_row(spread, 0.0)
    if p.eta is not None and p.H is not None:
        add_row([(X(v), -float(p.eta[v])) for v in range(n)], -p.H)
    if part2:
        for u in range(n):
            cap = [(X(u), float(p.eta[u]) - 2 * p.H)]
            for v in range(n):
                if v == u:
                    continue
                add_row([(Q(u, v), -1.0), (X(u), 1.0), (Z(u, v), -1.0)], 0.0)
                cap.append((Q(u, v), float(p.eta[v])))
            add_row(cap, 0.0)
        add_row([(X(v), float(p.mu[v])) for v in range(n)], p.rho)

    cobj = np.zeros(N)
    if p.total_weight > 0:
        for u, v, w in zip(p.edge_u, p.edge_v, p.edge_w):
            cobj[Z(int(u), int(v))] += w / p.total_weight

    bounds = []
    for u in range(n):
        if p.zeroed[u]:
            bounds.append((0.0, 0.0))
        elif p.pinned is not None and u == p.pinned:
            bounds.append((1.0, 1.0))
        else:
            bounds.append((0.0, 1.0))
    bounds += [(0.0, 1.0)] * npairs
    bounds += [(None, None)] * nm
    bounds += [(0.0, None)] * nq

    A = sp.coo_matrix((vals, (rows, cols)), shape=(len(b_ub), N)).tocsr()
    res = linprog(cobj, A_ub=A, b_ub=np.array(b_ub), bounds=bounds,
                  method="highs")
    if res.status != 0 or res.x is None:
        status = "infeasible" if res.status == 2 else "unconverged"
        return LpSolution(x=None, z=None, objective=np.inf,
                          max_violation=np.inf, status=status, residuals={})
    x = np.clip(res.x[:n], 0.0, 1.0)
    z = np.zeros((n, n))
    for (i, j), idx in pid.items():
        z[i, j] = z[j, i] = min(max(res.x[n + idx], 0.0), 1.0)
    resid = lp_residuals(p, x, z)
    obj = sdp_objective(p, z)
    status = "optimal" if resid["max"] <= 10 * tol else "unconverged"
    return LpSolution(x=x, z=z, objective=obj, max_violation=resid["max"],
                      status=status, residuals=resid)
