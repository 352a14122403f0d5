"""Command-line entry points.

Subcommands: sse, ucut, partition, multiway, minmaxcut, cover, oracle, gen,
gap, reduce, separator-stats, bench.  Exit codes: 0 success, 2 infeasible,
3 budget-exhausted fallback, 4 input error.

Everything prints a JSON document (sorted keys) so that identical
(input, flags, seed) produce identical output bytes.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import io as gio
from . import relaxation as rx
from .covering import CoveringLevelError, cover_minmax_kpart, make_backend
from .graphs import Graph, InfeasibleError, InputError, Measure
from .instances import (gen_random, reduce_mmmc_to_ksum,
                        verify_multiway_sdp_gap)
from .oracle import (exact_minmax_kpart, exact_minsum_kpart, exact_multiway,
                     exact_sse, exact_unbalanced_cut)
from .pipeline import bench, run_minmax_cut, run_minmax_kpart, \
    run_minmax_multiway
from .rngstreams import stream
from .separators import (decomposition_stats, lp_separator_stats,
                         orthogonal_separator_stats)
from .sse import RoundingConfig, SseInstance, sse_round_part1, \
    sse_round_part2, weighted_unbalanced_cut

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_BUDGET = 3
EXIT_INPUT = 4


def _emit(doc, out):
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _common(sub, input_required=True):
    if input_required:
        sub.add_argument("--input", required=True, help="instance file")
    else:
        sub.add_argument("--input", help="instance file")
    sub.add_argument("--format", default="auto",
                     choices=["auto", "edgelist", "json"])
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--eps", type=float, default=0.25)
    sub.add_argument("--backend", default="sdp",
                     choices=["sdp", "lp", "exact"])
    sub.add_argument("--out", help="write JSON here instead of stdout")


def _config(args) -> RoundingConfig:
    cfg = RoundingConfig()
    if getattr(args, "budget_mult", None):
        cfg.c_iter = int(64 * args.budget_mult)
        cfg.budget_cap = int(cfg.budget_cap * args.budget_mult)
    if getattr(args, "cD", None):
        cfg.c_D = args.cD
    if getattr(args, "m_rule", None):
        cfg.m_rule = args.m_rule
    return cfg


def _load(args) -> gio.Instance:
    return gio.load_instance(args.input, args.format)


def _measures(inst: gio.Instance):
    n = inst.graph.n
    mu = inst.mu or Measure.uniform(n)
    eta = inst.eta or Measure.uniform(n)
    return mu, eta


def _partition_doc(rep):
    return {
        "parts": [[int(v) for v in p] for p in rep.partition.parts],
        "max_boundary": rep.max_boundary,
        "sum_boundary": rep.sum_boundary,
        "max_size": rep.max_size,
        "size_cap": rep.size_cap,
        "cover_iterations": rep.cover_iterations,
        "backend": rep.backend,
        "seed": rep.seed,
    }


def cmd_sse(args):
    inst = _load(args)
    mu, eta = _measures(inst)
    g = inst.graph
    terminals = None
    if inst.terminals:
        terminals = [t for group in inst.terminals for t in group]
    sinst = SseInstance(g, mu, eta, rho=args.rho, H=args.H,
                        terminals=terminals, epsilon=args.eps)
    cfg = _config(args)
    rng = stream(args.seed, "separator")
    if args.H is not None and args.backend != "exact":
        sol = sse_round_part2(sinst, rng, backend=args.backend, config=cfg)
    else:
        sol = sse_round_part1(sinst, rng, backend=args.backend, config=cfg)
    doc = {
        "set": [int(v) for v in sol.vertices],
        "objective": sol.objective,
        "boundary": sol.report.boundary,
        "mu": sol.report.mu,
        "eta": sol.report.eta,
        "accepted_by": sol.accepted_by,
        "backend": sol.backend,
        "flag": sol.flag,
        "H_used": sol.H_used,
        "relaxation_value": sol.relaxation_value,
        "iterations": sol.iterations,
    }
    if args.dump_sdp:
        prog = rx.build_sse_sdp(g, mu, eta, args.rho, sol.H_used or 1.0,
                                mode="part2" if args.H else "part1")
        ssol = rx.solve_sdp(prog)
        _emit({"objective": ssol.objective, "status": ssol.status,
               "max_violation": ssol.max_violation,
               "gram": None if ssol.gram is None else ssol.gram.tolist()},
              args.dump_sdp)
    if args.dump_lp:
        prog = rx.build_sse_lp(g, mu, args.rho, eta=eta,
                               H=sol.H_used or None)
        lsol = rx.solve_lp(prog)
        _emit({"objective": lsol.objective, "status": lsol.status,
               "max_violation": lsol.max_violation,
               "x": None if lsol.x is None else lsol.x.tolist(),
               "z": None if lsol.z is None else lsol.z.tolist()},
              args.dump_lp)
    _emit(doc, args.out)
    return EXIT_BUDGET if sol.flag == "budget-exhausted" else EXIT_OK


def cmd_ucut(args):
    inst = _load(args)
    g = inst.graph
    y = inst.eta or Measure.uniform(g.n)
    terminals = None
    if inst.terminals:
        terminals = [t for group in inst.terminals for t in group]
    sol = weighted_unbalanced_cut(
        g, Measure(y.values), tau=args.tau, rho=args.rho,
        terminals=terminals, epsilon=args.eps,
        rng=stream(args.seed, "separator"), backend=args.backend,
        config=_config(args))
    _emit({
        "set": [int(v) for v in sol.vertices],
        "boundary": sol.report.boundary,
        "size": sol.report.set_size,
        "y_capture": sol.y_capture,
        "flag": sol.flag,
        "backend": sol.backend,
    }, args.out)
    return EXIT_BUDGET if sol.flag == "budget-exhausted" else EXIT_OK


def cmd_partition(args):
    inst = _load(args)
    rep = run_minmax_kpart(inst.graph, args.k, eps=args.eps,
                           backend=args.backend, seed=args.seed,
                           config=_config(args))
    _emit(_partition_doc(rep), args.out)
    return EXIT_OK


def cmd_multiway(args):
    inst = _load(args)
    if args.terminals:
        terminals = [int(t) for t in args.terminals.split(",")]
    elif inst.terminals:
        terminals = [group[0] for group in inst.terminals]
    else:
        raise InputError("multiway needs --terminals or terminals in the file")
    rep = run_minmax_multiway(inst.graph, terminals, eps=args.eps,
                              backend=args.backend, seed=args.seed,
                              config=_config(args))
    doc = _partition_doc(rep)
    doc["terminal_parts"] = rep.terminal_parts
    doc["C_used"] = rep.C_used
    doc["D_used"] = rep.D_used
    _emit(doc, args.out)
    return EXIT_OK


def cmd_minmaxcut(args):
    inst = _load(args)
    if not inst.terminals:
        raise InputError("minmaxcut needs terminal sets in the JSON input")
    rep = run_minmax_cut(inst.graph, inst.terminals, k=args.k, rho=args.rho,
                         C=args.C, D=args.D, eps=args.eps,
                         backend=args.backend, seed=args.seed,
                         config=_config(args))
    doc = _partition_doc(rep)
    doc["terminal_parts"] = rep.terminal_parts
    doc["C_used"] = rep.C_used
    doc["D_used"] = rep.D_used
    doc["max_weighted_size"] = rep.max_weighted_size
    _emit(doc, args.out)
    return EXIT_OK


def cmd_cover(args):
    inst = _load(args)
    be = make_backend(args.backend, epsilon=args.eps, config=_config(args))
    cover = cover_minmax_kpart(inst.graph, args.k, be,
                               stream(args.seed, "cover"))
    hist = {}
    for c in cover.coverage.tolist():
        hist[str(c)] = hist.get(str(c), 0) + 1
    _emit({
        "sets": [[int(v) for v in s] for s in cover.sets],
        "deltas": cover.deltas,
        "iterations": cover.iterations,
        "coverage_histogram": hist,
        "y_trace": cover.y_trace,
        "alpha_hat": cover.alpha_hat,
        "beta_hat": cover.beta_hat,
        "gamma": cover.gamma,
    }, args.out)
    return EXIT_OK


def cmd_oracle(args):
    inst = _load(args)
    g = inst.graph
    mu, eta = _measures(inst)
    if args.task == "sse":
        sol = exact_sse(g, mu, eta, args.rho)
        doc = {"set": [int(v) for v in sol.vertices],
               "objective": sol.objective, "boundary": sol.report.boundary}
    elif args.task == "ucut":
        sol = exact_unbalanced_cut(g, Measure(eta.values), args.tau, args.rho)
        doc = {"set": [int(v) for v in sol.vertices],
               "boundary": sol.objective}
    elif args.task == "kpart":
        cap = args.size_cap or -(-g.n // args.k)
        part, val = exact_minmax_kpart(g, args.k, cap)
        doc = {"parts": [[int(v) for v in p] for p in part.parts],
               "optimum": val}
    elif args.task == "minsum":
        cap = args.size_cap or -(-g.n // args.k)
        part, val = exact_minsum_kpart(g, args.k, cap)
        doc = {"parts": [[int(v) for v in p] for p in part.parts],
               "optimum": val}
    elif args.task == "multiway":
        if args.terminals:
            terminals = [int(t) for t in args.terminals.split(",")]
        elif inst.terminals:
            terminals = [group[0] for group in inst.terminals]
        else:
            raise InputError("multiway oracle needs terminals")
        part, val = exact_multiway(g, terminals)
        doc = {"parts": [[int(v) for v in p] for p in part.parts],
               "optimum": val}
    else:
        raise InputError(f"unknown oracle task {args.task}")
    _emit(doc, args.out)
    return EXIT_OK


def cmd_gen(args):
    params = json.loads(args.params) if args.params else {}
    g = gen_random(args.family, params, args.seed)
    if args.out and args.out.endswith(".json") or args.format == "json":
        gio.dump_json(g, args.out or "/dev/stdout")
    else:
        gio.dump_edgelist(g, args.out or "/dev/stdout")
    return EXIT_OK


def cmd_gap(args):
    rep = verify_multiway_sdp_gap(args.k)
    _emit({"k": rep.k, "fractional": rep.fractional,
           "integral": rep.integral, "ratio": rep.ratio,
           "max_residual": rep.max_residual,
           "center_norms_ok": rep.center_norms_ok}, args.out)
    return EXIT_OK


def cmd_reduce(args):
    inst = _load(args)
    g = inst.graph
    if g.n > 11:
        raise InputError("reduce uses the exact multiway solver; n <= 11")

    def solver(gb, terminals):
        part, _ = exact_multiway(gb, terminals)
        return part

    res = reduce_mmmc_to_ksum(g, args.k, solver)
    _emit({
        "parts": [[int(v) for v in p] for p in res.partition.parts],
        "minsum_cost": res.minsum_cost,
        "balance": res.balance,
        "B_used": res.B_used,
        "tried": res.tried,
    }, args.out)
    return EXIT_OK


def cmd_separator_stats(args):
    rng = stream(args.seed, "separator")
    if args.kind == "orthogonal":
        inst = _load(args)
        g = inst.graph
        mu, eta = _measures(inst)
        prog = rx.build_sse_sdp(g, mu, eta, args.rho, args.H or 0.5)
        sol = rx.solve_sdp(prog)
        if sol.gram is None:
            raise InfeasibleError("relaxation infeasible")
        doc = orthogonal_separator_stats(sol.gram, args.m, args.beta,
                                         args.draws, rng, zeroed=sol.zeroed)
    elif args.kind == "lp":
        inst = _load(args)
        g = inst.graph
        mu, eta = _measures(inst)
        prog = rx.build_sse_lp(g, mu, args.rho, eta=eta, H=args.H or 0.5)
        sol = rx.solve_lp(prog)
        if sol.x is None:
            raise InfeasibleError("relaxation infeasible")
        doc = lp_separator_stats(g, sol.x, sol.z, args.beta, args.draws, rng)
    elif args.kind == "decomposition":
        inst = _load(args)
        g = inst.graph
        doc = decomposition_stats(g, np.ones(g.m), args.delta, args.draws,
                                  rng)
    else:
        raise InputError(f"unknown kind {args.kind}")
    _emit(doc, args.out)
    return EXIT_OK


def cmd_bench(args):
    with open(args.corpus) as fh:
        spec = json.load(fh)
    tasks = []
    for t in spec["tasks"]:
        if "gen" in t:
            g = gen_random(t["gen"]["family"], t["gen"].get("params", {}),
                           t["gen"].get("seed", 0))
        else:
            g = Graph(t["graph"]["n"],
                      [tuple(e) for e in t["graph"]["edges"]])
        task = dict(t)
        task["graph"] = g
        tasks.append(task)
    seeds = [int(s) for s in args.seeds.split(",")]
    records = bench(tasks, seeds, timings=args.timings,
                    config=_config(args))
    text = "\n".join(json.dumps(r, sort_keys=True) for r in records) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="minmaxpart",
        description="min-max graph partitioning via small-set expansion")
    subs = ap.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("sse", help="round one SSE instance")
    _common(sp)
    sp.add_argument("--rho", type=float, required=True)
    sp.add_argument("--H", type=float, default=None)
    sp.add_argument("--budget-mult", type=float, default=None)
    sp.add_argument("--cD", type=float, default=None)
    sp.add_argument("--m-rule", choices=["max", "product"], default=None)
    sp.add_argument("--dump-sdp", default=None)
    sp.add_argument("--dump-lp", default=None)
    sp.set_defaults(func=cmd_sse)

    sp = subs.add_parser("ucut", help="weighted rho-unbalanced cut")
    _common(sp)
    sp.add_argument("--tau", type=float, required=True)
    sp.add_argument("--rho", type=float, required=True)
    sp.set_defaults(func=cmd_ucut)

    sp = subs.add_parser("partition", help="min-max balanced k-partition")
    _common(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.set_defaults(func=cmd_partition)

    sp = subs.add_parser("multiway", help="min-max multiway cut")
    _common(sp)
    sp.add_argument("--terminals", default=None)
    sp.set_defaults(func=cmd_multiway)

    sp = subs.add_parser("minmaxcut", help="generalized min-max cut")
    _common(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--rho", type=float, required=True)
    sp.add_argument("--C", type=float, default=None)
    sp.add_argument("--D", type=float, default=None)
    sp.set_defaults(func=cmd_minmaxcut)

    sp = subs.add_parser("cover", help="multiplicative-weights covering")
    _common(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.set_defaults(func=cmd_cover)

    sp = subs.add_parser("oracle", help="exact solvers for small instances")
    _common(sp)
    sp.add_argument("--task", required=True,
                    choices=["sse", "ucut", "kpart", "minsum", "multiway"])
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--rho", type=float, default=0.5)
    sp.add_argument("--tau", type=float, default=0.5)
    sp.add_argument("--size-cap", type=int, default=None)
    sp.add_argument("--terminals", default=None)
    sp.set_defaults(func=cmd_oracle)

    sp = subs.add_parser("gen", help="write a random instance")
    _common(sp, input_required=False)
    sp.add_argument("--family", required=True,
                    choices=["gnp", "grid", "tree", "planar-triangulation"])
    sp.add_argument("--params", default=None, help="JSON parameter object")
    sp.set_defaults(func=cmd_gen)

    sp = subs.add_parser("gap", help="multiway-cut SDP integrality gap")
    _common(sp, input_required=False)
    sp.add_argument("--k", type=int, required=True)
    sp.set_defaults(func=cmd_gap)

    sp = subs.add_parser("reduce", help="min-sum partition via multiway cut")
    _common(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.set_defaults(func=cmd_reduce)

    sp = subs.add_parser("separator-stats", help="empirical separator stats")
    _common(sp)
    sp.add_argument("--kind", required=True,
                    choices=["orthogonal", "lp", "decomposition"])
    sp.add_argument("--m", type=float, default=4.0)
    sp.add_argument("--beta", type=float, default=0.5)
    sp.add_argument("--rho", type=float, default=0.5)
    sp.add_argument("--H", type=float, default=None)
    sp.add_argument("--delta", type=float, default=2.0)
    sp.add_argument("--draws", type=int, default=20000)
    sp.set_defaults(func=cmd_separator_stats)

    sp = subs.add_parser("bench", help="run the benchmark corpus")
    _common(sp, input_required=False)
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--seeds", default="0")
    sp.add_argument("--timings", action=argparse.BooleanOptionalAction,
                    default=True)
    sp.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InfeasibleError, CoveringLevelError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
