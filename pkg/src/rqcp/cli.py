"""Command line entry point.

Every command prints a JSON report on stdout and a one-line summary on
stderr.  Exit codes: 0 property holds / target reachable, 1 it does not,
2 input error, 3 budget exhausted or inconclusive bounded search.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from . import bounded, eager, mutex, oracle, topology
from .io import SystemFormatError, parse_system_file

EXIT_YES, EXIT_NO, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class InputError(Exception):
    pass


def _target(system, args, file_target):
    if args.target is not None:
        vec = [s.strip() for s in args.target.split(",")]
        # states may be declared as integers in the file
        out = []
        for p, s in zip(system.topology.processes, vec):
            states = system.processes[p].states
            if s not in states and s.lstrip("-").isdigit() and int(s) in states:
                s = int(s)
            out.append(s)
        out += vec[len(out):]
        raw = out
    elif file_target is not None:
        raw = file_target
    else:
        raise InputError("no target given (use --target or a 'target' entry in the file)")
    try:
        return system.vector(raw)
    except ValueError as e:
        raise InputError(str(e)) from None


def _report(verdict, stats, witness=None, **extra) -> dict:
    out = {"verdict": verdict, "stats": stats}
    if witness is not None:
        out["witness"] = witness
    out.update(extra)
    return out


def cmd_topology(args, system, file_target):
    topo = system.topology
    conv, path = topology.is_converging(topo)
    poly = topology.is_polyforest(topo)
    cidx = topo.channel_index
    pairs = sorted(topology.co_cycle_relation(topo), key=lambda cd: (cidx[cd[0]], cidx[cd[1]]))
    cycles = topology.enumerate_simple_cycles(topo) if len(topo.channels) >= 2 else []
    if args.dot:
        print(topology.to_dot(topo))
    rep = _report(
        "converging" if conv else "non-converging",
        {"states_explored": 0, "truncated": False},
        witness=path.as_list() if path else None,
        polyforest=poly,
        co_cycle=[list(p) for p in pairs],
        cycles=[cy.as_list() for cy in cycles],
    )
    summary = f"non-converging: {str(not conv).lower()}, polyforest: {str(poly).lower()}"
    if path:
        summary += f" (witness {path})"
    return rep, summary, EXIT_NO if conv else EXIT_YES, not args.dot


def cmd_eager(args, system, file_target):
    vec = _target(system, args, file_target)
    if system.is_finite:
        parents = eager.explore_abstract(system)
        hit = next((s for s in parents if s.control == vec), None)
        witness = None
        if hit is not None:
            witness = [mutex._label_str(lab) for lab in eager.abstract_path(parents, hit)]
        rep = _report(
            "reachable" if hit else "unreachable",
            {"states_explored": len(parents), "truncated": False},
            witness=witness,
            engine="finite",
        )
        found = hit is not None
    else:
        prod = eager.build_product(system, vec)
        found = eager.ACCEPTING in eager.control_reachable(prod)
        rep = _report(
            "reachable" if found else "unreachable",
            {"states_explored": len(prod.states), "truncated": False},
            engine="product",
        )
    summary = f"target {','.join(map(str, vec))} is {'eager-reachable' if found else 'not eager-reachable'}"
    return rep, summary, EXIT_YES if found else EXIT_NO, True


def cmd_mutex(args, system, file_target):
    v = mutex.check_mutex(system, weak=args.weak)
    rep = _report(
        "mutex" if v.mutex else "not-mutex",
        {"states_explored": v.states_explored, "truncated": False},
        witness=v.witness,
        weak=args.weak,
        polyforest=v.short_circuit,
    )
    name = "weakly mutex" if args.weak else "mutex"
    summary = f"system is {name}" if v.mutex else f"system is not {name}"
    return rep, summary, EXIT_YES if v.mutex else EXIT_NO, True


def cmd_bounded(args, system, file_target):
    vec = _target(system, args, file_target)
    try:
        res = bounded.bounded_state_reach(system, vec, args.k, budget=args.budget)
    except bounded.BudgetExhausted as e:
        rep = _report("budget-exhausted", {"states_explored": 0, "truncated": True}, detail=str(e))
        return rep, f"budget exhausted: {e}", EXIT_BUDGET, True
    rep = _report(
        "reachable" if res.reachable else "unreachable",
        {"states_explored": res.skeletons, "truncated": False},
        witness=[
            {"process": p, "kind": kind, "state": z, "dead_channels": dead}
            for p, kind, z, dead in res.witness
        ] if res.witness else None,
        k=args.k,
        reductions=res.reductions,
    )
    summary = f"target {','.join(map(str, vec))} is {'' if res.reachable else 'not '}reachable within {args.k} phases"
    return rep, summary, EXIT_YES if res.reachable else EXIT_NO, True


def cmd_oracle(args, system, file_target):
    b = oracle.Bounds(args.max_channel, args.max_stack, args.max_steps)
    want = args.target is not None or file_target is not None
    vec = _target(system, args, file_target) if want or args.mode == "kphase" else None
    if args.mode == "kphase":
        if args.k is None:
            raise InputError("--mode kphase needs -k")
        found, cut = oracle.kphase_reach_bruteforce(system, vec, args.k, b)
        res = oracle.OracleResult({vec} if found else set(), cut, 0)
        n = None
    else:
        res = oracle.reach_bruteforce(system, b) if args.mode == "explore" else oracle.eager_reach_bruteforce(system, b)
        n = res.states
    stats = {"states_explored": n if n is not None else 0, "truncated": res.truncated}
    vectors = sorted([list(map(str, v)) for v in res.vectors])
    if vec is None:
        rep = _report("explored", stats, vectors=vectors, mode=args.mode)
        return rep, f"{len(vectors)} control vectors found ({args.mode})", EXIT_YES, True
    if vec in res.vectors:
        verdict, code = "reachable", EXIT_YES
    elif res.truncated:
        verdict, code = "inconclusive", EXIT_BUDGET
    else:
        verdict, code = "unreachable", EXIT_NO
    rep = _report(verdict, stats, mode=args.mode)
    return rep, f"target {','.join(map(str, vec))}: {verdict} ({args.mode}, bounded)", code, True


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rqcp", description="Reachability for recursive processes over FIFO channels.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("topology", help="convergence, polyforest and co-cycle analysis")
    p.add_argument("file")
    p.add_argument("--dot", action="store_true", help="print a Graphviz rendering instead of the report")
    p.set_defaults(func=cmd_topology)

    p = sub.add_parser("eager-reach", help="eager reachability of a control vector")
    p.add_argument("file")
    p.add_argument("--target")
    p.set_defaults(func=cmd_eager)

    p = sub.add_parser("mutex", help="decide the mutex property of a finite system")
    p.add_argument("file")
    p.add_argument("--weak", action="store_true", help="only constrain consecutive channels of each cycle")
    p.set_defaults(func=cmd_mutex)

    p = sub.add_parser("bounded-reach", help="reachability by runs of at most k phases")
    p.add_argument("file")
    p.add_argument("--target")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--budget", type=int, default=None, help="maximum number of reduction steps")
    p.set_defaults(func=cmd_bounded)

    p = sub.add_parser("oracle", help="explicit-state bounded exploration")
    p.add_argument("file")
    p.add_argument("--mode", choices=["explore", "eager", "kphase"], default="explore")
    p.add_argument("--target")
    p.add_argument("-k", type=int, default=None)
    p.add_argument("--max-channel", type=int, default=4)
    p.add_argument("--max-stack", type=int, default=4)
    p.add_argument("--max-steps", type=int, default=14)
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        system, file_target = parse_system_file(args.file)
        rep, summary, code, show = args.func(args, system, file_target)
    except (SystemFormatError, InputError, OSError) as e:
        rep, summary, code, show = _report("input-error", {"states_explored": 0, "truncated": False}, error=str(e)), f"error: {e}", EXIT_INPUT, True
    except eager.ConvergingTopologyError as e:
        rep = _report("input-error", {"states_explored": 0, "truncated": False}, witness=e.witness.as_list(), error=str(e))
        summary, code, show = f"error: {e}", EXIT_INPUT, True
    except (eager.InvalidSystemError, ValueError) as e:
        rep, summary, code, show = _report("input-error", {"states_explored": 0, "truncated": False}, error=str(e)), f"error: {e}", EXIT_INPUT, True
    rep["stats"]["time_ms"] = round((time.perf_counter() - start) * 1000, 3)
    if show:
        print(json.dumps(rep, indent=2, sort_keys=True, default=str))
    print(summary, file=sys.stderr)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
