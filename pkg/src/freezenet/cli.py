"""Command-line frontend. Exit codes: 0 yes, 1 no, 2 usage or validation, 3 budget, 4 disagreement."""
from __future__ import annotations

import argparse
import json
import os
import random
import sys

from . import io
from .core import NetworkError, ResourceLimitError, orbit, successors
from .oracle import (OracleBudget, brute_async_reach, brute_check_spec, brute_dominating_set,
                     brute_nilpotency, brute_predecessor, brute_prediction)
from .problems import solve_async_reachability, solve_nilpotency, solve_predecessor, solve_prediction
from .solver import DEFAULT_BAG_CAP, Verdict, WitnessError, check_spec, default_jobs
from .traces import RleTrace, TraceError
from .treedecomp import binarize_balance, default_decomposition, validate_decomposition

YES, NO, USAGE, BUDGET, DISAGREE = 0, 1, 2, 3, 4


class Disagreement(RuntimeError):
    pass


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        val = int(raw)
    except ValueError:
        raise io.InputError(name, "expected an integer") from None
    if val <= 0:
        raise io.InputError(name, "budgets must be positive")
    return val


def _budget(args) -> OracleBudget:
    return OracleBudget(max_configs=_env_int("FREEZENET_ORACLE_MAX_CONFIGS", 2_000_000),
                        max_nodes=_env_int("FREEZENET_ORACLE_MAX_NODES", 5_000_000),
                        timeout=float(_env_int("FREEZENET_ORACLE_TIMEOUT", 120)))


def _solver_kw(args, net):
    kw = {"jobs": args.jobs or default_jobs(), "cap": args.cap or _env_int("FREEZENET_BAG_CAP", DEFAULT_BAG_CAP)}
    if getattr(args, "decomposition", None):
        kw["decomposition"] = io.decomposition_from_json(io.read_json(args.decomposition), net.graph,
                                                         where=args.decomposition)
    return kw


def _load_net(path):
    return io.network_from_json(io.read_json(path), where=path)


def _load_config(path, net):
    return io.configuration_from_json(io.read_json(path), net, where=path)


def _cross(verdict: Verdict, oracle_answer: bool):
    verdict.stats["oracle"] = oracle_answer
    if bool(oracle_answer) != verdict.satisfiable:
        raise Disagreement(f"solver says {verdict.satisfiable}, oracle says {oracle_answer}")


def _emit(args, obj):
    text = json.dumps(obj, sort_keys=True, default=str) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_verdict(args, verdict: Verdict):
    _emit(args, verdict.to_json(include_timing=args.timing))
    return YES if verdict.satisfiable else NO


# ---------------------------------------------------------------- subcommands

def cmd_check_spec(args):
    net = _load_net(args.net)
    raw = io.read_json(args.spec)
    spec = io.spec_from_json(raw, net.n, net.alphabet if net.alphabet.enumerable else None, where=args.spec)
    t = args.t if args.t is not None else spec.t
    if t != spec.t:
        raise io.InputError("--t", f"horizon {t} differs from the specification's {spec.t}")
    verdict = check_spec(net, spec, witness=not args.no_witness, **_solver_kw(args, net))
    if args.oracle:
        _cross(verdict, brute_check_spec(net, spec, t, _budget(args)))
    return _emit_verdict(args, verdict)


def cmd_predict(args):
    net = _load_net(args.net)
    c = _load_config(args.config, net)
    spec = io.spec_from_json(io.read_json(args.spec), net.n, net.alphabet, where=args.spec)
    con = spec.constraint(args.node)
    if con is None:
        raise io.InputError(args.spec, f"no constraint for node {args.node}")
    verdict = solve_prediction(net, c, args.node, con, spec.t, **_solver_kw(args, net))
    if args.oracle:
        _cross(verdict, brute_prediction(net, c, args.node, con, spec.t))
    return _emit_verdict(args, verdict)


def cmd_predecessor(args):
    net = _load_net(args.net)
    c = _load_config(args.config, net)
    verdict = solve_predecessor(net, c, args.t, **_solver_kw(args, net))
    if args.oracle:
        _cross(verdict, brute_predecessor(net, c, args.t, _budget(args)) is not None)
    return _emit_verdict(args, verdict)


def cmd_nilpotency(args):
    net = _load_net(args.net)
    verdict = solve_nilpotency(net, method=args.method, **_solver_kw(args, net))
    if args.oracle:
        _cross(verdict, brute_nilpotency(net, _budget(args)))
    return _emit_verdict(args, verdict)


def cmd_async_reach(args):
    net = _load_net(args.net)
    c0 = _load_config(args.source, net)
    c1 = _load_config(args.target, net)
    verdict = solve_async_reachability(net, c0, c1, **_solver_kw(args, net))
    if args.oracle:
        _cross(verdict, brute_async_reach(net, c0, c1, _budget(args)))
    return _emit_verdict(args, verdict)


def cmd_simulate(args):
    net = _load_net(args.net)
    c = _load_config(args.config, net)
    if net.deterministic:
        configs = orbit(net, c, args.t).configs
    else:
        rng = random.Random(args.seed)
        configs = [c]
        for _ in range(args.t):
            configs.append(rng.choice(sorted(successors(net, configs[-1]), key=repr)))
    traces = {str(v): io.trace_to_json(RleTrace.from_sequence([x[v] for x in configs]))
              for v in range(net.n)}
    _emit(args, {"t": args.t, "final": io.configuration_to_json(configs[-1]), "traces": traces})
    return YES


def cmd_decompose(args):
    net = _load_net(args.net)
    g = net.graph
    if args.check:
        d = io.decomposition_from_json(io.read_json(args.check), where=args.check)
        res = validate_decomposition(g, d)
        if isinstance(res, list):
            _emit(args, {"valid": False, "violations": res})
            return NO
        _emit(args, {"valid": True, "width": res, "depth": d.depth, "binary": d.is_binary})
        return YES
    d = default_decomposition(g)
    if args.balance:
        d = binarize_balance(d)
    _emit(args, d.to_json())
    return YES


def cmd_route(args):
    from . import gadgets as gd
    if args.grid:
        g, b = gd.grid_host(args.grid)
    else:
        if not (args.graph and args.bramble):
            raise io.InputError("route", "give --grid M or both --graph and --bramble")
        g = io.graph_from_json(io.read_json(args.graph), where=args.graph)
        b = io.bramble_from_json(io.read_json(args.bramble), where=args.bramble)
    if args.circuit:
        d = gd.parse_circuit(args.circuit).digraph()
    elif args.digraph:
        raw = io.read_json(args.digraph)
        d = gd.Digraph(raw["n"], [tuple(a) for a in raw["arcs"]])
    else:
        raise io.InputError("route", "give --circuit or --digraph")
    emb = gd.route(g, b, d)
    out = emb.to_json()
    out["max_load"] = emb.max_load()
    out["bound"] = 4 * d.max_degree
    _emit(args, out)
    return YES


def cmd_gadget(args):
    from . import gadgets as gd
    outdir = args.out_dir
    os.makedirs(outdir, exist_ok=True)
    files = {}
    if args.kind == "dominating-set":
        g = io.graph_from_json(io.read_json(args.graph), where=args.graph)
        rec = {"kind": "dominating-set", "graph": io.graph_to_json(g), "k": args.k}
        built = io.generated(rec)
        gad = built["gadget"]
        files["network.json"] = {"generator": rec}
        files["spec.json"] = {"t": gad.spec.t, "generator": rec}
        summary = {"host_nodes": gad.host.n, "t": gad.t, "satisfiable": gad.satisfiable()}
    else:
        if not args.circuit:
            raise io.InputError("gadget", "circuit gadgets need --circuit")
        circuit = gd.parse_circuit(args.circuit)
        extra = len(circuit.inputs) if args.kind == "circuit-async" else 0
        m = args.grid or max(2, len(circuit) + extra)
        rec = {"kind": args.kind, "circuit": circuit.to_json(), "grid": m}
        gad = io.generated(rec)["gadget"]
        files["network.json"] = {"generator": rec}
        sat = circuit.satisfying()
        summary = {"grid": m, "host_nodes": gad.layout.g.n, "components": gad.layout.width,
                   "circuit_satisfiable": sat is not None}
        if args.kind == "sat-nilpotency":
            fp = gad.bot_free_fixed_point()
            summary["bot_free_fixed_point"] = fp is not None
            if fp:
                files["fixed_point.json"] = io.configuration_to_json(fp[1])
        elif args.kind == "circuit-predecessor":
            files["target.json"] = io.configuration_to_json(gad.target())
            if sat is not None:
                files["predecessor.json"] = io.configuration_to_json(gad.predecessor(sat))
        elif args.kind == "circuit-async":
            files["start.json"] = io.configuration_to_json(gad.start())
            files["target.json"] = io.configuration_to_json(gad.target())
            if sat is not None:
                files["schedule.json"] = gad.schedule(sat)
        elif args.kind == "routed-prediction":
            bits = [int(ch) for ch in (args.bits or "0" * len(circuit.inputs))]
            files["initial.json"] = io.configuration_to_json(gad.initial(bits))
            summary.update(node=gad.node, channel=gad.channel, t=gad.t,
                           output=gad.simulate(bits), expected=circuit.output(bits))
    for name, obj in files.items():
        io.write_json(obj, os.path.join(outdir, name))
    summary["files"] = sorted(files)
    _emit(args, summary)
    return YES


def cmd_oracle(args):
    budget = _budget(args)
    kind = args.kind
    if kind == "dominating-set":
        g = io.graph_from_json(io.read_json(args.graph), where=args.graph)
        ans = brute_dominating_set(g, args.k, budget)
        _emit(args, {"satisfiable": ans})
        return YES if ans else NO
    net = _load_net(args.net)
    if kind == "check-spec":
        spec = io.spec_from_json(io.read_json(args.spec), net.n, net.alphabet, where=args.spec)
        ans = brute_check_spec(net, spec, spec.t, budget)
    elif kind == "nilpotency":
        ans = brute_nilpotency(net, budget)
    elif kind == "predecessor":
        y = brute_predecessor(net, _load_config(args.config, net), args.t, budget)
        _emit(args, {"satisfiable": y is not None,
                     "predecessor": None if y is None else io.configuration_to_json(y)})
        return YES if y is not None else NO
    elif kind == "async-reach":
        ans = brute_async_reach(net, _load_config(args.source, net), _load_config(args.target, net), budget)
    else:
        spec = io.spec_from_json(io.read_json(args.spec), net.n, net.alphabet, where=args.spec)
        ans = brute_prediction(net, _load_config(args.config, net), args.node,
                               spec.constraint(args.node), spec.t)
    _emit(args, {"satisfiable": bool(ans)})
    return YES if ans else NO


# ---------------------------------------------------------------- parser

def build_parser():
    p = argparse.ArgumentParser(prog="freezenet", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write JSON here instead of standard output")
    common.add_argument("--jobs", type=int, default=0, help="worker threads (default: available cores)")
    common.add_argument("--cap", type=int, default=0, help="maximum entries per bag table")
    common.add_argument("--seed", type=int, default=0, help="seed for randomised choices")
    common.add_argument("--timing", action="store_true", help="include wall-clock fields in the output")
    solving = argparse.ArgumentParser(add_help=False)
    solving.add_argument("--decomposition", help="tree decomposition JSON to use")
    solving.add_argument("--oracle", action="store_true", help="cross-check against brute force")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check-spec", parents=[common, solving], help="is some orbit inside the specification")
    s.add_argument("--net", required=True)
    s.add_argument("--spec", required=True)
    s.add_argument("--t", type=int)
    s.add_argument("--no-witness", action="store_true")
    s.set_defaults(fn=cmd_check_spec)

    s = sub.add_parser("predict", parents=[common, solving], help="does the orbit of c stay in spec at one node")
    s.add_argument("--net", required=True)
    s.add_argument("--config", required=True)
    s.add_argument("--node", type=int, required=True)
    s.add_argument("--spec", required=True, help="specification whose constraint at --node is used")
    s.set_defaults(fn=cmd_predict)

    s = sub.add_parser("predecessor", parents=[common, solving], help="is there y with F^t(y) = c")
    s.add_argument("--net", required=True)
    s.add_argument("--config", required=True)
    s.add_argument("--t", type=int, default=1)
    s.set_defaults(fn=cmd_predecessor)

    s = sub.add_parser("nilpotency", parents=[common, solving], help="do all orbits end in one fixed point")
    s.add_argument("--net", required=True)
    s.add_argument("--method", choices=["fixed-points", "horizon"], default="fixed-points")
    s.set_defaults(fn=cmd_nilpotency)

    s = sub.add_parser("async-reach", parents=[common, solving], help="asynchronous reachability")
    s.add_argument("--net", required=True)
    s.add_argument("--from", dest="source", required=True)
    s.add_argument("--to", dest="target", required=True)
    s.set_defaults(fn=cmd_async_reach)

    s = sub.add_parser("simulate", parents=[common], help="orbit of a configuration as run-length traces")
    s.add_argument("--net", required=True)
    s.add_argument("--config", required=True)
    s.add_argument("--t", type=int, required=True)
    s.set_defaults(fn=cmd_simulate)

    s = sub.add_parser("decompose", parents=[common], help="emit or check a tree decomposition")
    s.add_argument("--net", required=True)
    s.add_argument("--balance", action="store_true", help="binary, logarithmic-depth output")
    s.add_argument("--check", help="validate this decomposition file instead")
    s.set_defaults(fn=cmd_decompose)

    s = sub.add_parser("route", parents=[common], help="route a digraph through a perfect bramble")
    s.add_argument("--grid", type=int, help="use the m x m grid and its row+column bramble")
    s.add_argument("--graph")
    s.add_argument("--bramble")
    s.add_argument("--digraph", help='JSON {"n": int, "arcs": [[a, b], ..]}')
    s.add_argument("--circuit", help="formula such as 'x & ~y'")
    s.set_defaults(fn=cmd_route)

    s = sub.add_parser("gadget", parents=[common], help="build a hardness gadget and write its files")
    s.add_argument("kind", choices=["dominating-set", "sat-nilpotency", "circuit-predecessor",
                                    "circuit-async", "routed-prediction"])
    s.add_argument("--out-dir", required=True)
    s.add_argument("--graph", help="graph JSON for dominating-set")
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--circuit")
    s.add_argument("--grid", type=int)
    s.add_argument("--bits", help="input bits for routed-prediction, e.g. 101")
    s.set_defaults(fn=cmd_gadget)

    s = sub.add_parser("oracle", parents=[common], help="brute-force answer")
    s.add_argument("kind", choices=["check-spec", "nilpotency", "predecessor", "async-reach",
                                    "prediction", "dominating-set"])
    s.add_argument("--net")
    s.add_argument("--spec")
    s.add_argument("--config")
    s.add_argument("--node", type=int, default=0)
    s.add_argument("--t", type=int, default=1)
    s.add_argument("--from", dest="source")
    s.add_argument("--to", dest="target")
    s.add_argument("--graph")
    s.add_argument("--k", type=int, default=1)
    s.set_defaults(fn=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except ResourceLimitError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return BUDGET
    except (Disagreement, WitnessError) as exc:
        print(f"disagreement: {exc}", file=sys.stderr)
        return DISAGREE
    except (io.InputError, NetworkError, TraceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
