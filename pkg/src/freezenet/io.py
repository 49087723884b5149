"""JSON formats for networks, specifications, decompositions, brambles and configurations."""
from __future__ import annotations

import json
from pathlib import Path

from .core import Alphabet, Graph, Network, NetworkError, check_configuration, expand_set_rule, validate_network
from .traces import AllOf, Endpoints, RleTrace, Specification, TraceError, TraceSet
from .treedecomp import TreeDecomposition, validate_decomposition


class InputError(ValueError):
    """Malformed or semantically invalid input, with the location that failed."""

    def __init__(self, where, message):
        super().__init__(f"{where}: {message}")
        self.where = where


def state_from_json(x):
    """JSON lists become tuples so states stay hashable."""
    if isinstance(x, list):
        return tuple(state_from_json(y) for y in x)
    return x


def state_to_json(x):
    if isinstance(x, tuple):
        return [state_to_json(y) for y in x]
    return x


def read_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(str(path), f"cannot read file ({exc.strerror})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from exc


def write_json(obj, path=None) -> str:
    text = json.dumps(obj, sort_keys=True, indent=1) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def _field(obj, key, where, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise InputError(where, f"missing field {key!r}")
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        raise InputError(f"{where}.{key}", f"expected {getattr(kind, '__name__', kind)}")
    return val


# ---------------------------------------------------------------- graphs and networks

def graph_from_json(obj, where="graph") -> Graph:
    n = _field(obj, "n", where, int)
    edges = _field(obj, "edges", where, list)
    for i, e in enumerate(edges):
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(u, int) for u in e)):
            raise InputError(f"{where}.edges[{i}]", "expected a pair of vertex ids")
        if not all(0 <= u < n for u in e):
            raise InputError(f"{where}.edges[{i}]", f"vertex out of range 0..{n - 1}")
    try:
        return Graph(n, edges)
    except NetworkError as exc:
        raise InputError(where, str(exc)) from exc


def graph_to_json(g: Graph) -> dict:
    return {"n": g.n, "edges": [list(e) for e in g.edges]}


def network_from_json(obj, where="network") -> Network:
    if isinstance(obj, dict) and "generator" in obj:
        return generated(obj["generator"], f"{where}.generator")["net"]
    g = graph_from_json(obj, where)
    states = [state_from_json(s) for s in _field(obj, "alphabet", where, list)]
    order = obj.get("order", [])
    try:
        alpha = Alphabet(states, [tuple(state_from_json(p)) for p in order])
    except (NetworkError, ValueError) as exc:
        raise InputError(f"{where}.order", str(exc)) from exc
    has_rules, has_set = "rules" in obj, "set_rule" in obj
    if has_rules == has_set:
        raise InputError(where, "give exactly one of 'rules' or 'set_rule'")
    if has_set:
        rho = {}
        for i, row in enumerate(_field(obj, "set_rule", where, list)):
            loc = f"{where}.set_rule[{i}]"
            s = state_from_json(_field(row, "state", loc))
            seen = frozenset(state_from_json(x) for x in _field(row, "set", loc, list))
            if s not in seen:
                raise InputError(loc, "the set must contain the node's own state")
            rho[(s, seen)] = state_from_json(_field(row, "out", loc))
        try:
            net = expand_set_rule(rho, g, alpha, materialize=True)
        except NetworkError as exc:
            raise InputError(f"{where}.set_rule", str(exc)) from exc
    else:
        rules = _field(obj, "rules", where, dict)
        tables = []
        for v in g.vertices():
            loc = f"{where}.rules.{v}"
            rows = rules.get(str(v))
            if rows is None:
                raise InputError(loc, "missing rule table")
            t = {}
            for i, row in enumerate(rows):
                inp = _field(row, "input", f"{loc}[{i}]", dict)
                keys = {int(k) for k in inp}
                if keys != set(g.closed[v]):
                    raise InputError(f"{loc}[{i}].input",
                                     f"must assign exactly the closed neighbourhood {list(g.closed[v])}")
                x = tuple(state_from_json(inp[str(u)]) for u in g.closed[v])
                out = [state_from_json(s) for s in _field(row, "out", f"{loc}[{i}]", list)]
                t[x] = frozenset(out)
            tables.append(t)
        net = Network(g, alpha, tables=tables)
    rep = validate_network(net)
    if not rep.ok:
        first = rep.violations[0]
        node = f".rules.{first.node}" if first.node is not None else ""
        raise InputError(f"{where}{node}", f"{len(rep.violations)} violation(s), first: {first}")
    return net


def network_to_json(net: Network) -> dict:
    if getattr(net, "generator", None) is not None:
        return {"generator": net.generator}
    if not net.alphabet.enumerable:
        raise InputError("network", "lazy alphabets can only be written as generator records")
    obj = {"alphabet": [state_to_json(s) for s in net.alphabet.states],
           "order": [[state_to_json(a), state_to_json(b)] for a, b in net.alphabet.order_pairs()],
           **graph_to_json(net.graph)}
    g = net.graph
    rules = {}
    for v in g.vertices():
        rows = []
        for x, out in sorted(net.table(v).items(), key=repr):
            rows.append({"input": {str(u): state_to_json(s) for u, s in zip(g.closed[v], x)},
                         "out": [state_to_json(s) for s in sorted(out, key=repr)]})
        rules[str(v)] = rows
    obj["rules"] = rules
    return obj


# ---------------------------------------------------------------- specifications

def trace_from_json(runs, where) -> RleTrace:
    if not isinstance(runs, list) or not runs:
        raise InputError(where, "a trace is a non-empty list of [state, length] runs")
    try:
        return RleTrace(tuple((state_from_json(r[0]), int(r[1])) for r in runs))
    except (TypeError, IndexError, TraceError, ValueError) as exc:
        raise InputError(where, f"bad run list ({exc})") from exc


def trace_to_json(tr: RleTrace):
    return [[state_to_json(s), k] for s, k in tr.runs]


def spec_from_json(obj, n: int | None = None, alphabet=None, where="spec") -> Specification:
    if isinstance(obj, dict) and "generator" in obj and "nodes" not in obj:
        return generated(obj["generator"], f"{where}.generator")["spec"]
    t = _field(obj, "t", where, int)
    if obj.get("default", "any") != "any":
        raise InputError(f"{where}.default", "only 'any' is supported")
    cons = {}
    for key, traces in obj.get("nodes", {}).items():
        loc = f"{where}.nodes.{key}"
        v = _node_id(key, n, loc)
        trs = [trace_from_json(r, f"{loc}[{i}]") for i, r in enumerate(traces)]
        for i, tr in enumerate(trs):
            if tr.t != t:
                raise InputError(f"{loc}[{i}]", f"trace covers {tr.t + 1} steps, expected {t + 1}")
            if alphabet is not None and (any(s not in alphabet for s in tr.states())
                                         or not tr.is_monotone(alphabet)):
                raise InputError(f"{loc}[{i}]", "trace uses unknown states or decreases")
        cons[v] = TraceSet(trs)
    for key, ends in obj.get("endpoints", {}).items():
        loc = f"{where}.endpoints.{key}"
        v = _node_id(key, n, loc)
        e = Endpoints(state_from_json(ends.get("first")), state_from_json(ends.get("last")))
        cons[v] = AllOf(cons[v], e) if v in cons else e
    return Specification(t, cons)


def _node_id(key, n, where):
    try:
        v = int(key)
    except ValueError as exc:
        raise InputError(where, "node ids are integers") from exc
    if n is not None and not 0 <= v < n:
        raise InputError(where, f"unknown node {v} (network has {n} nodes)")
    return v


def spec_to_json(spec: Specification) -> dict:
    if spec.generator is not None:
        return {"t": spec.t, "generator": spec.generator}
    nodes, ends = {}, {}
    for v, c in sorted(spec.constraints.items()):
        parts = c.parts if isinstance(c, AllOf) else (c,)
        for p in parts:
            if isinstance(p, TraceSet):
                nodes[str(v)] = [trace_to_json(tr) for tr in sorted(p.traces, key=repr)]
            elif isinstance(p, Endpoints):
                e = {}
                if p.first is not None:
                    e["first"] = state_to_json(p.first)
                if p.last is not None:
                    e["last"] = state_to_json(p.last)
                ends[str(v)] = e
            else:
                raise InputError(f"spec.nodes.{v}", f"{p!r} has no file form")
    obj = {"t": spec.t, "nodes": nodes, "default": "any"}
    if ends:
        obj["endpoints"] = ends
    return obj


# ---------------------------------------------------------------- the rest

def decomposition_from_json(obj, g: Graph | None = None, where="decomposition") -> TreeDecomposition:
    bags = _field(obj, "bags", where, list)
    edges = _field(obj, "edges", where, list)
    root = obj.get("root", 0)
    try:
        d = TreeDecomposition([frozenset(b) for b in bags], [tuple(e) for e in edges], root)
    except ValueError as exc:
        raise InputError(where, str(exc)) from exc
    if g is not None:
        res = validate_decomposition(g, d)
        if isinstance(res, list):
            raise InputError(where, "; ".join(res))
    return d


def configuration_from_json(obj, net: Network, where="configuration") -> tuple:
    if not isinstance(obj, list):
        raise InputError(where, "a configuration is a flat array of states")
    try:
        return check_configuration(net, [state_from_json(s) for s in obj])
    except NetworkError as exc:
        raise InputError(where, str(exc)) from exc


def configuration_to_json(c) -> list:
    return [state_to_json(s) for s in c]


def bramble_from_json(obj, where="bramble"):
    from .gadgets import Bramble
    els = _field(obj, "elements", where, list)
    return Bramble([set(e) for e in els])


# ---------------------------------------------------------------- generator records

def generated(rec, where="generator") -> dict:
    """Rebuild a gadget from its generator record: {"net", "spec", ...}."""
    from . import gadgets as gd
    kind = _field(rec, "kind", where, str)
    if kind == "dominating-set":
        g = graph_from_json(_field(rec, "graph", where, dict), f"{where}.graph")
        gad = gd.dominating_set_gadget(g, _field(rec, "k", where, int))
        gad.net.generator = rec
        gad.spec.generator = rec
        return {"net": gad.net, "spec": gad.spec, "gadget": gad}
    circuit = gd.CircuitDag.from_json(_field(rec, "circuit", where, dict))
    m = _field(rec, "grid", where, int)
    g, b = gd.grid_host(m)
    builders = {"sat-nilpotency": gd.sat_nilpotency_gadget,
                "circuit-predecessor": gd.circuit_predecessor_gadget,
                "circuit-async": gd.circuit_async_gadget,
                "routed-prediction": gd.routed_prediction_gadget}
    if kind not in builders:
        raise InputError(f"{where}.kind", f"unknown gadget kind {kind!r}")
    gad = builders[kind](circuit, g, b)
    gad.net.generator = rec
    return {"net": gad.net, "spec": None, "gadget": gad}
