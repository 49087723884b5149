"""Circuits embedded in a host graph through a routed bramble, and the networks built on them.

Every host vertex carries a list of components. A gate component sits at the
anchor mu(g) of its gate; a wire component copies the previous vertex of a
routed path. Components read only components of adjacent vertices.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from ..core import Alphabet, Graph, LazyAlphabet, Network, expand_set_rule, step_deterministic
from ..traces import StatePredicate
from .circuits import CircuitDag, Gate
from .routing import Bramble, GadgetError, RoutedEmbedding, route, square_coloring

BOT = "bot"


@dataclass(frozen=True)
class Component:
    kind: str  # a gate type or "wire"
    gate: int | None  # circuit gate computed (wire: gate whose value it carries)
    inputs: tuple  # refs (host vertex, component index), in gate input order
    arc: int | None = None


class Layout:
    """Components per host vertex for a routed circuit."""

    def __init__(self, g: Graph, circuit: CircuitDag, emb: RoutedEmbedding):
        self.g, self.circuit, self.emb = g, circuit, emb
        comps = {v: [] for v in g.vertices()}
        gate_ref = {}
        for i in circuit.order:
            v = emb.mu[i]
            gate_ref[i] = (v, len(comps[v]))
            comps[v].append(None)  # filled once the wire ends are known
        wire_end = {}
        for k, (a, b) in enumerate(emb.arcs):
            path = emb.paths[k]
            prev = gate_ref[a]
            for v in path[1:-1]:
                comps[v].append(Component("wire", a, (prev,), k))
                prev = (v, len(comps[v]) - 1)
            wire_end[k] = prev
        arc_ids = {}
        for k, arc in enumerate(emb.arcs):
            arc_ids.setdefault(arc, []).append(k)
        for i in circuit.order:
            gate = circuit.gates[i]
            used = {}
            ins = []
            for a in gate.inputs:
                ks = arc_ids[(a, i)]
                n_used = used.get(a, 0)
                ins.append(wire_end[ks[n_used]])
                used[a] = n_used + 1
            v, idx = gate_ref[i]
            comps[v][idx] = Component(gate.kind, i, tuple(ins))
        self.comps = {v: tuple(cs) for v, cs in comps.items()}
        self.gate_ref = gate_ref
        self.width = max((len(cs) for cs in self.comps.values()), default=0)
        for v, cs in self.comps.items():
            for c in cs:
                for u, _ in c.inputs:
                    if u != v and u not in g.adj[v]:
                        raise GadgetError(f"component at {v} reads non-adjacent vertex {u}")
        users = {}
        for v, cs in self.comps.items():
            for j, c in enumerate(cs):
                for ref in c.inputs:
                    users.setdefault(ref, []).append((v, j))
        self.users = users

    def values(self, bits) -> dict:
        """Component values of the honest computation on input bits: {v: tuple}."""
        val = self.circuit.evaluate(bits)
        return {v: tuple(val[c.gate] for c in cs) for v, cs in self.comps.items()}


def embed_circuit(g: Graph, b: Bramble, circuit: CircuitDag, check=True) -> Layout:
    return Layout(g, circuit, route(g, b, circuit.digraph(), check=check))


def _gate_value(kind, xs):
    if kind in ("identity", "output", "wire"):
        return xs[0]
    if kind == "not":
        return 1 - xs[0]
    if kind == "and":
        return xs[0] & xs[1]
    if kind == "or":
        return xs[0] | xs[1]
    raise GadgetError(f"gate type {kind!r} has no value rule")


# ---------------------------------------------------------------- SAT to nilpotency

class NilpotencyGadget:
    """Hardwired rule: a vertex keeps its Boolean tuple while every local gate check holds.

    Any failed check, or a bottom state anywhere in the closed neighbourhood,
    sends the vertex to bottom, the unique maximal state.
    """

    def __init__(self, layout: Layout):
        self.layout = layout
        g = layout.g
        c = max(1, layout.width)
        self.c = c
        tuples = list(itertools.product((0, 1), repeat=c))
        self.alphabet = Alphabet(tuples + [BOT], [(x, BOT) for x in tuples])
        self.pos = {v: {u: i for i, u in enumerate(g.closed[v])} for v in g.vertices()}
        self.net = Network(g, self.alphabet, rule=self._rule, deterministic=True,
                           name="sat-nilpotency")

    def _rule(self, v, x):
        pos = self.pos[v]
        if any(s == BOT for s in x):
            return (BOT,)
        me = x[pos[v]]
        for j, comp in enumerate(self.layout.comps[v]):
            if comp.kind == "input":
                continue
            xs = [x[pos[u]][i] for u, i in comp.inputs]
            if me[j] != _gate_value(comp.kind, xs):
                return (BOT,)
            if comp.kind == "output" and me[j] != 1:
                return (BOT,)
        return (me,)

    def configuration(self, bits):
        vals = self.layout.values(bits)
        return tuple(vals[v] + (0,) * (self.c - len(vals[v])) for v in self.layout.g.vertices())

    def bottom(self):
        return (BOT,) * self.layout.g.n

    def is_fixed_point(self, config) -> bool:
        return step_deterministic(self.net, config) == tuple(config)

    def run_to_fixed_point(self, config, limit=None):
        limit = limit or self.layout.g.n * 2 + 2
        x = tuple(config)
        for _ in range(limit):
            y = step_deterministic(self.net, x)
            if y == x:
                return x
            x = y
        raise GadgetError("no fixed point within the step limit")

    def random_configuration(self, rng: random.Random):
        return tuple(tuple(rng.randint(0, 1) for _ in range(self.c)) for _ in self.layout.g.vertices())

    def bot_free_fixed_point(self):
        """A verified bottom-free fixed point from some satisfying input, or None."""
        for bits in itertools.product((0, 1), repeat=len(self.layout.circuit.inputs)):
            cfg = self.configuration(bits)
            if self.is_fixed_point(cfg):
                return bits, cfg
        return None


def sat_nilpotency_gadget(circuit: CircuitDag, g: Graph, b: Bramble) -> NilpotencyGadget:
    return NilpotencyGadget(embed_circuit(g, b, circuit))


# ---------------------------------------------------------------- channel encodings

def _channel_layout(layout: Layout, colors):
    c = max(1, layout.width)
    k = max(colors)
    chan = lambda ref: c * (colors[ref[0]] - 1) + ref[1]
    return c, k, chan


def _read(states, ch):
    """Symbol of the unique state whose channel ch is not off, else None."""
    found = None
    for st in states:
        if st[ch][0] != "off":
            if found is not None:
                return None
            found = st[ch][0]
    return found


def _component_sampler(symbols, descs):
    def sample(rng, size):
        return tuple((rng.choice(symbols), rng.choice(descs)) for _ in range(size))
    return sample


class _ChannelGadget:
    symbols = ()
    order_pairs = set()

    def __init__(self, layout: Layout, colors=None):
        self.layout = layout
        g = layout.g
        self.colors = colors or square_coloring(g)
        self.c, self.k, self.chan = _channel_layout(layout, self.colors)
        self.size = self.c * self.k
        self.descs = {}
        for v, cs in layout.comps.items():
            for j, comp in enumerate(cs):
                self.descs[(v, j)] = self.describe(v, j, comp)

    def describe(self, v, j, comp):
        return (comp.kind, tuple(self.chan(r) for r in comp.inputs))

    def owned(self, v):
        return range(self.c * (self.colors[v] - 1), self.c * (self.colors[v] - 1) + len(self.layout.comps[v]))

    def state(self, v, fill):
        """State of v with used components from fill(channel) and the rest off."""
        base = self.c * (self.colors[v] - 1)
        own = set(self.owned(v))
        return tuple((fill(ch), self.descs[(v, ch - base)]) if ch in own else ("off", None)
                     for ch in range(self.size))

    def leq_symbol(self, a, b):
        return a == b or (a, b) in self.order_pairs

    def leq(self, x, y):
        return all(d1 == d2 and self.leq_symbol(s1, s2) for (s1, d1), (s2, d2) in zip(x, y))

    def contains(self, x):
        return (isinstance(x, tuple) and len(x) == self.size
                and all(isinstance(p, tuple) and len(p) == 2 and p[0] in self.symbols for p in x))

    def make_alphabet(self, height, name):
        pool = list(set(self.descs.values())) + [None]
        samp = _component_sampler(list(self.symbols), pool)
        return LazyAlphabet(self.leq, self.contains, lambda rng: samp(rng, self.size),
                            height=height * self.size, name=name)


class PredecessorGadget(_ChannelGadget):
    """Set-defined rule: Booleans are checked against their inputs and become ok, else off; ok decays to off."""

    symbols = (0, 1, "ok", "off")
    order_pairs = {(0, "ok"), (1, "ok"), (0, "off"), (1, "off"), ("ok", "off")}

    def __init__(self, layout: Layout, colors=None, samples=200):
        super().__init__(layout, colors)
        self.alphabet = self.make_alphabet(2, "predecessor-components")
        self.net = expand_set_rule(self.rho, layout.g, self.alphabet, materialize=False,
                                   name="circuit-predecessor", samples=samples)

    def rho(self, own, seen):
        out = []
        for s, desc in own:
            if s in (0, 1) and desc is not None and self._check(s, desc, seen):
                out.append(("ok", desc))
            else:
                out.append(("off", desc))
        return tuple(out)

    @staticmethod
    def _check(s, desc, seen):
        kind, ins = desc
        if kind == "input":
            return True
        xs = [_read(seen, ch) for ch in ins]
        if any(x not in (0, 1) for x in xs):
            return False
        if kind == "output":
            return s == 1 and xs[0] == 1
        return s == _gate_value(kind, xs)

    def target(self):
        return tuple(self.state(v, lambda ch: "ok") for v in self.layout.g.vertices())

    def predecessor(self, bits):
        vals = self.layout.values(bits)
        out = []
        for v in self.layout.g.vertices():
            base = self.c * (self.colors[v] - 1)
            out.append(self.state(v, lambda ch: vals[v][ch - base]))
        return tuple(out)


def circuit_predecessor_gadget(circuit: CircuitDag, g: Graph, b: Bramble, samples=200) -> PredecessorGadget:
    return PredecessorGadget(embed_circuit(g, b, circuit), samples=samples)


class AsyncGadget(_ChannelGadget):
    """Set-defined rule for asynchronous reachability.

    Every input gate gets a pre-input gate routed to it. A pre-input turns
    from ? to 1 when updated; an input turns from ? to 1 if its wire already
    carries a Boolean and to 0 otherwise, so the update order picks the
    assignment. Other components compute once their inputs are Boolean and
    turn ok once every consumer has read them. A false output turns off.
    """

    symbols = ("?", 0, 1, "ok", "off")
    order_pairs = {("?", 0), ("?", 1), ("?", "ok"), ("?", "off"), (0, "ok"), (1, "ok"),
                   (0, "off"), (1, "off"), ("ok", "off")}

    def __init__(self, layout: Layout, pre_of: dict, colors=None, samples=200):
        self.pre_of = pre_of  # input gate -> its pre-input gate
        super().__init__(layout, colors)
        self.alphabet = self.make_alphabet(3, "async-components")
        self.net = expand_set_rule(self.rho, layout.g, self.alphabet, materialize=False,
                                   name="circuit-async", samples=samples)

    def describe(self, v, j, comp):
        kind = "preinput" if comp.gate in self.pre_of.values() and comp.kind == "input" else comp.kind
        users = tuple(self.chan(r) for r in self.layout.users.get((v, j), ()))
        return (kind, tuple(self.chan(r) for r in comp.inputs), users)

    def rho(self, own, seen):
        return tuple((self._next(s, desc, seen), desc) for s, desc in own)

    @staticmethod
    def _next(s, desc, seen):
        if desc is None:
            return "off"
        kind, ins, users = desc
        if s in ("ok", "off"):
            return s
        if s == "?":
            if kind == "preinput":
                return 1
            if kind == "input":
                return 1 if _read(seen, ins[0]) in (0, 1) else 0
            xs = [_read(seen, ch) for ch in ins]
            if any(x not in (0, 1) for x in xs):
                return "?"
            return _gate_value(kind, xs)
        if kind == "output":
            return "ok" if s == 1 else "off"
        if all(_read(seen, ch) not in (None, "?") for ch in users):
            return "ok"
        return s

    def start(self):
        return tuple(self.state(v, lambda ch: "?") for v in self.layout.g.vertices())

    def target(self):
        return tuple(self.state(v, lambda ch: "ok") for v in self.layout.g.vertices())

    def _input_nodes(self):
        out = {}
        circuit = self.layout.circuit
        for k, i in enumerate(circuit.inputs):
            if i in self.pre_of.values():
                continue
            v, j = self.layout.gate_ref[i]
            comp = self.layout.comps[v][j]
            out[i] = (v, self.chan((v, j)), self.chan(comp.inputs[0]))
        return out

    def schedule(self, bits, limit=None):
        """Update schedule (lists of nodes) that reaches the target for a satisfying assignment."""
        circuit = self.layout.circuit
        real = [i for i in circuit.inputs if i not in self.pre_of.values()]
        want = dict(zip(real, bits))
        info = self._input_nodes()
        per_node = {}
        for i, (v, _, _) in info.items():
            per_node.setdefault(v, set()).add(want[i])
        if any(len(s) > 1 for s in per_node.values()):
            raise GadgetError("inputs with different bits share a host vertex")
        g = self.layout.g
        x = self.start()
        sched = []
        limit = limit or 4 * g.n * self.size + 8
        for _ in range(limit):
            full = step_deterministic(self.net, x)
            held = set()
            for i, (v, ch, wire) in info.items():
                if want[i] == 1 and x[v][ch][0] == "?":
                    seen = [x[u] for u in g.closed[v]]
                    if _read(seen, wire) not in (0, 1):
                        held.add(v)
            moved = [v for v in g.vertices() if v not in held and full[v] != x[v]]
            if not moved:
                break
            sched.append(moved)
            x = tuple(full[v] if v in set(moved) else x[v] for v in g.vertices())
        if x != self.target():
            raise GadgetError("schedule did not reach the target configuration")
        return sched

    def random_run(self, rng: random.Random, p=0.5, limit=None):
        """Random asynchronous run from the start until nothing can change; returns the end."""
        g = self.layout.g
        x = self.start()
        limit = limit or 8 * g.n * self.size + 8
        for _ in range(limit):
            full = step_deterministic(self.net, x)
            if full == x:
                return x
            x = tuple(full[v] if rng.random() < p else x[v] for v in g.vertices())
        return x


def with_pre_inputs(circuit: CircuitDag):
    """Circuit where every input gate reads an identity of a fresh pre-input gate.

    Returned as (circuit, {input gate: pre-input gate}); the original input
    gates become identity-fed inputs of kind "input" with one argument in the
    layout, which `AsyncGadget` handles.
    """
    gates = list(circuit.gates)
    pre_of = {}
    for i in circuit.inputs:
        gates.append(Gate("input"))
        pre_of[i] = len(gates) - 1
    return gates, pre_of


def circuit_async_gadget(circuit: CircuitDag, g: Graph, b: Bramble, samples=200) -> AsyncGadget:
    gates, pre_of = with_pre_inputs(circuit)
    # route pre-input -> input arcs along with the circuit arcs
    from .routing import Digraph
    arcs = circuit.arcs() + [(p, i) for i, p in pre_of.items()]
    dg = Digraph(len(gates), arcs)
    emb = route(g, b, dg)
    ext = _ExtendedCircuit(circuit, gates, pre_of)
    layout = Layout(g, ext, emb)
    return AsyncGadget(layout, pre_of, samples=samples)


class _ExtendedCircuit:
    """Circuit view with pre-input gates feeding the inputs (for layouts only)."""

    def __init__(self, base: CircuitDag, gates, pre_of):
        self.base = base
        self.gates = tuple(Gate("input", (pre_of[i],)) if i in pre_of else gt for i, gt in enumerate(gates))
        self.inputs = list(base.inputs) + [pre_of[i] for i in base.inputs]
        self.order = [pre_of[i] for i in base.inputs] + list(base.order)
        self.outputs = base.outputs

    def evaluate(self, bits):
        val = self.base.evaluate(bits)
        return val + [1] * (len(self.gates) - len(val))


# ---------------------------------------------------------------- routed prediction

class PredictionGadget(_ChannelGadget):
    """Set-defined monotone evaluation: waiting components adopt a value once it is determined."""

    symbols = ("wait", 0, 1, "off")
    order_pairs = {("wait", 0), ("wait", 1), (0, 1)}

    def __init__(self, layout: Layout, colors=None, samples=200):
        if not layout.circuit.monotone:
            raise GadgetError("prediction gadget needs a monotone circuit")
        super().__init__(layout, colors)
        self.alphabet = self.make_alphabet(2, "prediction-components")
        self.net = expand_set_rule(self.rho, layout.g, self.alphabet, materialize=False,
                                   name="routed-prediction", samples=samples)
        self.L = max([1] + [len(p) - 1 for p in layout.emb.paths])
        self.t = self.L * max(1, layout.circuit.depth())
        o = layout.circuit.outputs[0]
        self.node, j = layout.gate_ref[o]
        self.channel = self.chan((self.node, j))

    def rho(self, own, seen):
        return tuple((self._next(s, desc, seen), desc) for s, desc in own)

    @staticmethod
    def _next(s, desc, seen):
        if s != "wait" or desc is None:
            return s
        kind, ins = desc
        xs = [_read(seen, ch) for ch in ins]
        if kind in ("identity", "output", "wire"):
            return xs[0] if xs[0] in (0, 1) else "wait"
        if kind == "and":
            if 0 in xs:
                return 0
            return 1 if xs == [1, 1] else "wait"
        if kind == "or":
            if 1 in xs:
                return 1
            return 0 if xs == [0, 0] else "wait"
        return "wait"

    def initial(self, bits):
        circuit = self.layout.circuit
        feed = dict(zip(circuit.inputs, bits))
        out = []
        for v in self.layout.g.vertices():
            base = self.c * (self.colors[v] - 1)
            cs = self.layout.comps[v]
            out.append(self.state(v, lambda ch: feed[cs[ch - base].gate]
                                  if cs[ch - base].kind == "input" else "wait"))
        return tuple(out)

    def output_spec(self, bit):
        ch = self.channel
        return StatePredicate(final=lambda s: s[ch][0] == bit, label=f"output={bit}")

    def simulate(self, bits):
        x = self.initial(bits)
        for _ in range(self.t):
            x = step_deterministic(self.net, x)
        return x[self.node][self.channel][0]


def routed_prediction_gadget(circuit: CircuitDag, g: Graph, b: Bramble, samples=200) -> PredictionGadget:
    return PredictionGadget(embed_circuit(g, b, circuit), samples=samples)
