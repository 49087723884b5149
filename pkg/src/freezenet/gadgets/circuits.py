"""Boolean circuits as bounded-degree DAGs."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .routing import Digraph, GadgetError

ARITY = {"input": 0, "identity": 1, "not": 1, "and": 2, "or": 2, "output": 1}


@dataclass(frozen=True)
class Gate:
    kind: str
    inputs: tuple = ()


class CircuitDag:
    """Gates with fan-in and fan-out at most two; inputs are the `input` gates in index order."""

    def __init__(self, gates):
        self.gates = tuple(g if isinstance(g, Gate) else Gate(g[0], tuple(g[1])) for g in gates)
        fanout = [0] * len(self.gates)
        for i, g in enumerate(self.gates):
            if g.kind not in ARITY:
                raise GadgetError(f"gate {i}: unknown type {g.kind!r}")
            if len(g.inputs) != ARITY[g.kind]:
                raise GadgetError(f"gate {i}: {g.kind} takes {ARITY[g.kind]} inputs")
            for a in g.inputs:
                if not 0 <= a < len(self.gates) or self.gates[a].kind == "output":
                    raise GadgetError(f"gate {i}: bad input {a}")
                fanout[a] += 1
        if max(fanout, default=0) > 2:
            raise GadgetError("fan-out above 2")
        self.order = self._topological()
        self.inputs = [i for i, g in enumerate(self.gates) if g.kind == "input"]
        self.outputs = [i for i, g in enumerate(self.gates) if g.kind == "output"]
        if not self.outputs:
            raise GadgetError("circuit has no output gate")

    def _topological(self):
        indeg = [len(g.inputs) for g in self.gates]
        users = [[] for _ in self.gates]
        for i, g in enumerate(self.gates):
            for a in g.inputs:
                users[a].append(i)
        ready = [i for i, k in enumerate(indeg) if k == 0]
        out = []
        while ready:
            i = ready.pop(0)
            out.append(i)
            for u in users[i]:
                indeg[u] -= 1
                if indeg[u] == 0:
                    ready.append(u)
        if len(out) != len(self.gates):
            raise GadgetError("circuit has a cycle")
        return out

    def __len__(self):
        return len(self.gates)

    def __repr__(self):
        return f"CircuitDag({len(self.gates)} gates, {len(self.inputs)} inputs)"

    @property
    def monotone(self):
        return all(g.kind != "not" for g in self.gates)

    def arcs(self):
        return [(a, i) for i, g in enumerate(self.gates) for a in g.inputs]

    def digraph(self) -> Digraph:
        return Digraph(len(self.gates), self.arcs())

    def consumers(self, i):
        return [j for j, g in enumerate(self.gates) for a in g.inputs if a == i]

    def evaluate(self, bits) -> list:
        """Value of every gate under the input assignment."""
        bits = list(bits)
        if len(bits) != len(self.inputs):
            raise GadgetError(f"expected {len(self.inputs)} input bits")
        val = [None] * len(self.gates)
        feed = dict(zip(self.inputs, bits))
        for i in self.order:
            g = self.gates[i]
            xs = [val[a] for a in g.inputs]
            if g.kind == "input":
                val[i] = int(feed[i])
            elif g.kind in ("identity", "output"):
                val[i] = xs[0]
            elif g.kind == "not":
                val[i] = 1 - xs[0]
            elif g.kind == "and":
                val[i] = xs[0] & xs[1]
            else:
                val[i] = xs[0] | xs[1]
        return val

    def output(self, bits) -> int:
        return self.evaluate(bits)[self.outputs[0]]

    def satisfying(self):
        """First satisfying input assignment in lexicographic order, or None."""
        for bits in itertools.product((0, 1), repeat=len(self.inputs)):
            if self.output(bits):
                return bits
        return None

    def depth(self) -> int:
        d = [0] * len(self.gates)
        for i in self.order:
            g = self.gates[i]
            d[i] = 1 + max((d[a] for a in g.inputs), default=-1)
        return max(d)

    def to_json(self):
        return {"gates": [[g.kind, list(g.inputs)] for g in self.gates]}

    @classmethod
    def from_json(cls, obj):
        return cls([(k, tuple(ins)) for k, ins in obj["gates"]])


def _random_formula(rng, gates, sources, size, kinds):
    """Append a random formula reading each source at most once; returns its root."""
    pool = list(sources)
    rng.shuffle(pool)
    for _ in range(size):
        kind = rng.choice(kinds)
        if ARITY[kind] == 2 and len(pool) >= 2:
            a, b = pool.pop(), pool.pop()
            gates.append(Gate(kind, (a, b)))
        else:
            a = pool.pop()
            gates.append(Gate("not" if "not" in kinds and kind != "identity" else "identity", (a,)))
        pool.insert(rng.randrange(len(pool) + 1), len(gates) - 1)
    while len(pool) > 1:
        a, b = pool.pop(), pool.pop()
        gates.append(Gate(rng.choice([k for k in kinds if ARITY[k] == 2]), (a, b)))
        pool.insert(0, len(gates) - 1)
    return pool[0]


def random_circuit(rng: random.Random, inputs: int, size: int, monotone=False) -> CircuitDag:
    """Formula-shaped circuit over `inputs` variables with about `size` inner gates."""
    kinds = ["and", "or"] if monotone else ["and", "or", "not"]
    gates = [Gate("input") for _ in range(inputs)]
    root = _random_formula(rng, gates, range(inputs), size, kinds)
    gates.append(Gate("output", (root,)))
    return CircuitDag(gates)


def contradiction_circuit(rng: random.Random, inputs: int, size: int) -> CircuitDag:
    """C AND NOT C' where C' is a copy of C: unsatisfiable by construction."""
    gates = [Gate("input") for _ in range(inputs)]
    r1 = _random_formula(rng, gates, range(inputs), size, ["and", "or", "not"])
    offset = len(gates) - inputs
    copied = gates[inputs:]
    remap = lambda a: a if a < inputs else a + offset
    for g in copied:
        gates.append(Gate(g.kind, tuple(remap(a) for a in g.inputs)))
    r2 = remap(r1)
    gates.append(Gate("not", (r2,)))
    gates.append(Gate("and", (r1, len(gates) - 1)))
    gates.append(Gate("output", (len(gates) - 1,)))
    return CircuitDag(gates)


def parse_circuit(text: str) -> CircuitDag:
    """Tiny formula syntax: variables, ~ (not), & (and), | (or), parentheses.

    Each occurrence of a variable reads the same input gate, so a variable may
    appear at most twice.
    """
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()~&|":
            tokens.append(ch)
            i += 1
        elif ch.isalnum() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(text[i:j])
            i = j
        else:
            raise GadgetError(f"unexpected character {ch!r}")
    names = sorted({t for t in tokens if t not in "()~&|"}, key=tokens.index)
    gates = [Gate("input") for _ in names]
    var = {n: k for k, n in enumerate(names)}
    pos = [0]

    def peek():
        return tokens[pos[0]] if pos[0] < len(tokens) else None

    def take(expected=None):
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise GadgetError(f"expected {expected or 'a term'} at token {pos[0]}")
        pos[0] += 1
        return tok

    def expr():
        a = term()
        while peek() == "|":
            take()
            b = term()
            gates.append(Gate("or", (a, b)))
            a = len(gates) - 1
        return a

    def term():
        a = factor()
        while peek() == "&":
            take()
            b = factor()
            gates.append(Gate("and", (a, b)))
            a = len(gates) - 1
        return a

    def factor():
        tok = take()
        if tok == "~":
            a = factor()
            gates.append(Gate("not", (a,)))
            return len(gates) - 1
        if tok == "(":
            a = expr()
            take(")")
            return a
        if tok in var:
            return var[tok]
        raise GadgetError(f"unexpected token {tok!r}")

    root = expr()
    if peek() is not None:
        raise GadgetError(f"trailing tokens from {pos[0]}")
    gates.append(Gate("output", (root,)))
    return CircuitDag(gates)
