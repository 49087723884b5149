"""Freezing automata networks: alphabets, graphs, local rules and their dynamics.

Rule tables are indexed by assignments to the *closed* neighbourhood of a node,
listed in increasing label order (the node itself included).
"""
from __future__ import annotations

import itertools
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, Sequence

import numpy as np

State = Hashable
Configuration = tuple

DEFAULT_SUCCESSOR_CAP = 10**6


class NetworkError(ValueError):
    """Raised for malformed or non-freezing networks and misuse of the semantics."""


class ResourceLimitError(RuntimeError):
    """An enumeration would exceed its configured cap."""

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


# ---------------------------------------------------------------- alphabets

class Alphabet:
    """Finite, explicitly listed alphabet with a partial order.

    `order` holds (lower, higher) pairs; the reflexive-transitive closure is
    computed once and stored as a boolean matrix.
    """

    enumerable = True

    def __init__(self, states: Iterable[State], order: Iterable[tuple] = ()):
        states = list(states)
        if not states:
            raise NetworkError("alphabet must contain at least one state")
        index = {}
        for i, s in enumerate(states):
            if s in index:
                raise NetworkError(f"state {s!r} listed twice")
            index[s] = i
        self.states = tuple(states)
        self.index = index
        m = np.eye(len(states), dtype=bool)
        for lo, hi in order:
            if lo not in index or hi not in index:
                raise NetworkError(f"order pair ({lo!r}, {hi!r}) uses an unknown state")
            m[index[lo], index[hi]] = True
        for k in range(len(states)):
            m |= np.outer(m[:, k], m[k, :])
        both = m & m.T
        np.fill_diagonal(both, False)
        if both.any():
            i, j = map(int, np.argwhere(both)[0])
            raise NetworkError(f"order is not antisymmetric: {states[i]!r} and {states[j]!r}")
        self._leq = m
        self._height = None

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __contains__(self, s):
        try:
            return s in self.index
        except TypeError:
            return False

    def __repr__(self):
        return f"Alphabet({list(self.states)!r}, {self.order_pairs()!r})"

    def leq(self, a, b) -> bool:
        return bool(self._leq[self.index[a], self.index[b]])

    def lt(self, a, b) -> bool:
        return a != b and self.leq(a, b)

    def rank(self, s) -> int:
        return self.index[s]

    def order_pairs(self):
        """Strict pairs of the closure, as (lower, higher)."""
        ii, jj = np.nonzero(self._leq)
        return [(self.states[i], self.states[j]) for i, j in zip(ii, jj) if i != j]

    def above(self, s):
        """States strictly above s, in listing order."""
        i = self.index[s]
        return [self.states[j] for j in np.nonzero(self._leq[i])[0] if j != i]

    def height(self) -> int:
        """Length of the longest strict chain minus one (max changes per node)."""
        if self._height is None:
            best = {}
            # longest chain ending at each state; process by number of predecessors
            order = sorted(range(len(self.states)), key=lambda j: int(self._leq[:, j].sum()))
            for j in order:
                preds = [i for i in np.nonzero(self._leq[:, j])[0] if i != j]
                best[j] = 1 + max((best[i] for i in preds), default=-1) if preds else 0
            self._height = max(best.values())
        return self._height

    def chains(self, first=None, last=None) -> Iterator[tuple]:
        """Strictly increasing state sequences, optionally pinned at either end."""
        starts = [first] if first is not None else list(self.states)
        for s in starts:
            yield from self._chains_from((s,), last)

    def _chains_from(self, prefix, last):
        cur = prefix[-1]
        if last is None or cur == last:
            yield prefix
        if last is not None and not self.leq(cur, last):
            return
        for nxt in self.above(cur):
            if last is not None and not self.leq(nxt, last):
                continue
            yield from self._chains_from(prefix + (nxt,), last)

    def sample(self, rng: random.Random):
        return rng.choice(self.states)


class LazyAlphabet:
    """Alphabet described by predicates, for state spaces too large to list.

    Used by the hardness gadgets whose states are tuples of components.
    """

    enumerable = False

    def __init__(self, leq: Callable, contains: Callable, sampler: Callable,
                 height: int, size=None, name="lazy"):
        self._leq_fn = leq
        self._contains = contains
        self._sampler = sampler
        self._h = height
        self.size = size
        self.name = name

    def __contains__(self, s):
        return self._contains(s)

    def __len__(self):
        if self.size is None or self.size > sys_maxsize():
            raise TypeError("alphabet size is not a small integer")
        return self.size

    def __repr__(self):
        return f"LazyAlphabet({self.name})"

    def leq(self, a, b) -> bool:
        return self._leq_fn(a, b)

    def lt(self, a, b) -> bool:
        return a != b and self._leq_fn(a, b)

    def height(self) -> int:
        return self._h

    def sample(self, rng):
        return self._sampler(rng)

    @property
    def states(self):
        raise TypeError(f"{self.name} alphabet cannot be enumerated")


def sys_maxsize():
    import sys
    return sys.maxsize


# ---------------------------------------------------------------- graphs

class Graph:
    """Undirected simple graph on vertices 0..n-1 with sorted adjacency."""

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if n < 1:
            raise NetworkError("graph needs at least one vertex")
        es = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise NetworkError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise NetworkError(f"edge ({u}, {v}) out of range for n={n}")
            es.add((min(u, v), max(u, v)))
        self.n = n
        self.edges = tuple(sorted(es))
        adj = [[] for _ in range(n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        self.adj = tuple(tuple(sorted(a)) for a in adj)
        self.closed = tuple(tuple(sorted(a + (v,))) for v, a in enumerate(self.adj))
        self.max_degree = max((len(a) for a in self.adj), default=0)

    def __repr__(self):
        return f"Graph(n={self.n}, edges={list(self.edges)})"

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def vertices(self):
        return range(self.n)

    def degree(self, v):
        return len(self.adj[v])

    def has_edge(self, u, v):
        return v in self.adj[u]

    def closed_of(self, vs) -> tuple:
        """Closed neighbourhood N[U] of a vertex set, sorted."""
        out = set()
        for v in vs:
            out.update(self.closed[v])
        return tuple(sorted(out))

    def components(self):
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            comp, queue = [], deque([s])
            seen[s] = True
            while queue:
                u = queue.popleft()
                comp.append(u)
                for w in self.adj[u]:
                    if not seen[w]:
                        seen[w] = True
                        queue.append(w)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def to_networkx(self):
        import networkx as nx
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g


def path_graph(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    if n < 3:
        raise NetworkError("a cycle needs at least three vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n):
    return Graph(n, itertools.combinations(range(n), 2))


def star_graph(leaves):
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def grid_graph(rows, cols):
    """rows x cols grid, vertex (i, j) labelled i*cols + j."""
    edges = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                edges.append((v, v + 1))
            if i + 1 < rows:
                edges.append((v, v + cols))
    return Graph(rows * cols, edges)


# ---------------------------------------------------------------- networks

class Network:
    """A (possibly non-deterministic) automata network over a graph.

    Local rules are given either as explicit tables
    ``tables[v][inputs] -> frozenset`` with `inputs` aligned with
    ``graph.closed[v]``, or as a callable ``rule(v, inputs) -> iterable``.
    """

    def __init__(self, graph: Graph, alphabet, tables=None, rule=None,
                 deterministic=None, set_rule=None, name=None):
        if (tables is None) == (rule is None):
            raise NetworkError("give exactly one of tables or rule")
        self.graph = graph
        self.alphabet = alphabet
        self.set_rule = set_rule
        self.name = name
        self.generator = None  # parameters that rebuild a gadget network
        if tables is not None:
            if len(tables) != graph.n:
                raise NetworkError(f"expected {graph.n} rule tables, got {len(tables)}")
            self.tables = [{tuple(k): frozenset(v) for k, v in t.items()} for t in tables]
            self._rule = None
            if deterministic is None:
                deterministic = all(len(out) == 1 for t in self.tables for out in t.values())
        else:
            self.tables = None
            self._rule = rule
            if deterministic is None:
                raise NetworkError("callable rules must declare whether they are deterministic")
        self.deterministic = bool(deterministic)

    def __repr__(self):
        kind = "det" if self.deterministic else "nondet"
        return f"Network({self.name or 'unnamed'}, n={self.graph.n}, {kind})"

    @property
    def n(self):
        return self.graph.n

    def image(self, v: int, inputs: tuple) -> frozenset:
        """F_v applied to an assignment of N[v] (aligned with graph.closed[v])."""
        if self.tables is not None:
            return self.tables[v][inputs]
        return frozenset(self._rule(v, inputs))

    def local_inputs(self, v, c) -> tuple:
        return tuple(c[u] for u in self.graph.closed[v])

    def table(self, v) -> dict:
        """Explicit table of node v (materialised for callable rules if enumerable)."""
        if self.tables is not None:
            return self.tables[v]
        if not self.alphabet.enumerable:
            raise TypeError("cannot materialise a table over a lazy alphabet")
        k = len(self.graph.closed[v])
        return {x: self.image(v, x) for x in itertools.product(self.alphabet.states, repeat=k)}


@dataclass
class Violation:
    kind: str
    node: int | None = None
    inputs: tuple | None = None
    detail: str = ""

    def __str__(self):
        where = "" if self.node is None else f" at node {self.node}"
        inp = "" if self.inputs is None else f" input {self.inputs!r}"
        return f"{self.kind}{where}{inp}: {self.detail}".rstrip(": ")


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    sampled_nodes: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok

    def kinds(self):
        return sorted({v.kind for v in self.violations})


def validate_network(net: Network, exhaustive_cap=200_000, samples=3000, seed=0,
                     max_reports=50) -> ValidationReport:
    """List every violation of the freezing-network invariants.

    Tables are checked row by row. Callable rules over small enumerable
    alphabets are checked exhaustively; otherwise a seeded random sample of
    inputs is checked and the node is listed in ``sampled_nodes``.
    """
    rep = ValidationReport()
    g, alpha = net.graph, net.alphabet
    if not g.is_connected():
        rep.violations.append(Violation("disconnected", detail=f"components {g.components()}"))
    rng = random.Random(seed)

    def check_row(v, x, out):
        if not out:
            rep.violations.append(Violation("empty-image", v, x))
            return
        me = x[g.closed[v].index(v)]
        for q in sorted(out, key=repr):
            if q not in alpha:
                rep.violations.append(Violation("unknown-state", v, x, f"successor {q!r}"))
            elif not alpha.leq(me, q):
                rep.violations.append(Violation("not-freezing", v, x, f"successor {q!r} not above {me!r}"))

    for v in g.vertices():
        k = len(g.closed[v])
        if net.tables is not None:
            table = net.tables[v]
            if alpha.enumerable:
                for x in itertools.product(alpha.states, repeat=k):
                    if x not in table:
                        rep.violations.append(Violation("incomplete", v, x, "missing row"))
            for x, out in table.items():
                if len(x) != k or any(s not in alpha for s in x):
                    rep.violations.append(Violation("unknown-state", v, x, "row uses unknown input"))
                    continue
                check_row(v, x, out)
        else:
            total = len(alpha) ** k if alpha.enumerable else math.inf
            if total <= exhaustive_cap:
                rows = itertools.product(alpha.states, repeat=k)
            else:
                rep.sampled_nodes.append(v)
                rows = (tuple(alpha.sample(rng) for _ in range(k)) for _ in range(samples))
            for x in rows:
                check_row(v, x, net.image(v, x))
        if len(rep.violations) > max_reports:
            break
    return rep


def check_configuration(net: Network, c) -> tuple:
    c = tuple(c)
    if len(c) != net.n:
        raise NetworkError(f"configuration has length {len(c)}, expected {net.n}")
    for v, s in enumerate(c):
        if s not in net.alphabet:
            raise NetworkError(f"state {s!r} at node {v} is not in the alphabet")
    return c


def step_deterministic(net: Network, c) -> tuple:
    if not net.deterministic:
        raise NetworkError("step_deterministic needs a deterministic network")
    out = []
    for v in range(net.n):
        (q,) = net.image(v, net.local_inputs(v, c))
        out.append(q)
    return tuple(out)


def successors(net: Network, c, cap=DEFAULT_SUCCESSOR_CAP) -> set:
    """All configurations reachable in one step (product of local images)."""
    images = [sorted(net.image(v, net.local_inputs(v, c)), key=repr) for v in range(net.n)]
    size = math.prod(len(i) for i in images)
    if size > cap:
        raise ResourceLimitError(f"{size} successors exceed the cap {cap}")
    return set(itertools.product(*images))


def async_lift(net: Network) -> Network:
    """F*: every node may apply its rule or keep its state."""
    if not net.deterministic:
        raise NetworkError("async_lift needs a deterministic network")
    g = net.graph
    name = f"async({net.name})" if net.name else "async"
    if net.tables is not None:
        tables = []
        for v in g.vertices():
            pos = g.closed[v].index(v)
            tables.append({x: out | {x[pos]} for x, out in net.tables[v].items()})
        return Network(g, net.alphabet, tables=tables, name=name)
    positions = [g.closed[v].index(v) for v in g.vertices()]

    def rule(v, x):
        return net.image(v, x) | {x[positions[v]]}

    any_change = net.alphabet.height() > 0
    return Network(g, net.alphabet, rule=rule, deterministic=not any_change, name=name)


def expand_set_rule(rho, g: Graph, alphabet, materialize=None, name=None, samples=3000) -> Network:
    """Network whose node v applies rho(own state, set of states on N[v]).

    `rho` is a mapping {(state, frozenset): state} or a callable. Over small
    enumerable alphabets the tables are materialised and checked exhaustively;
    otherwise the network evaluates rho lazily and is checked on samples.
    """
    fn = rho if callable(rho) else (lambda s, seen: rho[(s, frozenset(seen))])
    positions = [g.closed[v].index(v) for v in g.vertices()]
    if materialize is None:
        materialize = alphabet.enumerable and all(
            len(alphabet) ** len(g.closed[v]) <= 200_000 for v in g.vertices())
    if materialize:
        tables = []
        for v in g.vertices():
            k, pos = len(g.closed[v]), positions[v]
            t = {}
            for x in itertools.product(alphabet.states, repeat=k):
                try:
                    t[x] = frozenset([fn(x[pos], frozenset(x))])
                except KeyError as exc:
                    raise NetworkError(f"set rule undefined on ({x[pos]!r}, {set(x)!r})") from exc
            tables.append(t)
        net = Network(g, alphabet, tables=tables, set_rule=rho, name=name)
    else:
        def rule(v, x):
            return (fn(x[positions[v]], frozenset(x)),)
        net = Network(g, alphabet, rule=rule, deterministic=True, set_rule=rho, name=name)
    rep = validate_network(net, samples=samples)
    bad = [v for v in rep.violations if v.kind in ("not-freezing", "unknown-state", "empty-image")]
    if bad:
        raise NetworkError(f"set rule expansion is not freezing: {bad[0]}")
    return net


# ---------------------------------------------------------------- orbits

@dataclass(frozen=True)
class Orbit:
    configs: tuple

    @property
    def t(self):
        return len(self.configs) - 1

    def node_trace(self, v):
        return tuple(c[v] for c in self.configs)

    def __len__(self):
        return len(self.configs)

    def __getitem__(self, s):
        return self.configs[s]


def orbit(net: Network, c, t: int) -> Orbit:
    """The unique orbit x_0..x_t of a deterministic network."""
    if t < 0:
        raise ValueError("horizon must be non-negative")
    c = tuple(c)
    configs = [c]
    for _ in range(t):
        c = step_deterministic(net, c)
        configs.append(c)
    return Orbit(tuple(configs))


def is_orbit(net: Network, orb, cap=DEFAULT_SUCCESSOR_CAP) -> bool:
    """True iff every step of `orb` is a valid non-deterministic step.

    Checked node by node, which is equivalent to membership in `successors`.
    """
    configs = orb.configs if isinstance(orb, Orbit) else tuple(orb)
    for a, b in zip(configs, configs[1:]):
        for v in range(net.n):
            if b[v] not in net.image(v, net.local_inputs(v, a)):
                return False
    return True


def is_monotone_orbit(alphabet, orb) -> bool:
    configs = orb.configs if isinstance(orb, Orbit) else tuple(orb)
    return all(alphabet.leq(a[v], b[v]) for a, b in zip(configs, configs[1:]) for v in range(len(a)))


def max_orbit_length(u_count: int, q_count: int, n: int) -> int:
    """Horizon beyond which restricted orbit sets are fixed: |U|·|Q|·(|Q|·n+1)."""
    if min(u_count, q_count, n) < 1:
        raise ValueError("all arguments must be at least 1")
    return u_count * q_count * (q_count * n + 1)


# ---------------------------------------------------------------- standard rules

def boolean_alphabet():
    return Alphabet([0, 1], [(0, 1)])


def table_network(g: Graph, alphabet: Alphabet, fn: Callable, name=None) -> Network:
    """Deterministic table network from fn(v, own_state, inputs_dict) -> state."""
    tables = []
    for v in g.vertices():
        nb = g.closed[v]
        t = {}
        for x in itertools.product(alphabet.states, repeat=len(nb)):
            vals = dict(zip(nb, x))
            t[x] = frozenset([fn(v, vals[v], vals)])
        tables.append(t)
    return Network(g, alphabet, tables=tables, name=name)


def or_network(g: Graph) -> Network:
    return table_network(g, boolean_alphabet(), lambda v, me, xs: int(any(xs.values())), "or")


def and_network(g: Graph) -> Network:
    """Freezing AND: a 0 becomes 1 once every closed neighbour other than itself is 1."""
    def f(v, me, xs):
        others = [s for u, s in xs.items() if u != v]
        return 1 if me == 1 or (others and all(others)) else 0
    return table_network(g, boolean_alphabet(), f, "and")


def identity_network(g: Graph, alphabet: Alphabet | None = None) -> Network:
    return table_network(g, alphabet or boolean_alphabet(), lambda v, me, xs: me, "identity")


def threshold_network(g: Graph, theta: int = 2) -> Network:
    """Bootstrap percolation: a 0 becomes 1 with at least theta neighbours at 1."""
    def f(v, me, xs):
        return 1 if me == 1 or sum(s for u, s in xs.items() if u != v) >= theta else 0
    return table_network(g, boolean_alphabet(), f, f"threshold{theta}")


def constant_network(g: Graph, alphabet: Alphabet | None = None, target=1) -> Network:
    return table_network(g, alphabet or boolean_alphabet(), lambda v, me, xs: target, "constant")
