"""Seeded random instances for cross-checks, tests and the CLI."""
from __future__ import annotations

import itertools
import random

from .core import Alphabet, Graph, Network, successors
from .traces import Endpoints, RleTrace, Specification, TraceSet, monotone_traces
from .treedecomp import heuristic_decomposition


def random_alphabet(rng: random.Random, size: int) -> Alphabet:
    states = list(range(size))
    shape = rng.choice(["chain", "chain", "fork", "partial"])
    if size == 1:
        return Alphabet(states)
    if shape == "chain":
        order = [(i, i + 1) for i in range(size - 1)]
    elif shape == "fork":
        order = [(0, j) for j in range(1, size)]
    else:
        order = [(i, j) for i in range(size) for j in range(i + 1, size) if rng.random() < 0.5]
    return Alphabet(states, order)


def random_graph(rng: random.Random, n: int, max_degree=3, max_width=2, tries=200) -> Graph:
    """Connected graph with bounded degree whose min-fill width stays within max_width."""
    for _ in range(tries):
        edges = set()
        nodes = list(range(n))
        rng.shuffle(nodes)
        deg = [0] * n
        for i in range(1, n):
            cands = [u for u in nodes[:i] if deg[u] < max_degree]
            if not cands:
                break
            u = rng.choice(cands)
            v = nodes[i]
            edges.add((min(u, v), max(u, v)))
            deg[u] += 1
            deg[v] += 1
        else:
            extra = rng.randint(0, n)
            for _ in range(extra):
                u, v = rng.sample(range(n), 2) if n > 1 else (0, 0)
                if u != v and deg[u] < max_degree and deg[v] < max_degree and (min(u, v), max(u, v)) not in edges:
                    edges.add((min(u, v), max(u, v)))
                    deg[u] += 1
                    deg[v] += 1
            g = Graph(n, edges)
            if heuristic_decomposition(g).width <= max_width:
                return g
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def random_rule_tables(rng: random.Random, g: Graph, alpha: Alphabet, deterministic=False,
                       p_single=0.6):
    tables = []
    for v in g.vertices():
        pos = g.closed[v].index(v)
        t = {}
        for x in itertools.product(alpha.states, repeat=len(g.closed[v])):
            up = [q for q in alpha.states if alpha.leq(x[pos], q)]
            if deterministic or rng.random() < p_single:
                # favour staying so dynamics are not trivially saturating
                out = {x[pos]} if rng.random() < 0.4 else {rng.choice(up)}
            else:
                out = set(rng.sample(up, rng.randint(1, len(up))))
            t[x] = frozenset(out)
        tables.append(t)
    return tables


def random_network(rng: random.Random, n: int, q: int, deterministic=False, max_degree=3,
                   max_width=2) -> Network:
    g = random_graph(rng, n, max_degree, max_width)
    alpha = random_alphabet(rng, q)
    return Network(g, alpha, tables=random_rule_tables(rng, g, alpha, deterministic),
                   name=f"random(n={n},q={q})")


def random_orbit(rng: random.Random, net: Network, t: int):
    c = tuple(rng.choice(net.alphabet.states) for _ in range(net.n))
    configs = [c]
    for _ in range(t):
        c = rng.choice(sorted(successors(net, c), key=repr))
        configs.append(c)
    return configs


def random_spec(rng: random.Random, net: Network, t: int, density=0.7) -> Specification:
    """Mix of trace sets (often seeded from a real orbit), endpoint pins and free nodes."""
    orb = random_orbit(rng, net, t)
    all_traces = None
    cons = {}
    for v in net.graph.vertices():
        r = rng.random()
        if r > density:
            continue
        kind = rng.random()
        if kind < 0.35:
            if all_traces is None:
                all_traces = list(monotone_traces(net.alphabet, t))
            picks = {RleTrace.from_steps(s, t) for s in rng.sample(all_traces, min(len(all_traces), rng.randint(1, 4)))}
            if rng.random() < 0.3:
                picks.add(RleTrace.from_sequence([c[v] for c in orb]))
            cons[v] = TraceSet(picks)
        elif kind < 0.8:
            first = rng.choice(net.alphabet.states) if rng.random() < 0.6 else None
            last = rng.choice(net.alphabet.states) if rng.random() < 0.6 else None
            cons[v] = Endpoints(first, last)
        else:
            cons[v] = Endpoints(orb[0][v] if rng.random() < 0.5 else None, orb[-1][v])
    return Specification(t, cons)


def random_instance(seed: int, max_n=7, max_q=3, max_t=8, deterministic=None):
    rng = random.Random(seed)
    n = rng.randint(min(2, max_n), max_n)
    q = rng.randint(min(2, max_q), max_q)
    t = rng.randint(1, max_t)
    det = rng.random() < 0.3 if deterministic is None else deterministic
    net = random_network(rng, n, q, deterministic=det)
    spec = random_spec(rng, net, t)
    return net, spec, t
