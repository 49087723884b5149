"""Brute-force reference answers. Slow on purpose and kept obviously correct."""
from __future__ import annotations

import itertools
import time
from collections import deque
from dataclasses import dataclass

from .core import Graph, Network, NetworkError, ResourceLimitError, async_lift, step_deterministic, successors
from .traces import RleTrace, Specification


@dataclass
class OracleBudget:
    max_configs: int = 2_000_000
    max_nodes: int = 5_000_000
    timeout: float = 120.0

    def __post_init__(self):
        if self.max_configs <= 0 or self.max_nodes <= 0 or self.timeout <= 0:
            raise ValueError("budgets must be positive")


class _Meter:
    def __init__(self, budget: OracleBudget):
        self.budget = budget
        self.nodes = 0
        self.start = time.monotonic()

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise ResourceLimitError(f"oracle explored more than {self.budget.max_nodes} nodes")
        if self.nodes % 4096 == 0 and time.monotonic() - self.start > self.budget.timeout:
            raise ResourceLimitError(f"oracle exceeded {self.budget.timeout}s")


def _all_configs(net: Network, budget: OracleBudget):
    states = net.alphabet.states
    total = len(states) ** net.n
    if total > budget.max_configs:
        raise ResourceLimitError(f"{total} configurations exceed the oracle budget {budget.max_configs}")
    return itertools.product(states, repeat=net.n)


def _dense_sequences(alphabet, t):
    """All non-decreasing sequences of length t+1 over the alphabet."""
    out = []

    def grow(seq):
        if len(seq) == t + 1:
            out.append(tuple(seq))
            return
        for q in alphabet.states:
            if alphabet.leq(seq[-1], q) and (q == seq[-1] or q not in seq):
                grow(seq + [q])

    for s in alphabet.states:
        grow([s])
    return out


def brute_check_spec(net: Network, spec: Specification, t: int | None = None,
                     budget: OracleBudget | None = None) -> bool:
    """Depth-first search over all orbits, tracking which admissible traces survive."""
    budget = budget or OracleBudget()
    t = spec.t if t is None else t
    meter = _Meter(budget)
    constrained = sorted(spec.constraints)
    allowed = {}
    if constrained:
        dense = _dense_sequences(net.alphabet, t)
        for v in constrained:
            allowed[v] = frozenset(s for s in dense if spec.admits(v, RleTrace.from_sequence(s)))
            if not allowed[v]:
                return False
    seen = set()

    def survive(live, c, s):
        out = []
        for v, seqs in zip(constrained, live):
            keep = frozenset(q for q in seqs if q[s] == c[v])
            if not keep:
                return None
            out.append(keep)
        return tuple(out)

    def dfs(s, c, live):
        meter.tick()
        if s == t:
            return True
        key = (s, c, live)
        if key in seen:
            return False
        seen.add(key)
        for nxt in sorted(successors(net, c), key=repr):
            nl = survive(live, nxt, s + 1)
            if nl is not None and dfs(s + 1, nxt, nl):
                return True
        return False

    start = tuple(allowed[v] for v in constrained)
    for c in _all_configs(net, budget):
        live = survive(start, c, 0)
        if live is not None and dfs(0, c, live):
            return True
    return False


def brute_orbits(net: Network, t: int, budget: OracleBudget | None = None):
    """Every orbit of horizon t, as tuples of configurations (small instances only)."""
    budget = budget or OracleBudget()
    meter = _Meter(budget)
    layer = [(c,) for c in _all_configs(net, budget)]
    for _ in range(t):
        nxt = []
        for orb in layer:
            for c in sorted(successors(net, orb[-1]), key=repr):
                meter.tick()
                nxt.append(orb + (c,))
        layer = nxt
    return layer


def brute_restricted_orbits(net: Network, U, t: int, budget: OracleBudget | None = None) -> set:
    """The set of orbits of horizon t projected onto the node list U.

    Forward dynamic programming over (configuration, projected history) pairs.
    """
    budget = budget or OracleBudget()
    meter = _Meter(budget)
    U = tuple(U)
    frontier = {(c, (tuple(c[u] for u in U),)) for c in _all_configs(net, budget)}
    for _ in range(t):
        nxt = set()
        for c, hist in frontier:
            for d in successors(net, c):
                meter.tick()
                nxt.add((d, hist + (tuple(d[u] for u in U),)))
        frontier = nxt
    return {hist for _, hist in frontier}


def _fixed_point(net, c):
    while True:
        d = step_deterministic(net, c)
        if d == c:
            return c
        c = d


def brute_nilpotency(net: Network, budget: OracleBudget | None = None) -> bool:
    """True iff every configuration converges to one common fixed point."""
    if not net.deterministic:
        raise NetworkError("nilpotency is defined for deterministic networks")
    budget = budget or OracleBudget()
    meter = _Meter(budget)
    target = None
    for c in _all_configs(net, budget):
        meter.tick()
        f = _fixed_point(net, c)
        if target is None:
            target = f
        elif f != target:
            return False
    return True


def brute_predecessor(net: Network, c, t: int, budget: OracleBudget | None = None):
    """First y (alphabet-index lexicographic order) with F^t(y) = c, or None."""
    if not net.deterministic:
        raise NetworkError("predecessor is defined for deterministic networks")
    budget = budget or OracleBudget()
    meter = _Meter(budget)
    c = tuple(c)
    for y in _all_configs(net, budget):
        meter.tick()
        x = y
        for _ in range(t):
            x = step_deterministic(net, x)
        if x == c:
            return y
    return None


def brute_async_reach(net: Network, c0, c1, budget: OracleBudget | None = None) -> bool:
    """Breadth-first search over the asynchronous successor relation."""
    budget = budget or OracleBudget()
    meter = _Meter(budget)
    lifted = async_lift(net) if net.deterministic else net
    c0, c1 = tuple(c0), tuple(c1)
    seen = {c0}
    queue = deque([c0])
    while queue:
        c = queue.popleft()
        if c == c1:
            return True
        for d in successors(lifted, c):
            meter.tick()
            if d not in seen:
                if len(seen) >= budget.max_configs:
                    raise ResourceLimitError("reachable set exceeds the oracle budget")
                seen.add(d)
                queue.append(d)
    return False


def brute_prediction(net: Network, c, v: int, spec_v, t: int) -> bool:
    """Simulate and test the trace of v against a constraint."""
    x = tuple(c)
    seq = [x[v]]
    for _ in range(t):
        x = step_deterministic(net, x)
        seq.append(x[v])
    return spec_v.admits(RleTrace.from_sequence(seq))


def brute_dominating_set(g: Graph, k: int, budget: OracleBudget | None = None) -> bool:
    budget = budget or OracleBudget()
    meter = _Meter(budget)
    if k >= g.n:
        return True
    for sub in itertools.combinations(range(g.n), k):
        meter.tick()
        covered = set()
        for v in sub:
            covered.update(g.closed[v])
        if len(covered) == g.n:
            return True
    return False
