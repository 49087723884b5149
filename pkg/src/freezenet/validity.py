"""Locally-valid and partially-valid traces.

Validity is evaluated on change times only: between two consecutive events
in the closed neighbourhood the rule inputs are constant, so one image per
stretch decides every step inside it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .traces import RleTrace, Specification, steps_at


@dataclass(frozen=True)
class LocalTrace:
    center: int
    alpha: Mapping  # node -> RleTrace over N[center]
    t: int


@dataclass(frozen=True)
class PartialTrace:
    nodes: tuple  # the centre set U
    beta: Mapping  # node -> RleTrace over N[U]
    t: int


def center_steps_valid(net, v, nb_steps, t) -> bool:
    """Rule check at centre v; nb_steps[i] is the steps trace of graph.closed[v][i]."""
    closed = net.graph.closed[v]
    pos = closed.index(v)
    events = sorted({c for st in nb_steps for c, _ in st})
    idx = [0] * len(nb_steps)
    own = nb_steps[pos]
    for e, a in enumerate(events):
        for i, st in enumerate(nb_steps):
            while idx[i] + 1 < len(st) and st[idx[i] + 1][0] <= a:
                idx[i] += 1
        x = tuple(st[idx[i]][1] for i, st in enumerate(nb_steps))
        b = events[e + 1] if e + 1 < len(events) else t + 1
        image = net.image(v, x)
        if b - a >= 2 and x[pos] not in image:
            return False
        if b <= t and steps_at(own, b) not in image:
            return False
    return True


def _well_formed(net, trace, t):
    return trace.t == t and trace.is_monotone(net.alphabet) and all(s in net.alphabet for s in trace.states())


def is_locally_valid(net, spec: Specification | None, lt: LocalTrace) -> bool:
    v = lt.center
    closed = net.graph.closed[v]
    if set(lt.alpha) != set(closed):
        return False
    if any(not _well_formed(net, lt.alpha[u], lt.t) for u in closed):
        return False
    if spec is not None and not spec.admits(v, lt.alpha[v]):
        return False
    return center_steps_valid(net, v, [lt.alpha[u].steps() for u in closed], lt.t)


def is_partially_valid(net, spec: Specification | None, pt: PartialTrace) -> bool:
    g = net.graph
    if set(pt.beta) != set(g.closed_of(pt.nodes)):
        return False
    for v in pt.nodes:
        lt = LocalTrace(v, {u: pt.beta[u] for u in g.closed[v]}, pt.t)
        if not is_locally_valid(net, spec, lt):
            return False
    return True


def enumerate_pvt(net, spec: Specification, U, t=None, cap=10**6, window=None):
    """Every partially-valid trace of U compatible with spec, sorted by canonical keys.

    Nodes of N[U] outside U are restricted to spec-admissible traces as well.
    """
    from .solver import BagEngine

    t = spec.t if t is None else t
    U = tuple(sorted(set(U)))
    if not U:
        yield PartialTrace((), {}, t)
        return
    engine = BagEngine(net, spec, t, cap=cap, window=window)
    scope = net.graph.closed_of(U)
    entries = engine.enumerate_all(U, scope, label=f"centres {list(U)}")
    out = []
    for assignment in entries:
        beta = {u: RleTrace.from_steps(assignment[u], t) for u in scope}
        out.append((tuple(beta[u].key() for u in scope), beta))
    out.sort(key=lambda kb: repr(kb[0]))
    for _, beta in out:
        yield PartialTrace(U, beta, t)
