"""Grid network whose specification is satisfiable iff a graph has a dominating set of size k.

Rows 1..k select a vertex each by marking the same position in every bloc of
n columns; row k+1 marks, per bloc b, a vertex dominating b; row k+2 holds
the closed neighbourhoods of G. Errors are raised by local checks and by
signals, and the specification forbids any error.

Node state: (m, d, r0, l0, r1, l1, ds, err). m and d are fixed by the
initial configuration; the six flags only switch on.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from ..core import Alphabet, Graph, Network, orbit
from ..traces import RleTrace, Specification, StatePredicate
from .routing import GadgetError

M, D, R0, L0, R1, L1, DS, ERR = range(8)


@lru_cache(maxsize=None)
def marker_alphabet() -> Alphabet:
    states = [(m, d) + flags for m in (0, 1) for d in "><"
              for flags in itertools.product((0, 1), repeat=6)]
    order = []
    for a in states:
        for i in range(2, 8):
            if a[i] == 0:
                b = a[:i] + (1,) + a[i + 1:]
                order.append((a, b))
    return Alphabet(states, order)


def blank(m=0, d="<"):
    return (m, d, 0, 0, 0, 0, 0, 0)


@dataclass
class DominatingSetGadget:
    g: Graph
    k: int
    host: Graph
    net: Network
    spec: Specification
    t: int

    @property
    def n(self):
        return self.g.n

    @property
    def width(self):
        return self.g.n ** 2

    def node(self, row, col):
        return (row - 1) * self.width + col

    def configuration(self, marks) -> tuple:
        """Initial configuration from {row: set of columns} for rows 1..k+1.

        The d layer is derived from the marks: '>' before the first mark of
        each bloc and '<' from it on. Row k+2 is filled from G.
        """
        n, k, w = self.n, self.k, self.width
        cells = []
        for row in range(1, k + 3):
            for col in range(w):
                b, p = divmod(col, n)
                if row == k + 2:
                    cells.append(blank(int(p in self.g.closed[b])))
                    continue
                row_marks = marks.get(row, set())
                first = min((q for q in range(n) if b * n + q in row_marks), default=None)
                d = "<" if first is not None and p >= first else ">"
                cells.append(blank(int(col in row_marks), d))
        return tuple(cells)

    def selection_configuration(self, selection, certificate=None) -> tuple:
        """Rows select `selection`; the domination row uses the smallest certifying vertex per bloc."""
        n, k = self.n, self.k
        if len(selection) != k:
            raise GadgetError(f"need {k} selected vertices")
        marks = {j + 1: {b * n + s for b in range(n)} for j, s in enumerate(selection)}
        if certificate is None:
            certificate = []
            for b in range(n):
                good = [s for s in sorted(set(selection)) if s in self.g.closed[b]]
                certificate.append(good[0] if good else 0)
        marks[k + 1] = {b * n + p for b, p in enumerate(certificate)}
        return self.configuration(marks)

    def accepts(self, config) -> bool:
        """Simulate t steps and test the specification on every node."""
        orb = orbit(self.net, config, self.t)
        return all(self.spec.admits(v, RleTrace.from_sequence(orb.node_trace(v)))
                   for v in range(self.host.n))

    def satisfying_selection(self):
        for sel in itertools.combinations_with_replacement(range(self.n), self.k):
            if self.accepts(self.selection_configuration(sel)):
                return sel
        return None

    def satisfiable(self) -> bool:
        """Decided by enumerating the selections and simulating each canonical configuration."""
        return self.satisfying_selection() is not None


def _host(n, k):
    w = n * n
    edges = []
    for row in range(k + 2):
        for col in range(w):
            v = row * w + col
            if w > 1:
                edges.append((v, row * w + (col + 1) % w))
            if row + 1 < k + 2:
                edges.append((v, v + w))
    return Graph(w * (k + 2), edges)


def dominating_set_gadget(g: Graph, k: int) -> DominatingSetGadget:
    if k < 1:
        raise GadgetError("k must be at least 1")
    if not g.is_connected():
        raise GadgetError("graph must be connected")
    n = g.n
    w = n * n
    host = _host(n, k)
    alpha = marker_alphabet()
    closed = host.closed
    t = max(2 * n + 2, k + 3)

    def rule(v, x):
        st = dict(zip(closed[v], x))
        row, col = divmod(v, w)
        row += 1
        me = st[v]
        if row == k + 2:
            return (me,)
        b, p = divmod(col, n)
        left = st[(row - 1) * w + (col - 1) % w]
        right = st[(row - 1) * w + (col + 1) % w]
        m, d = me[M], me[D]
        out = list(me)
        err = False
        dl = left[D]
        if p > 0 and dl == "<" and d == ">":
            err = True
        if p == n - 1 and d != "<":
            err = True
        if m != int(d == "<" and (p == 0 or dl == ">")):
            err = True
        if row <= k and n >= 2:
            pr0 = lambda s: s[R0] and not s[M]
            pl0 = lambda s: s[L0] and not s[M]
            out[R0] = int(me[R0] or m or (left[R0] and not pl0(left) and not me[L0]))
            out[L0] = int(me[L0] or m or (right[L0] and not pr0(right) and not me[R0]))
            gen_r = left[R0] and me[L0] and not pr0(me)
            gen_l = right[L0] and me[R0] and not pl0(me)
            out[R1] = int(me[R1] or gen_r or (left[R1] and not left[L1] and not me[L1]))
            out[L1] = int(me[L1] or gen_l or (right[L1] and not right[R1] and not me[R1]))
            if me[R1] and me[L1] and not m:
                err = True
            if me[R1] and right[L1] and not me[L1] and not right[R1]:
                err = True
        if row == k + 1:
            out[DS] = int(me[DS] or m)
            if m and not st[v + w][M]:
                err = True
        else:
            up = st[v + w]
            out[DS] = int(me[DS] or (up[DS] and (row + 1 == k + 1 or not up[M])))
            if row == 1 and me[DS] and not m:
                err = True
        out[ERR] = int(me[ERR] or err)
        return (tuple(out),)

    net = Network(host, alpha, rule=rule, deterministic=True, name=f"dominating-set(n={n},k={k})")
    no_error = lambda s: s[ERR] == 0
    fresh = lambda s: s[2:] == (0,) * 6
    cons = {}
    for v in host.vertices():
        row, col = divmod(v, w)
        if row + 1 == k + 2:
            b, p = divmod(col, n)
            want = blank(int(p in g.closed[b]))
            cons[v] = StatePredicate(initial=lambda s, want=want: s == want, every=no_error,
                                     label="graph row")
        else:
            cons[v] = StatePredicate(initial=fresh, every=no_error, label="free marks")
    spec = Specification(t, cons, generator={"kind": "dominating-set", "k": k,
                                             "edges": [list(e) for e in g.edges]})
    return DominatingSetGadget(g, k, host, net, spec, t)
