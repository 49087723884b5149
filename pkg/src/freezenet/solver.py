"""Dynamic programming over a tree decomposition deciding specification checking.

Each bag w works on the traces of a scope Y_w containing N[C_w], where C_w are
the nodes of X_w checked at w. An assignment of Y_w is accepted when it is
locally valid at every node of C_w and, for every child c, its restriction to
Y_w ∩ Y_c is accepted by c. Tables keep only the restriction
to the separator shared with the parent (plus one representative full
assignment), which is all the parent can observe.
"""
from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .core import Network, NetworkError, Orbit, ResourceLimitError, is_orbit, is_monotone_orbit
from .traces import RleTrace, Specification, monotone_traces, steps_at
from .treedecomp import (DecompositionError, TreeDecomposition, default_decomposition, levels,
                         validate_decomposition)
from .validity import center_steps_valid

DEFAULT_BAG_CAP = 10**6


class WitnessError(RuntimeError):
    """Gluing or replay of a witness failed; indicates an engine bug."""


@dataclass
class DpTable:
    bag: int
    separator: tuple  # nodes shared with the parent, sorted
    scope: tuple  # Y_w, sorted
    entries: dict = field(default_factory=dict)  # separator key -> (full scope tuple, {child: key})

    def __len__(self):
        return len(self.entries)

    def keys(self):
        return self.entries.keys()


@dataclass
class Verdict:
    satisfiable: bool
    witness: Orbit | None = None
    stats: dict = field(default_factory=dict)

    def __bool__(self):
        return self.satisfiable

    def witness_rle(self):
        if self.witness is None:
            return None
        out = {}
        for v in range(len(self.witness.configs[0])):
            tr = RleTrace.from_sequence(self.witness.node_trace(v))
            out[str(v)] = [[s, k] for s, k in tr.runs]
        return out

    def to_json(self, include_timing=True):
        stats = dict(self.stats)
        if not include_timing:
            stats.pop("level_seconds", None)
            stats.pop("seconds", None)
        return {"satisfiable": self.satisfiable, "witness": self.witness_rle(), "stats": stats}

    def dumps(self, include_timing=False):
        return json.dumps(self.to_json(include_timing), sort_keys=True, default=_jsonable)


def _jsonable(x):
    if isinstance(x, (set, frozenset, tuple)):
        return list(x)
    return str(x)


class BagEngine:
    """Shared per-instance caches: node domains, centre generation and checks."""

    def __init__(self, net: Network, spec: Specification, t: int, cap=DEFAULT_BAG_CAP,
                 window=None, work_cap=None):
        if not getattr(net.alphabet, "enumerable", True):
            raise NetworkError("the solver needs an enumerable alphabet")
        self.net, self.spec, self.t = net, spec, t
        self.cap = cap
        self.work_cap = work_cap
        self.window = window
        self.g = net.graph
        self.pos = [self.g.closed[v].index(v) for v in self.g.vertices()]
        self._domain = {}
        self._gen = {}
        self._check = {}

    # ---- per-node candidate traces

    def domain(self, v):
        d = self._domain.get(v)
        if d is None:
            con = self.spec.constraint(v)
            explicit = con.explicit() if con is not None else None
            if explicit is not None:
                d = sorted((tr.steps() for tr in explicit if self._in_window(tr.steps())), key=repr)
            else:
                firsts = con.first_states() if con is not None else None
                starts = [s for s in self.net.alphabet.states if firsts is None or s in firsts]
                d = [st for s in starts
                     for st in monotone_traces(self.net.alphabet, self.t, first=s,
                                               max_change_time=self.window)
                     if self.spec.admits_steps(v, st)]
            self._domain[v] = d
        return d

    def _in_window(self, steps):
        return self.window is None or steps[-1][0] <= self.window

    # ---- centre generation: every valid own trace given the neighbours' traces

    def generate(self, v, others):
        key = (v, others)
        hit = self._gen.get(key)
        if hit is not None:
            return hit
        net, t, window = self.net, self.t, self.window
        pos = self.pos[v]
        nb = list(others[:pos]) + [None] + list(others[pos:])
        events = sorted({c for i, st in enumerate(nb) if i != pos for c, _ in st} | {0})
        con = self.spec.constraint(v)
        firsts = con.first_states() if con is not None else None
        starts = [s for s in net.alphabet.states if firsts is None or s in firsts]
        out = []

        def inputs_at(a, cur):
            x = []
            for i, st in enumerate(nb):
                x.append(cur if i == pos else steps_at(st, a))
            return tuple(x)

        def next_event(a):
            for e in events:
                if e > a:
                    return e
            return t + 1

        def dfs(a, cur, steps):
            image = net.image(v, inputs_at(a, cur))
            b = next_event(a)
            stay_ok = cur in image
            last_c = min(b, t) if window is None else min(b, t, window)
            for c in range(a + 1, last_c + 1):
                if c - a >= 2 and not stay_ok:
                    break
                for q in image:
                    if q != cur:
                        dfs(c, q, steps + ((c, q),))
            if b == t + 1:
                if b - a < 2 or stay_ok:
                    if self.spec.admits_steps(v, steps):
                        out.append(steps)
            elif stay_ok:
                dfs(b, cur, steps)

        for s in starts:
            dfs(0, s, ((0, s),))
        out = sorted(set(out), key=repr)
        self._gen[key] = out
        return out

    def center_ok(self, v, local):
        key = (v, local)
        hit = self._check.get(key)
        if hit is None:
            hit = center_steps_valid(self.net, v, local, self.t)
            self._check[key] = hit
        return hit

    # ---- the search over one scope

    def plan(self, centers, scope, key_nodes, children):
        """Static step list. children: list of (child id, separator tuple, table keys)."""
        g = self.g
        centers = set(centers)
        assigned = set()
        done_centers, done_children = set(), set()
        steps = []
        phase_a = None
        for target in (set(key_nodes), set(scope)):
            while not target <= assigned:
                remaining = target - assigned
                step = None
                gens = [v for v in sorted(centers - assigned)
                        if v in remaining and set(g.adj[v]) <= assigned]
                if gens:
                    v = gens[0]
                    step = ("gen", v, (v,))
                else:
                    best = None
                    for cid, sep, keys in children:
                        if cid in done_children:
                            continue
                        new = [u for u in sep if u not in assigned]
                        if not new or not (set(new) & remaining):
                            continue
                        score = (-sum(1 for u in sep if u in assigned), len(keys), cid)
                        if best is None or score < best[0]:
                            best = (score, cid, sep)
                    if best is not None:
                        _, cid, sep = best
                        step = ("join", cid, tuple(u for u in sep if u not in assigned))
                    else:
                        def enum_score(y):
                            # prefer the node that brings some centre closest to generation
                            gap = min((len(set(g.closed[v]) - assigned - {v})
                                       for v in centers - assigned - {y} if y in g.closed[v]),
                                      default=99)
                            return (gap, y in centers, len(self.domain(y)), y)
                        y = min(remaining, key=enum_score)
                        step = ("enum", y, (y,))
                assigned |= set(step[2])
                if step[0] == "gen":
                    done_centers.add(step[1])
                if step[0] == "join":
                    done_children.add(step[1])
                checks_c = [v for v in sorted(centers - done_centers) if set(g.closed[v]) <= assigned]
                done_centers |= set(checks_c)
                checks_j = [cid for cid, sep, _ in children
                            if cid not in done_children and set(sep) <= assigned]
                done_children |= set(checks_j)
                steps.append((step, tuple(checks_c), tuple(checks_j)))
            if phase_a is None:
                phase_a = len(steps)
        # centres whose neighbourhood leaves the scope cannot exist: scope = N[centres]
        return steps, phase_a

    def search(self, centers, scope, key_nodes, children, mode="table", label="bag"):
        """Run the scope search.

        mode "table": dict key -> (scope assignment tuple) with one witness per key.
        mode "all": list of every accepted scope assignment (key_nodes must equal scope).
        """
        scope = tuple(sorted(scope))
        key_nodes = tuple(sorted(key_nodes))
        child_info = [(cid, sep, table) for cid, sep, table in children]
        steps, phase_a = self.plan(centers, scope, key_nodes,
                                   [(cid, sep, table) for cid, sep, table in child_info])
        tables = {cid: (sep, table) for cid, sep, table in child_info}
        g = self.g
        # join indexes: for a join step, map the already-assigned separator part to completions
        indexes = {}
        assigned_before = set()
        for (kind, obj, news), _, _ in steps:
            if kind == "join":
                sep, table = tables[obj]
                fixed = tuple(i for i, u in enumerate(sep) if u in assigned_before)
                free = tuple(i for i, u in enumerate(sep) if u not in assigned_before)
                idx = {}
                for k in table:
                    idx.setdefault(tuple(k[i] for i in fixed), []).append(tuple(k[i] for i in free))
                indexes[obj] = (tuple(sep[i] for i in fixed), tuple(sep[i] for i in free), idx)
            assigned_before |= set(news)
        assign = {}
        results = {} if mode == "table" else []
        work = [0]
        work_cap = self.work_cap

        def checks_pass(cc, cj):
            for v in cc:
                if not self.center_ok(v, tuple(assign[u] for u in g.closed[v])):
                    return False
            for cid in cj:
                sep, table = tables[cid]
                if tuple(assign[u] for u in sep) not in table:
                    return False
            return True

        def options(i):
            (kind, obj, news), _, _ = steps[i]
            if kind == "enum":
                for s in self.domain(obj):
                    yield (s,)
            elif kind == "gen":
                others = tuple(assign[u] for u in g.closed[obj] if u != obj)
                for s in self.generate(obj, others):
                    yield (s,)
            else:
                fixed, free, idx = indexes[obj]
                yield from idx.get(tuple(assign[u] for u in fixed), ())

        found = [None]

        def descend(i, exhaustive):
            """Exhaustive below the key boundary, existential after it."""
            if exhaustive and i == phase_a and mode == "table":
                key = tuple(assign[u] for u in key_nodes)
                if key not in results and descend(i, False):
                    results[key] = found[0]
                    if len(results) > self.cap:
                        raise ResourceLimitError(f"{label}: more than {self.cap} table entries",
                                                 where=label)
                return False
            if i == len(steps):
                if mode == "all":
                    results.append(dict(assign))
                    if len(results) > self.cap:
                        raise ResourceLimitError(f"{label}: more than {self.cap} entries", where=label)
                    return False
                found[0] = tuple(assign[u] for u in scope)
                return True
            (kind, obj, news), cc, cj = steps[i]
            for vals in options(i):
                work[0] += 1
                if work_cap is not None and work[0] > work_cap:
                    raise ResourceLimitError(f"{label}: search exceeded {work_cap} steps", where=label)
                for u, s in zip(news, vals):
                    assign[u] = s
                ok = checks_pass(cc, cj) and descend(i + 1, exhaustive)
                for u in news:
                    del assign[u]
                if ok and not exhaustive:
                    return True
            return False

        descend(0, True)
        self.last_work = work[0]
        return results

    def enumerate_all(self, centers, scope, label="scope"):
        return self.search(centers, scope, scope, [], mode="all", label=label)


# ---------------------------------------------------------------- the tree program

def auto_window(net: Network):
    """Latest possible change time when the evolution is deterministic.

    A deterministic orbit that stops changing has reached a fixed point, so
    every change happens within the first n*height steps.
    """
    if net.deterministic:
        return max(1, net.n * net.alphabet.height())
    return None


def _bag_geometry(g, d: TreeDecomposition):
    """Centres, scopes and parent separators per bag.

    Every node v is checked once, at a home bag containing v (the one holding
    most of N[v]). A trace travels only along the subtree spanning the homes
    of the centres that read it, so scopes satisfy running intersection and
    gluing along tree edges stays consistent.
    """
    m = len(d.bags)
    home = {}
    for v in g.vertices():
        cands = [w for w in range(m) if v in d.bags[w]]
        home[v] = max(cands, key=lambda w: (len(d.bags[w] & set(g.closed[v])), -d.depth_of[w], -w))
    centers = [[] for _ in range(m)]
    for v, w in home.items():
        centers[w].append(v)
    scopes = [set() for _ in range(m)]
    order = list(reversed(d.bfs_order))  # children before parents
    for u in g.vertices():
        marks = {home[v] for v in g.closed[u]}
        count = [0] * m
        for w in order:
            count[w] += (w in marks) + sum(count[c] for c in d.children[w])
        total = len(marks)
        lca = max((w for w in range(m) if count[w] == total), key=lambda w: d.depth_of[w])
        for w in range(m):
            if 0 < count[w] < total or w == lca:
                scopes[w].add(u)
    scopes = [tuple(sorted(s)) for s in scopes]
    seps = []
    for w in range(m):
        p = d.parent[w]
        seps.append(() if p is None else tuple(sorted(set(scopes[w]) & set(scopes[p]))))
    return [tuple(sorted(c)) for c in centers], scopes, seps


def build_tables(engine: BagEngine, d: TreeDecomposition, jobs=1, stop_on_empty=True):
    """Leaves-to-root construction; returns (tables, per-level seconds)."""
    g = engine.g
    centers, scopes, seps = _bag_geometry(g, d)
    tables = {}
    timings = []

    def one(w):
        kids = [(c, seps[c], tables[c].entries) for c in d.children[w]]
        entries = engine.search(centers[w], scopes[w], seps[w], kids, mode="table", label=f"bag {w}")
        return DpTable(w, seps[w], scopes[w], entries)

    pool = ThreadPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        for level in levels(d):
            t0 = time.perf_counter()
            if pool is None:
                done = [one(w) for w in level]
            else:
                done = list(pool.map(one, level))
            # publish the whole level only once every table in it is finished
            for tab in done:
                tables[tab.bag] = tab
            timings.append(time.perf_counter() - t0)
            if stop_on_empty and any(len(tab) == 0 for tab in done):
                break
    finally:
        if pool is not None:
            pool.shutdown()
    return tables, timings


def extract_witness(tables, d: TreeDecomposition, net: Network, spec: Specification, t: int) -> Orbit:
    """Glue representative entries along the tree and replay the resulting orbit."""
    root = tables[d.root]
    if not root.entries:
        raise WitnessError("root table is empty")
    glued = {}

    def take(w, key):
        tab = tables[w]
        full = tab.entries[key]
        for u, s in zip(tab.scope, full):
            if u in glued and glued[u] != s:
                raise WitnessError(f"bags disagree on node {u} at bag {w}")
            glued[u] = s
        for c in d.children[w]:
            child_key = tuple(full[tab.scope.index(u)] for u in tables[c].separator)
            if child_key not in tables[c].entries:
                raise WitnessError(f"bag {c} lacks the entry its parent {w} relied on")
            take(c, child_key)

    take(d.root, next(iter(root.entries)))
    missing = [v for v in range(net.n) if v not in glued]
    if missing:
        raise WitnessError(f"nodes {missing} are not covered by any bag")
    configs = tuple(tuple(steps_at(glued[v], s) for v in range(net.n)) for s in range(t + 1))
    orb = Orbit(configs)
    if not is_orbit(net, orb):
        raise WitnessError("glued witness is not an orbit")
    if not is_monotone_orbit(net.alphabet, orb):
        raise WitnessError("glued witness is not monotone")
    for v in range(net.n):
        if not spec.admits(v, RleTrace.from_sequence(orb.node_trace(v))):
            raise WitnessError(f"witness violates the specification at node {v}")
    return orb


def default_jobs():
    return max(1, os.cpu_count() or 1)


def check_spec(net: Network, spec: Specification, t: int | None = None,
               decomposition: TreeDecomposition | None = None, jobs: int = 1,
               cap: int = DEFAULT_BAG_CAP, window="auto", work_cap=None,
               witness: bool = True) -> Verdict:
    """Decide whether some orbit of horizon t meets the specification at every node.

    ``window="auto"`` restricts change times to n*height for deterministic
    networks (sound, see ``auto_window``); pass an int to impose a window
    justified elsewhere, or None for no restriction.
    """
    t0 = time.perf_counter()
    t = spec.t if t is None else t
    if t != spec.t:
        raise ValueError(f"horizon {t} differs from the specification horizon {spec.t}")
    spec.check_nodes(net.n)
    g = net.graph
    if decomposition is None:
        decomposition = default_decomposition(g)
    ok = validate_decomposition(g, decomposition)
    if not isinstance(ok, int):
        raise DecompositionError("decomposition does not fit the network: " + "; ".join(ok))
    if window == "auto":
        window = auto_window(net)
    engine = BagEngine(net, spec, t, cap=cap, window=window, work_cap=work_cap)
    tables, timings = build_tables(engine, decomposition, jobs=jobs)
    complete = len(tables) == len(decomposition.bags)
    sat = complete and len(tables[decomposition.root]) > 0
    orb = extract_witness(tables, decomposition, net, spec, t) if sat and witness else None
    stats = {
        "bags": len(decomposition.bags),
        "width": decomposition.width,
        "depth": decomposition.depth,
        "levels_run": len(timings),
        "max_table": max((len(tab) for tab in tables.values()), default=0),
        "window": window,
        "t": t,
        "level_seconds": [round(x, 6) for x in timings],
        "seconds": round(time.perf_counter() - t0, 6),
    }
    return Verdict(sat, orb, stats)
