"""Perfect brambles, digraph routing through them, and colourings of the square graph."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from ..core import Graph, grid_graph


class GadgetError(ValueError):
    pass


@dataclass(frozen=True)
class Bramble:
    elements: tuple

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(frozenset(e) for e in self.elements))

    def __len__(self):
        return len(self.elements)

    def to_json(self):
        return {"elements": [sorted(e) for e in self.elements]}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["elements"])


def _connected_inside(g: Graph, part) -> bool:
    part = set(part)
    if not part:
        return False
    start = min(part)
    seen = {start}
    q = deque([start])
    while q:
        a = q.popleft()
        for b in g.adj[a]:
            if b in part and b not in seen:
                seen.add(b)
                q.append(b)
    return seen == part


def validate_bramble(g: Graph, b: Bramble) -> list:
    """Violations of the perfect-bramble axioms; empty when valid."""
    out = []
    for i, e in enumerate(b.elements):
        bad = [v for v in e if not 0 <= v < g.n]
        if bad:
            out.append(f"element {i} has unknown vertices {sorted(bad)}")
        elif not _connected_inside(g, e):
            out.append(f"connectivity: element {i} does not induce a connected subgraph")
    for i in range(len(b)):
        for j in range(i + 1, len(b)):
            if not b.elements[i] & b.elements[j]:
                out.append(f"intersection: elements {i} and {j} are disjoint")
    count = {}
    for i, e in enumerate(b.elements):
        for v in e:
            count.setdefault(v, []).append(i)
    for v, es in sorted(count.items()):
        if len(es) > 2:
            out.append(f"multiplicity: vertex {v} lies in elements {es}")
    return out


def grid_bramble(m: int) -> Bramble:
    """Row i plus column i of the m x m grid (vertex (i, j) is i*m + j)."""
    if m < 2:
        raise GadgetError("grid brambles need m >= 2")
    return Bramble([{i * m + j for j in range(m)} | {j * m + i for j in range(m)} for i in range(m)])


def grid_host(m: int):
    return grid_graph(m, m), grid_bramble(m)


@dataclass(frozen=True)
class Digraph:
    n: int
    arcs: tuple

    def __post_init__(self):
        object.__setattr__(self, "arcs", tuple((int(a), int(b)) for a, b in self.arcs))
        for a, b in self.arcs:
            if not (0 <= a < self.n and 0 <= b < self.n) or a == b:
                raise GadgetError(f"bad arc ({a}, {b})")

    @property
    def max_degree(self) -> int:
        """Largest in-degree or out-degree."""
        ins, outs = [0] * self.n, [0] * self.n
        for a, b in self.arcs:
            outs[a] += 1
            ins[b] += 1
        return max(ins + outs, default=0)


@dataclass
class RoutedEmbedding:
    mu: dict
    paths: list  # per arc index, tuple of host vertices from mu(src) to mu(dst)
    arcs: tuple
    load: dict = field(default_factory=dict)  # host vertex -> number of paths through it
    slots: dict = field(default_factory=dict)  # (host vertex, arc index) -> slot number

    def preimages(self, v):
        return sorted(g for g, h in self.mu.items() if h == v)

    def max_load(self) -> int:
        return max(self.load.values(), default=0)

    def to_json(self):
        return {"mu": {str(k): v for k, v in sorted(self.mu.items())},
                "paths": [list(p) for p in self.paths],
                "arcs": [list(a) for a in self.arcs],
                "load": {str(k): v for k, v in sorted(self.load.items())}}


def _bfs_path(g: Graph, inside, s, t):
    """Shortest path inside a vertex set; neighbours explored in label order."""
    prev = {s: None}
    q = deque([s])
    while q:
        a = q.popleft()
        if a == t:
            break
        for b in g.adj[a]:
            if b in inside and b not in prev:
                prev[b] = a
                q.append(b)
    if t not in prev:
        raise GadgetError(f"no path from {s} to {t} inside the element")
    path = [t]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def _shortcut(path):
    """Drop loops so every vertex appears once."""
    out = []
    where = {}
    for v in path:
        if v in where:
            cut = where[v]
            for u in out[cut + 1:]:
                del where[u]
            out = out[:cut + 1]
        else:
            where[v] = len(out)
            out.append(v)
    return tuple(out)


def choose_anchor(b: Bramble, i: int) -> int:
    """Smallest vertex of element i among those lying in the fewest elements."""
    mult = {}
    for e in b.elements:
        for v in e:
            mult[v] = mult.get(v, 0) + 1
    return min(b.elements[i], key=lambda v: (mult[v], v))


def route(g: Graph, b: Bramble, d: Digraph, check=True) -> RoutedEmbedding:
    """Map digraph vertex i into bramble element i and route each arc through a shared vertex."""
    if d.n > len(b):
        raise GadgetError(f"digraph has {d.n} vertices but the bramble only {len(b)} elements")
    if check:
        bad = validate_bramble(g, b)
        if bad:
            raise GadgetError("not a perfect bramble: " + "; ".join(bad))
    mu = {i: choose_anchor(b, i) for i in range(d.n)}
    dist_cache = {}

    def dist_from(i, s):
        key = (i, s)
        if key not in dist_cache:
            inside = b.elements[i]
            dist = {s: 0}
            q = deque([s])
            while q:
                a = q.popleft()
                for c in g.adj[a]:
                    if c in inside and c not in dist:
                        dist[c] = dist[a] + 1
                        q.append(c)
            dist_cache[key] = dist
        return dist_cache[key]

    paths = []
    for a, c in d.arcs:
        shared = b.elements[a] & b.elements[c]
        da, dc = dist_from(a, mu[a]), dist_from(c, mu[c])
        w = min(shared, key=lambda v: (da[v] + dc[v], v))
        first = _bfs_path(g, b.elements[a], mu[a], w)
        second = _bfs_path(g, b.elements[c], w, mu[c])
        paths.append(_shortcut(first + second[1:]))
    load, slots = {}, {}
    for k, p in enumerate(paths):
        for v in p:
            slots[(v, k)] = load.get(v, 0)
            load[v] = load.get(v, 0) + 1
    return RoutedEmbedding(mu, paths, d.arcs, load, slots)


def square_coloring(g: Graph) -> list:
    """Greedy colouring of G^2 in label order; colours start at 1."""
    colors = [0] * g.n
    for v in g.vertices():
        near = set(g.adj[v])
        for u in g.adj[v]:
            near.update(g.adj[u])
        near.discard(v)
        used = {colors[u] for u in near if colors[u]}
        c = 1
        while c in used:
            c += 1
        colors[v] = c
    return colors


def is_square_coloring(g: Graph, colors) -> bool:
    for v in g.vertices():
        near = set(g.adj[v])
        for u in g.adj[v]:
            near.update(g.adj[u])
        near.discard(v)
        if any(colors[u] == colors[v] for u in near):
            return False
    return True
