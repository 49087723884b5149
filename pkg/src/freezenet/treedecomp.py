"""Tree decompositions: validation, min-fill construction, binarisation and balancing."""
from __future__ import annotations

import math
from collections import deque

from .core import Graph

# depth <= BALANCE_CONSTANT * log2(#bags) + BALANCE_CONSTANT after binarize_balance
BALANCE_CONSTANT = 4


class DecompositionError(ValueError):
    pass


class TreeDecomposition:
    def __init__(self, bags, edges=(), root=0):
        self.bags = tuple(frozenset(b) for b in bags)
        if not self.bags:
            raise DecompositionError("a decomposition needs at least one bag")
        self.edges = tuple(sorted((min(a, b), max(a, b)) for a, b in edges))
        m = len(self.bags)
        if not 0 <= root < m:
            raise DecompositionError(f"root {root} out of range")
        self.root = root
        adj = [[] for _ in range(m)]
        for a, b in self.edges:
            if not (0 <= a < m and 0 <= b < m) or a == b:
                raise DecompositionError(f"bad tree edge ({a}, {b})")
            adj[a].append(b)
            adj[b].append(a)
        self.adj = [sorted(x) for x in adj]
        if len(self.edges) != m - 1:
            raise DecompositionError(f"{m} bags need {m - 1} tree edges, got {len(self.edges)}")
        parent = [None] * m
        depth = [0] * m
        order = [root]
        seen = {root}
        q = deque([root])
        while q:
            a = q.popleft()
            for b in self.adj[a]:
                if b not in seen:
                    seen.add(b)
                    parent[b] = a
                    depth[b] = depth[a] + 1
                    order.append(b)
                    q.append(b)
        if len(seen) != m:
            raise DecompositionError("tree edges do not connect all bags")
        self.parent = parent
        self.depth_of = depth
        self.bfs_order = order
        self.children = [[b for b in self.adj[a] if b != parent[a]] for a in range(m)]

    def __len__(self):
        return len(self.bags)

    def __repr__(self):
        return f"TreeDecomposition(bags={len(self.bags)}, width={self.width}, depth={self.depth})"

    @property
    def width(self) -> int:
        return max(len(b) for b in self.bags) - 1

    @property
    def depth(self) -> int:
        return max(self.depth_of)

    @property
    def is_binary(self) -> bool:
        return all(len(c) <= 2 for c in self.children)

    def to_json(self):
        return {"bags": [sorted(b) for b in self.bags], "edges": [list(e) for e in self.edges],
                "root": self.root}

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(obj["bags"], obj.get("edges", []), obj.get("root", 0))
        except KeyError as exc:
            raise DecompositionError(f"decomposition file lacks field {exc}") from None


def validate_decomposition(g: Graph, d: TreeDecomposition):
    """Width if the three axioms hold, else a list of violation strings."""
    problems = []
    where = {v: [] for v in range(g.n)}
    for i, b in enumerate(d.bags):
        for v in b:
            if v not in where:
                problems.append(f"bag {i} contains unknown vertex {v}")
            else:
                where[v].append(i)
    for v, bs in where.items():
        if not bs:
            problems.append(f"vertex coverage: vertex {v} is in no bag")
    for u, v in g.edges:
        if not any(u in b and v in b for b in d.bags):
            problems.append(f"edge coverage: edge ({u}, {v}) is in no bag")
    for v, bs in where.items():
        if len(bs) > 1:
            s = set(bs)
            seen = {bs[0]}
            q = deque([bs[0]])
            while q:
                a = q.popleft()
                for b in d.adj[a]:
                    if b in s and b not in seen:
                        seen.add(b)
                        q.append(b)
            if seen != s:
                problems.append(f"connectivity: bags containing vertex {v} ({sorted(s)}) are not connected")
    return problems if problems else d.width


# ---------------------------------------------------------------- construction

def _fill_in(adj, v):
    nb = sorted(adj[v])
    return sum(1 for i, a in enumerate(nb) for b in nb[i + 1:] if b not in adj[a])


def min_fill_order(g: Graph):
    adj = {v: set(g.adj[v]) for v in g.vertices()}
    order = []
    while adj:
        v = min(adj, key=lambda x: (_fill_in(adj, x), x))
        nb = adj[v]
        for a in nb:
            adj[a] |= nb - {a}
            adj[a].discard(v)
        del adj[v]
        order.append(v)
    return order


def heuristic_decomposition(g: Graph, order=None) -> TreeDecomposition:
    """Decomposition from a min-fill elimination ordering, subsumed bags contracted."""
    order = min_fill_order(g) if order is None else list(order)
    pos = {v: i for i, v in enumerate(order)}
    adj = {v: set(g.adj[v]) for v in g.vertices()}
    bags, later = [], []
    for v in order:
        nb = adj[v]
        bags.append(frozenset(nb | {v}))
        later.append(nb)
        for a in nb:
            adj[a] |= nb - {a}
            adj[a].discard(v)
        del adj[v]
    n = len(order)
    parent = [None] * n
    for i, v in enumerate(order):
        if later[i]:
            parent[i] = min(pos[a] for a in later[i])
    # components of a disconnected graph hang under the last bag
    for i in range(n - 1):
        if parent[i] is None:
            parent[i] = n - 1
    # contract bags contained in their parent, processing from the leaves up
    alive = [True] * n
    for i in range(n - 1):
        p = parent[i]
        if bags[i] <= bags[p]:
            alive[i] = False
            for j in range(n):
                if alive[j] and parent[j] == i:
                    parent[j] = p
    # a parent may itself be contained in a child; absorb it into that child
    changed = True
    while changed:
        changed = False
        for i in range(n - 1):
            p = parent[i]
            if alive[i] and alive[p] and bags[p] <= bags[i]:
                bags[p] = bags[i]
                alive[i] = False
                for j in range(n):
                    if alive[j] and parent[j] == i:
                        parent[j] = p
                changed = True
    keep = [i for i in range(n) if alive[i]]
    new = {i: k for k, i in enumerate(keep)}
    edges = [(new[i], new[parent[i]]) for i in keep if i != n - 1]
    return TreeDecomposition([bags[i] for i in keep], edges, root=new[n - 1])


def trivial_decomposition(g: Graph) -> TreeDecomposition:
    return TreeDecomposition([range(g.n)], [], 0)


def path_decomposition(g: Graph, order):
    """Chain of bags {order[i], order[i+1]}; valid for paths given in path order."""
    bags = [(order[i], order[i + 1]) for i in range(len(order) - 1)] or [tuple(order)]
    return TreeDecomposition(bags, [(i, i + 1) for i in range(len(bags) - 1)], 0)


# ---------------------------------------------------------------- binarisation

def _rebuild(bags, children, root):
    """Renumber a rooted tree given as children lists into BFS order."""
    order, q = [], deque([root])
    while q:
        a = q.popleft()
        order.append(a)
        q.extend(children[a])
    idx = {a: i for i, a in enumerate(order)}
    edges = [(idx[a], idx[c]) for a in order for c in children[a]]
    return TreeDecomposition([bags[a] for a in order], edges, 0)


def binarize(d: TreeDecomposition) -> TreeDecomposition:
    """Width-preserving binary form: extra children hang off chains of bag copies."""
    bags = list(d.bags)
    children = {}
    for a in d.bfs_order:
        kids = list(d.children[a])
        cur = a
        while len(kids) > 2:
            copy = len(bags)
            bags.append(d.bags[a])
            children[cur] = [kids[0], copy]
            kids = kids[1:]
            cur = copy
        children[cur] = kids
    for i in range(len(bags)):
        children.setdefault(i, [])
    return _rebuild(bags, children, d.root)


def _degree_three(d: TreeDecomposition):
    """Unrooted tree with max degree 3 (copies of a bag absorb surplus neighbours)."""
    bags = list(d.bags)
    adj = {i: set(d.adj[i]) for i in range(len(bags))}
    for a in range(len(d.bags)):
        while len(adj[a]) > 3:
            nb = sorted(adj[a])
            keep, move = nb[0], nb[1:]
            c = len(bags)
            bags.append(d.bags[a])
            adj[c] = set(move) | {a}
            for b in move:
                adj[b].discard(a)
                adj[b].add(c)
            adj[a] = {keep, c}
            a = c
    return bags, adj


def _components(nodes, adj, removed):
    seen, comps = set(), []
    for s in sorted(nodes):
        if s in seen or s == removed:
            continue
        comp, q = [], deque([s])
        seen.add(s)
        while q:
            a = q.popleft()
            comp.append(a)
            for b in adj[a]:
                if b in nodes and b != removed and b not in seen:
                    seen.add(b)
                    q.append(b)
        comps.append(comp)
    return comps


def _centroid(nodes, adj):
    nodes = set(nodes)
    best, best_size = None, None
    for c in sorted(nodes):
        biggest = max((len(x) for x in _components(nodes, adj, c)), default=0)
        if best_size is None or biggest < best_size:
            best, best_size = c, biggest
    return best


def _tree_path(nodes, adj, s, t):
    prev = {s: None}
    q = deque([s])
    while q:
        a = q.popleft()
        if a == t:
            break
        for b in sorted(adj[a]):
            if b in nodes and b not in prev:
                prev[b] = a
                q.append(b)
    path = [t]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def binarize_balance(d: TreeDecomposition) -> TreeDecomposition:
    """Binary decomposition of width <= 3k+2 and depth <= 4*log2(#bags)+4.

    Pieces of the tree with at most two attachment edges are split recursively:
    at the centroid when there is at most one attachment, otherwise at the node
    of the attachment path closest to the centroid. The new bag is the old bag
    plus every vertex shared across an attachment edge.
    """
    plain = binarize(d)
    if plain.depth <= balance_bound(len(plain)):
        return plain
    bags, adj = _degree_three(d)
    out_bags, out_children = [], []

    def new_node(bag):
        out_bags.append(frozenset(bag))
        out_children.append([])
        return len(out_bags) - 1

    def build(piece, attach):
        # attach: list of (inside node, outside node) edges
        piece = set(piece)
        if len(attach) <= 1:
            c = _centroid(piece, adj)
        else:
            (s1, _), (s2, _) = attach
            path = _tree_path(piece, adj, s1, s2)
            z = _centroid(piece, adj)
            if z in path:
                c = z
            else:
                # the path node from which the centroid's branch hangs
                c = next(x for x in reversed(_tree_path(piece, adj, s1, z)) if x in path)
        bag = set(bags[c])
        for a, o in attach:
            bag |= bags[a] & bags[o]
        node = new_node(bag)
        kids = []
        for comp in _components(piece, adj, c):
            cs = set(comp)
            sub_attach = [(a, o) for a, o in attach if a in cs]
            sub_attach += [(b, c) for b in adj[c] if b in cs]
            kids.append(build(cs, sorted(sub_attach)))
        if len(kids) <= 2:
            out_children[node] = kids
        else:
            copy = new_node(bag)
            out_children[node] = [kids[0], copy]
            out_children[copy] = kids[1:]
        return node

    root = build(set(range(len(bags))), [])
    return _rebuild(out_bags, out_children, root)


def balance_bound(bag_count: int) -> float:
    return BALANCE_CONSTANT * math.log2(max(bag_count, 1)) + BALANCE_CONSTANT


def levels(d: TreeDecomposition):
    """Bags grouped by distance from the root, deepest group first."""
    if d.root is None:
        raise DecompositionError("levels need a rooted decomposition")
    m = d.depth
    out = [[] for _ in range(m + 1)]
    for a in range(len(d.bags)):
        out[m - d.depth_of[a]].append(a)
    return out


def default_decomposition(g: Graph, balance=False) -> TreeDecomposition:
    d = heuristic_decomposition(g)
    return binarize_balance(d) if balance else binarize(d)
