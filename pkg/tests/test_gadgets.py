import itertools
import random

import pytest

from freezenet.core import Graph, cycle_graph, grid_graph, path_graph, star_graph, step_deterministic
from freezenet.gadgets import (BOT, Bramble, CircuitDag, Digraph, GadgetError, Gate, circuit_async_gadget,
                               circuit_predecessor_gadget, contradiction_circuit, dominating_set_gadget,
                               grid_bramble, grid_host, is_square_coloring, parse_circuit, random_circuit,
                               route, routed_prediction_gadget, sat_nilpotency_gadget, square_coloring,
                               validate_bramble)
from freezenet.oracle import brute_dominating_set

K3 = Graph(3, [(0, 1), (1, 2), (0, 2)])


# ---------------------------------------------------------------- routing

def test_bramble_validation():
    g = path_graph(3)
    assert validate_bramble(g, Bramble([{0, 1}, {1, 2}])) == []
    errs = validate_bramble(g, Bramble([{0}, {2}]))
    assert any(e.startswith("intersection") for e in errs)
    errs = validate_bramble(g, Bramble([{0, 2}, {0, 1}]))
    assert any(e.startswith("connectivity") for e in errs)
    errs = validate_bramble(K3, Bramble([{0}, {0, 1}, {0, 2}]))
    assert any(e.startswith("multiplicity") for e in errs)


def test_grid_bramble():
    g, b = grid_host(3)
    assert len(b) == 3 and validate_bramble(g, b) == []
    assert validate_bramble(grid_graph(5, 5), grid_bramble(5)) == []
    with pytest.raises(GadgetError):
        grid_bramble(1)


def test_route_single_arc_on_p3():
    emb = route(path_graph(3), Bramble([{0, 1}, {1, 2}]), Digraph(2, [(0, 1)]))
    assert emb.mu == {0: 0, 1: 2}
    assert emb.paths == [(0, 1, 2)]


def test_route_without_arcs():
    emb = route(path_graph(3), Bramble([{0, 1}, {1, 2}]), Digraph(2, []))
    assert len(emb.mu) == 2 and emb.paths == []


def test_route_triangle_on_grid():
    g, b = grid_host(3)
    d = Digraph(3, [(0, 1), (1, 2), (2, 0)])
    emb = route(g, b, d)
    assert emb.max_load() <= 4 * d.max_degree
    assert all(len(emb.preimages(v)) <= 2 for v in g.vertices())
    for (a, c), p in zip(d.arcs, emb.paths):
        assert p[0] == emb.mu[a] and p[-1] == emb.mu[c]
        assert all(q in g.adj[p_] for p_, q in zip(p, p[1:]))


def test_route_needs_enough_elements():
    g, b = grid_host(2)
    with pytest.raises(GadgetError):
        route(g, b, Digraph(3, [(0, 1)]))


def test_square_coloring_examples():
    assert len(set(square_coloring(path_graph(3)))) == 3
    assert square_coloring(Graph(1)) == [1]
    col = square_coloring(cycle_graph(4))
    assert max(col) <= 5 and is_square_coloring(cycle_graph(4), col)
    assert not is_square_coloring(path_graph(3), [1, 2, 1])


# ---------------------------------------------------------------- circuits

def test_circuit_parsing_and_evaluation():
    c = parse_circuit("x & ~x")
    assert c.satisfying() is None
    c = parse_circuit("(x | y) & ~x")
    assert c.satisfying() == (0, 1)
    assert [c.output(b) for b in itertools.product((0, 1), repeat=2)] == [0, 1, 0, 0]
    with pytest.raises(ValueError):
        parse_circuit("x & (y")


def test_circuit_validation():
    with pytest.raises(ValueError):
        CircuitDag([Gate("input"), Gate("and", (0,)), Gate("output", (1,))])
    with pytest.raises(ValueError):
        CircuitDag([Gate("input"), Gate("not", (2,)), Gate("not", (1,)), Gate("output", (2,))])
    c = CircuitDag([Gate("input"), Gate("input"), Gate("and", (0, 1)), Gate("output", (2,))])
    assert CircuitDag.from_json(c.to_json()).gates == c.gates
    assert c.monotone and c.depth() >= 2


def test_random_and_contradiction_circuits():
    rng = random.Random(0)
    for _ in range(10):
        c = random_circuit(rng, 3, 5, monotone=True)
        assert c.monotone
        assert all(len(c.consumers(i)) <= 2 for i in range(len(c)))
        assert contradiction_circuit(rng, 2, 3).satisfying() is None


# ---------------------------------------------------------------- dominating set

@pytest.mark.parametrize("g,k,expected", [(K3, 1, True), (path_graph(4), 1, False), (star_graph(4), 1, True),
                                          (path_graph(4), 2, True)])
def test_dominating_set_gadget_examples(g, k, expected):
    gd = dominating_set_gadget(g, k)
    assert gd.satisfiable() == expected == brute_dominating_set(g, k)


def test_dominating_set_rejects_all_markings_of_p4():
    gd = dominating_set_gadget(path_graph(4), 1)
    for s in range(4):
        assert not gd.accepts(gd.selection_configuration((s,)))


def _expected_marking(gd, marks):
    n, k = gd.n, gd.k
    sel = []
    for j in range(1, k + 1):
        ps = {c % n for c in marks[j]}
        if len(ps) != 1:
            return False
        sel.append(ps.pop())
    for b in range(n):
        (c,) = [c for c in marks[k + 1] if c // n == b]
        if c % n not in gd.g.closed[b] or c % n not in sel:
            return False
    return True


@pytest.mark.parametrize("g,k", [(path_graph(2), 1), (path_graph(2), 2), (path_graph(3), 1), (K3, 1)])
def test_dominating_set_every_marking(g, k):
    # every one-mark-per-bloc configuration is accepted exactly when it encodes a certified selection
    gd = dominating_set_gadget(g, k)
    n = g.n
    per_row = [{b * n + p for b, p in enumerate(ps)} for ps in itertools.product(range(n), repeat=n)]
    for rows in itertools.product(per_row, repeat=k + 1):
        marks = {j + 1: r for j, r in enumerate(rows)}
        assert gd.accepts(gd.configuration(marks)) == _expected_marking(gd, marks)


def test_dominating_set_gadget_errors():
    with pytest.raises(GadgetError):
        dominating_set_gadget(path_graph(3), 0)
    with pytest.raises(GadgetError):
        dominating_set_gadget(Graph(2), 1)
    gd = dominating_set_gadget(path_graph(3), 1)
    assert gd.spec.generator["kind"] == "dominating-set"
    assert gd.host.n == 3 * 9


# ---------------------------------------------------------------- circuit gadgets

def test_nilpotency_gadget_satisfiable():
    c = parse_circuit("x")
    g, b = grid_host(4)
    gad = sat_nilpotency_gadget(c, g, b)
    bits, cfg = gad.bot_free_fixed_point()
    assert bits == (1,) and gad.is_fixed_point(cfg) and BOT not in cfg


def test_nilpotency_gadget_contradiction():
    c = parse_circuit("x & ~x")
    g, b = grid_host(4)
    gad = sat_nilpotency_gadget(c, g, b)
    assert gad.bot_free_fixed_point() is None
    assert gad.is_fixed_point(gad.bottom())
    rng = random.Random(2)
    for _ in range(100):
        assert gad.run_to_fixed_point(gad.random_configuration(rng)) == gad.bottom()


@pytest.mark.parametrize("text", ["x | y", "x & ~x"])
def test_predecessor_gadget(text):
    c = parse_circuit(text)
    g, b = grid_host(max(2, len(c)))
    gad = circuit_predecessor_gadget(c, g, b, samples=50)
    target = gad.target()
    for bits in itertools.product((0, 1), repeat=len(c.inputs)):
        y = gad.predecessor(bits)
        assert (step_deterministic(gad.net, y) == target) == bool(c.output(bits))


def test_async_gadget_satisfiable():
    c = parse_circuit("x")
    g, b = grid_host(len(c) + len(c.inputs))
    gad = circuit_async_gadget(c, g, b, samples=50)
    assert gad.start() != gad.target()
    sched = gad.schedule((1,))
    x = gad.start()
    for nodes in sched:
        full = step_deterministic(gad.net, x)
        x = tuple(full[v] if v in nodes else x[v] for v in g.vertices())
    assert x == gad.target()


def test_async_gadget_contradiction():
    c = parse_circuit("x & ~x")
    g, b = grid_host(len(c) + len(c.inputs))
    gad = circuit_async_gadget(c, g, b, samples=50)
    rng = random.Random(4)
    assert all(gad.random_run(rng) != gad.target() for _ in range(100))


@pytest.mark.parametrize("bits,expected", [((1, 1), 1), ((1, 0), 0), ((0, 1), 0), ((0, 0), 0)])
def test_prediction_gadget_and(bits, expected):
    c = parse_circuit("x & y")
    g, b = grid_host(max(2, len(c)))
    gad = routed_prediction_gadget(c, g, b, samples=50)
    assert gad.simulate(bits) == expected


@pytest.mark.parametrize("bit", [0, 1])
def test_prediction_gadget_identity(bit):
    c = parse_circuit("x")
    g, b = grid_host(2)
    gad = routed_prediction_gadget(c, g, b, samples=50)
    assert gad.simulate((bit,)) == bit


def test_prediction_gadget_needs_monotone():
    g, b = grid_host(3)
    with pytest.raises(GadgetError):
        routed_prediction_gadget(parse_circuit("~x"), g, b)
