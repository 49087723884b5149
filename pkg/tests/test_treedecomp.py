import math
import random

import networkx as nx
import pytest
from networkx.algorithms.approximation import treewidth_min_fill_in

from freezenet.core import Graph, cycle_graph, grid_graph, path_graph, star_graph
from freezenet.treedecomp import (BALANCE_CONSTANT, DecompositionError, TreeDecomposition, balance_bound,
                                  binarize, binarize_balance, default_decomposition,
                                  heuristic_decomposition, levels, path_decomposition,
                                  trivial_decomposition, validate_decomposition)


def complete(n):
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def random_connected(rng, n):
    edges = {(rng.randrange(i), i) for i in range(1, n)}
    for _ in range(rng.randint(0, n)):
        a, b = rng.sample(range(n), 2)
        edges.add((min(a, b), max(a, b)))
    return Graph(n, edges)


def test_single_bag_is_valid():
    g = cycle_graph(5)
    assert validate_decomposition(g, trivial_decomposition(g)) == 4


def test_p3_two_bags():
    g = path_graph(3)
    assert validate_decomposition(g, TreeDecomposition([{0, 1}, {1, 2}], [(0, 1)])) == 1
    errs = validate_decomposition(g, TreeDecomposition([{0, 1}, {2}], [(0, 1)]))
    assert errs == ["edge coverage: edge (1, 2) is in no bag"]


def test_connectivity_violation():
    g = path_graph(3)
    d = TreeDecomposition([{0, 1}, {1, 2}, {0}], [(0, 1), (1, 2)])
    errs = validate_decomposition(g, d)
    assert any(e.startswith("connectivity") for e in errs)


def test_malformed_trees_raise():
    with pytest.raises(DecompositionError):
        TreeDecomposition([{0}, {1}], [])
    with pytest.raises(DecompositionError):
        TreeDecomposition([])
    with pytest.raises(DecompositionError):
        TreeDecomposition.from_json({"edges": []})


@pytest.mark.parametrize("g,width", [(path_graph(6), 1), (star_graph(4), 1), (complete(4), 3),
                                     (cycle_graph(5), 2)])
def test_heuristic_widths(g, width):
    d = heuristic_decomposition(g)
    assert validate_decomposition(g, d) == width


def test_heuristic_matches_networkx_width():
    # independent min-fill implementation; both are heuristics, so compare on graphs where it is exact
    rng = random.Random(3)
    for _ in range(40):
        g = random_connected(rng, rng.randint(2, 12))
        ours = validate_decomposition(g, heuristic_decomposition(g))
        assert isinstance(ours, int)
        theirs, _ = treewidth_min_fill_in(nx.Graph(list(g.edges)))
        assert ours <= theirs + 1


def test_binarize_keeps_width():
    d = TreeDecomposition([{0}, {0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}], [(0, i) for i in range(1, 6)])
    g = star_graph(5)
    assert validate_decomposition(g, d) == 1
    b = binarize(d)
    assert b.is_binary and validate_decomposition(g, b) == 1


def test_binarize_balance_single_bag():
    d = trivial_decomposition(path_graph(3))
    b = binarize_balance(d)
    assert len(b) == 1 and b.depth == 0


def test_binarize_balance_p9_chain():
    g = path_graph(9)
    d = path_decomposition(g, list(range(9)))
    assert len(d) == 8
    b = binarize_balance(d)
    assert b.is_binary
    assert validate_decomposition(g, b) <= 5
    assert b.depth <= 2 * math.ceil(math.log2(8)) + BALANCE_CONSTANT


def test_binarize_balance_star_root():
    g = star_graph(5)
    d = TreeDecomposition([{0}, {0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}], [(0, i) for i in range(1, 6)])
    b = binarize_balance(d)
    assert b.is_binary and isinstance(validate_decomposition(g, b), int)


def test_levels():
    assert levels(trivial_decomposition(path_graph(2))) == [[0]]
    chain = TreeDecomposition([{0}, {0}, {0}], [(0, 1), (1, 2)], root=0)
    assert levels(chain) == [[2], [1], [0]]
    tree = TreeDecomposition([{0}] * 7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)])
    assert [len(x) for x in levels(tree)] == [4, 2, 1]


def test_balance_on_grid():
    g = grid_graph(4, 4)
    d = default_decomposition(g, balance=True)
    k = heuristic_decomposition(g).width
    assert d.is_binary
    assert validate_decomposition(g, d) <= 3 * k + 2
    assert d.depth <= balance_bound(len(d))


def test_json_round_trip():
    d = default_decomposition(cycle_graph(6))
    assert TreeDecomposition.from_json(d.to_json()).bags == d.bags
