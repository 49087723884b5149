import pytest

from freezenet.core import (Graph, ResourceLimitError, async_lift, constant_network, cycle_graph,
                            identity_network, or_network, path_graph, star_graph)
from freezenet.oracle import (OracleBudget, brute_async_reach, brute_check_spec, brute_dominating_set,
                              brute_nilpotency, brute_orbits, brute_predecessor, brute_prediction,
                              brute_restricted_orbits)
from freezenet.solver import check_spec
from freezenet.traces import Endpoints, RleTrace, Specification, TraceSet


def complete(n):
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def test_check_spec_basics():
    net = or_network(path_graph(3))
    assert brute_check_spec(net, Specification(2))
    assert not brute_check_spec(async_lift(net), Specification(2, {0: Endpoints(first=1, last=0)}))


@pytest.mark.parametrize("cons", [{1: Endpoints(last=1)},
                                  {0: Endpoints(first=0), 1: Endpoints(first=0, last=1), 2: Endpoints(first=0)},
                                  {2: TraceSet([RleTrace.from_sequence((0, 0, 1))])}])
def test_agrees_with_solver_on_p3(cons):
    net = or_network(path_graph(3))
    spec = Specification(2, cons)
    assert brute_check_spec(net, spec) == check_spec(net, spec).satisfiable


def test_nilpotency_examples():
    assert brute_nilpotency(constant_network(cycle_graph(4)))
    assert not brute_nilpotency(identity_network(path_graph(2)))
    assert not brute_nilpotency(or_network(cycle_graph(3)))


def test_predecessor_examples():
    net = or_network(path_graph(2))
    assert brute_predecessor(net, (1, 0), 1) is None
    assert brute_predecessor(net, (1, 1), 1) == (0, 1)
    assert brute_predecessor(or_network(path_graph(3)), (0, 0, 0), 4) == (0, 0, 0)


def test_async_reach_examples():
    net = or_network(path_graph(2))
    assert brute_async_reach(net, (1, 0), (1, 1))
    assert not brute_async_reach(net, (0, 0), (1, 1))
    assert brute_async_reach(net, (0, 1), (0, 1))


def test_prediction():
    net = or_network(path_graph(3))
    assert brute_prediction(net, (1, 0, 0), 2, Endpoints(last=1), 2)
    assert not brute_prediction(net, (1, 0, 0), 2, TraceSet([RleTrace.constant(0, 2)]), 2)


def test_dominating_set_examples():
    assert brute_dominating_set(complete(3), 1)
    assert not brute_dominating_set(path_graph(4), 1)
    assert brute_dominating_set(star_graph(4), 1)
    assert brute_dominating_set(path_graph(4), 2)


def test_orbits_enumeration():
    orbs = brute_orbits(or_network(path_graph(2)), 1)
    assert len(orbs) == 4
    assert ((1, 0), (1, 1)) in orbs
    restricted = brute_restricted_orbits(or_network(path_graph(2)), [0], 1)
    assert restricted == {((0,), (0,)), ((0,), (1,)), ((1,), (1,))}


def test_budgets():
    with pytest.raises(ValueError):
        OracleBudget(max_configs=0)
    with pytest.raises(ResourceLimitError):
        brute_check_spec(or_network(path_graph(5)), Specification(1), budget=OracleBudget(max_configs=10))
    with pytest.raises(ResourceLimitError):
        brute_nilpotency(constant_network(path_graph(4)), budget=OracleBudget(max_nodes=3))
