import itertools
import random

import pytest

from freezenet.core import (NetworkError, and_network, async_lift, constant_network, cycle_graph,
                            identity_network, or_network, orbit, path_graph, threshold_network)
from freezenet.instances import random_network
from freezenet.oracle import brute_async_reach, brute_nilpotency, brute_predecessor, brute_prediction
from freezenet.problems import (ProblemInstance, nilpotency_horizon, replay_schedule, schedule_from_orbit,
                                solve_async_reachability, solve_nilpotency, solve_predecessor,
                                solve_prediction)
from freezenet.traces import Endpoints, RleTrace, TraceSet, monotone_traces


def test_prediction_examples():
    net = or_network(path_graph(3))
    ends_one = TraceSet(RleTrace.from_steps(s, 2) for s in monotone_traces(net.alphabet, 2, first=0, last=1))
    assert solve_prediction(net, (1, 0, 0), 2, ends_one, 2).satisfiable
    assert not solve_prediction(net, (1, 0, 0), 2, [(0, 0, 0)], 2).satisfiable
    ident = identity_network(path_graph(3))
    assert solve_prediction(ident, (0, 1, 0), 1, [(1, 1, 1, 1)], 3).satisfiable


def test_prediction_validation():
    net = or_network(path_graph(3))
    with pytest.raises(ValueError):
        solve_prediction(net, (1, 0, 0), 2, [(1, 1, 1)], 2)
    with pytest.raises(ValueError):
        solve_prediction(net, (1, 0, 0), 5, [(0, 0, 0)], 2)
    with pytest.raises(NetworkError):
        solve_prediction(async_lift(net), (1, 0, 0), 2, [(0, 0, 0)], 2)
    # non-explicit constraints get the start pinned automatically
    assert solve_prediction(net, (1, 0, 0), 2, Endpoints(last=1), 2).satisfiable


def test_predecessor_examples():
    net = or_network(path_graph(2))
    v = solve_predecessor(net, (1, 1), 1)
    assert v.satisfiable
    y = tuple(v.stats["predecessor"])
    assert orbit(net, y, 1).configs[-1] == (1, 1)
    assert not solve_predecessor(net, (1, 0), 1).satisfiable
    fixed = (1, 1, 1)
    assert solve_predecessor(or_network(path_graph(3)), fixed, 4).satisfiable


def test_nilpotency_examples():
    assert solve_nilpotency(constant_network(cycle_graph(4))).satisfiable
    assert not solve_nilpotency(identity_network(path_graph(2))).satisfiable
    assert not solve_nilpotency(or_network(path_graph(2))).satisfiable
    v = solve_nilpotency(constant_network(path_graph(3)))
    assert v.stats["fixed_point"] == [1, 1, 1]


def test_nilpotency_methods_agree():
    for net in (constant_network(path_graph(2)), or_network(path_graph(2)), identity_network(path_graph(2))):
        a = solve_nilpotency(net).satisfiable
        b = solve_nilpotency(net, method="horizon").satisfiable
        assert a == b == brute_nilpotency(net)
    with pytest.raises(ValueError):
        solve_nilpotency(or_network(path_graph(2)), method="guess")


def test_nilpotency_horizon():
    assert nilpotency_horizon(or_network(path_graph(3))) == 3 * 2 * 7


def test_async_examples():
    net = or_network(path_graph(2))
    v = solve_async_reachability(net, (1, 0), (1, 1))
    assert v.satisfiable and replay_schedule(net, (1, 0), v.stats["schedule"])[-1] == (1, 1)
    assert not solve_async_reachability(net, (0, 0), (1, 1)).satisfiable
    same = solve_async_reachability(net, (0, 1), (0, 1))
    assert same.satisfiable and same.stats["schedule"] == []


def test_schedule_round_trip():
    net = or_network(path_graph(4))
    orb = orbit(net, (1, 0, 0, 0), 4)
    sched = schedule_from_orbit(orb)
    assert sched == [[1], [2], [3]]
    assert replay_schedule(net, (1, 0, 0, 0), sched)[-1] == (1, 1, 1, 1)


def test_problem_instance_dispatch():
    net = or_network(path_graph(2))
    assert ProblemInstance("predecessor", net, {"c": (1, 1), "t": 1}).solve().satisfiable
    assert not ProblemInstance("nilpotency", net).solve().satisfiable
    assert ProblemInstance("async-reach", net, {"c0": (1, 0), "c1": (1, 1)}).solve().satisfiable
    with pytest.raises(ValueError):
        ProblemInstance("prediction", net, {"c": (1, 1)})
    with pytest.raises(ValueError):
        ProblemInstance("halting", net)


@pytest.mark.parametrize("make", [or_network, and_network, identity_network, threshold_network])
def test_p3_rules_against_oracles(make):
    net = make(path_graph(3))
    assert solve_nilpotency(net).satisfiable == brute_nilpotency(net)
    for c in itertools.product((0, 1), repeat=3):
        assert solve_predecessor(net, c, 2).satisfiable == (brute_predecessor(net, c, 2) is not None)
        for c1 in itertools.product((0, 1), repeat=3):
            assert solve_async_reachability(net, c, c1).satisfiable == brute_async_reach(net, c, c1)


@pytest.mark.parametrize("seed", range(15))
def test_random_deterministic_against_oracles(seed):
    rng = random.Random(seed)
    net = random_network(rng, rng.randint(2, 5), rng.randint(2, 3), deterministic=True)
    Q = net.alphabet.states
    c = tuple(rng.choice(Q) for _ in range(net.n))
    assert solve_nilpotency(net).satisfiable == brute_nilpotency(net)
    assert solve_predecessor(net, c, 2).satisfiable == (brute_predecessor(net, c, 2) is not None)
    c1 = tuple(rng.choice(Q) for _ in range(net.n))
    assert solve_async_reachability(net, c, c1).satisfiable == brute_async_reach(net, c, c1)
    v, t = rng.randrange(net.n), rng.randint(0, 4)
    traces = [RleTrace.from_steps(s, t) for s in monotone_traces(net.alphabet, t, first=c[v])]
    sv = TraceSet(rng.sample(traces, rng.randint(1, len(traces))))
    assert solve_prediction(net, c, v, sv, t).satisfiable == brute_prediction(net, c, v, sv, t)
