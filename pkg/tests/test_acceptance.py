"""End-to-end acceptance checks; each test prints a single PASS/FAIL line."""
import itertools
import random
import time

from freezenet.core import (Graph, and_network, identity_network, max_orbit_length, or_network,
                            step_deterministic, successors, threshold_network)
from freezenet.gadgets import (Digraph, contradiction_circuit, dominating_set_gadget, grid_host, random_circuit,
                               route, routed_prediction_gadget, sat_nilpotency_gadget)
from freezenet.instances import random_instance, random_network
from freezenet.oracle import (brute_async_reach, brute_check_spec, brute_dominating_set, brute_nilpotency,
                              brute_predecessor, brute_prediction, brute_restricted_orbits)
from freezenet.problems import (solve_async_reachability, solve_nilpotency, solve_predecessor,
                                solve_prediction)
from freezenet.solver import check_spec, default_jobs
from freezenet.traces import RleTrace, TraceSet, monotone_traces
from freezenet.treedecomp import (balance_bound, binarize_balance, default_decomposition,
                                  heuristic_decomposition, validate_decomposition)


def connected_graphs(n):
    """Every connected labelled graph on n vertices."""
    pairs = list(itertools.combinations(range(n), 2))
    for m in range(n - 1, len(pairs) + 1):
        for edges in itertools.combinations(pairs, m):
            g = Graph(n, edges)
            if g.is_connected():
                yield g


def witness_sound(net, spec, orb):
    steps_ok = all(b in successors(net, a) for a, b in zip(orb.configs, orb.configs[1:]))
    spec_ok = all(spec.admits(v, RleTrace.from_sequence(orb.node_trace(v))) for v in range(net.n))
    return steps_ok and spec_ok and len(orb.configs) == spec.t + 1


def test_solver_oracle_equivalence(report):
    start = time.perf_counter()
    count = agree = sats = 0
    shape_ok = True
    for seed in range(250):
        net, spec, t = random_instance(seed, max_n=7, max_q=3, max_t=8)
        shape_ok &= (net.n <= 7 and len(net.alphabet) <= 3 and t <= 8
                     and max(len(a) for a in net.graph.adj) <= 3
                     and heuristic_decomposition(net.graph).width <= 2)
        v = check_spec(net, spec, jobs=default_jobs())
        agree += v.satisfiable == brute_check_spec(net, spec)
        sats += v.satisfiable
        count += 1
    elapsed = time.perf_counter() - start
    ok = count >= 200 and agree == count and shape_ok and elapsed < 300
    report("C1", ok, f"{agree}/{count} verdicts agree ({sats} satisfiable), {elapsed:.1f}s")
    assert ok


def test_witness_soundness(report):
    checked = bad = 0
    for seed in range(250):
        net, spec, t = random_instance(seed, max_n=7, max_q=3, max_t=8)
        v = check_spec(net, spec)
        if v.satisfiable:
            checked += 1
            bad += not witness_sound(net, spec, v.witness)
    for seed in range(40):
        rng = random.Random(seed)
        net = random_network(rng, rng.randint(2, 6), 2, deterministic=True)
        c0 = tuple(rng.choice(net.alphabet.states) for _ in range(net.n))
        x = c0
        for _ in range(3):
            full = step_deterministic(net, x)
            x = tuple(full[i] if rng.random() < 0.5 else x[i] for i in range(net.n))
        v = solve_async_reachability(net, c0, x)
        checked += 1
        bad += not v.satisfiable
    ok = bad == 0 and checked > 0
    report("C2", ok, f"{checked} witnesses replayed, {bad} failures")
    assert ok


def _extend_runs(hist, extra):
    return {hist[:i] + (hist[i],) * extra + hist[i:] for i in range(len(hist))}


def test_pumping_bound(report):
    bad = 0
    for seed in range(50):
        rng = random.Random(seed)
        n = rng.randint(2, 5)
        net = random_network(rng, n, 2, deterministic=rng.random() < 0.3)
        U = sorted(rng.sample(range(n), 1 if n == 5 else rng.randint(1, 2)))
        L = max_orbit_length(len(U), 2, n)
        short = brute_restricted_orbits(net, U, L)
        long = brute_restricted_orbits(net, U, L + 5)
        extended = set().union(*(_extend_runs(h, 5) for h in short))
        bad += not long <= extended
    ok = bad == 0
    report("C3", ok, f"50 instances, {bad} restricted orbits of length L+5 not obtained by run extension")
    assert ok


def test_decomposition_contract(report):
    rng = random.Random(4)
    good = 0
    for _ in range(100):
        n = rng.randint(1, 20)
        edges = {(rng.randrange(i), i) for i in range(1, n)}
        for _ in range(rng.randint(0, 2 * n)):
            a, b = rng.sample(range(n), 2) if n > 1 else (0, 0)
            if a != b:
                edges.add((min(a, b), max(a, b)))
        g = Graph(n, edges)
        d = heuristic_decomposition(g)
        b = binarize_balance(d)
        width = validate_decomposition(g, b)
        k = d.width
        good += (b.is_binary and isinstance(width, int) and width <= 3 * k + 2
                 and b.depth <= balance_bound(len(b)))
    ok = good == 100
    report("C4", ok, f"{good}/100 balanced decompositions binary, valid, width<=3k+2, depth<=c*log2(bags)+c")
    assert ok


def test_canonical_problems(report):
    start = time.perf_counter()
    checks = bad = 0
    for n in range(1, 5):
        for g in connected_graphs(n):
            for net in (or_network(g), and_network(g), identity_network(g), threshold_network(g)):
                Q = net.alphabet.states
                checks += 1
                bad += solve_nilpotency(net).satisfiable != brute_nilpotency(net)
                configs = list(itertools.product(Q, repeat=n))
                for c in configs:
                    for t in (1, 2):
                        checks += 1
                        bad += solve_predecessor(net, c, t).satisfiable != (brute_predecessor(net, c, t) is not None)
                    for c1 in configs:
                        checks += 1
                        bad += solve_async_reachability(net, c, c1).satisfiable != brute_async_reach(net, c, c1)
                    for v in range(n):
                        for steps in monotone_traces(net.alphabet, 2, first=c[v]):
                            sv = TraceSet([RleTrace.from_steps(steps, 2)])
                            checks += 1
                            bad += solve_prediction(net, c, v, sv, 2).satisfiable != brute_prediction(net, c, v, sv, 2)
    exhaustive = checks
    for seed in range(100):
        rng = random.Random(seed)
        net = random_network(rng, rng.randint(2, 6), rng.randint(2, 3), deterministic=True)
        Q = net.alphabet.states
        c = tuple(rng.choice(Q) for _ in range(net.n))
        c1 = tuple(rng.choice(Q) for _ in range(net.n))
        t = rng.randint(1, 4)
        v = rng.randrange(net.n)
        traces = [RleTrace.from_steps(s, t) for s in monotone_traces(net.alphabet, t, first=c[v])]
        sv = TraceSet(rng.sample(traces, rng.randint(1, min(4, len(traces)))))
        bad += solve_nilpotency(net).satisfiable != brute_nilpotency(net)
        bad += solve_predecessor(net, c, t).satisfiable != (brute_predecessor(net, c, t) is not None)
        bad += solve_async_reachability(net, c, c1).satisfiable != brute_async_reach(net, c, c1)
        bad += solve_prediction(net, c, v, sv, t).satisfiable != brute_prediction(net, c, v, sv, t)
        checks += 4
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 600
    report("C5", ok, f"{checks - bad}/{checks} problem answers agree ({exhaustive} exhaustive), {elapsed:.1f}s")
    assert ok


def test_dominating_set_gadget(report):
    start = time.perf_counter()
    cases = bad = 0
    for n in range(1, 6):
        for g in connected_graphs(n):
            for k in (1, 2):
                cases += 1
                bad += dominating_set_gadget(g, k).satisfiable() != brute_dominating_set(g, k)
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 300
    report("C6", ok, f"{cases - bad}/{cases} graph/k pairs agree, {elapsed:.1f}s")
    assert ok


def test_routing_loads_on_grids(report):
    rng = random.Random(7)
    good = 0
    for _ in range(100):
        m = rng.randint(3, 8)
        g, b = grid_host(m)
        k = rng.randint(2, m)
        arcs = {(rng.randrange(k), rng.randrange(k)) for _ in range(rng.randint(0, 3 * k))}
        d = Digraph(k, sorted((a, c) for a, c in arcs if a != c))
        emb = route(g, b, d)
        good += (emb.max_load() <= 4 * max(1, d.max_degree)
                 and all(len(emb.preimages(v)) <= 2 for v in g.vertices()))
    ok = good == 100
    report("C7", ok, f"{good}/100 routings within load 4*max-degree and at most 2 preimages")
    assert ok


def test_sat_nilpotency_gadget(report):
    rng = random.Random(11)
    violations = sats = 0
    for i in range(30):
        inputs = rng.randint(1, 4)
        if i % 2:
            c = contradiction_circuit(rng, inputs, rng.randint(1, 3))
        else:
            c = random_circuit(rng, inputs, rng.randint(1, 5))
        g, b = grid_host(max(2, len(c)))
        gad = sat_nilpotency_gadget(c, g, b)
        sat = c.satisfying() is not None
        sats += sat
        fp = gad.bot_free_fixed_point()
        if (fp is not None) != sat or (fp is not None and not gad.is_fixed_point(fp[1])):
            violations += 1
        if not sat:
            bottom = gad.bottom()
            violations += sum(gad.run_to_fixed_point(gad.random_configuration(rng)) != bottom for _ in range(500))
    ok = violations == 0
    report("C8", ok, f"30 circuits ({sats} satisfiable), {violations} violations")
    assert ok


def test_routed_prediction(report):
    rng = random.Random(9)
    done = bad = 0
    while done < 50:
        c = random_circuit(rng, rng.randint(1, 3), rng.randint(1, 4), monotone=True)
        if len(c) > 8:
            continue
        done += 1
        g, b = grid_host(max(2, len(c)))
        gad = routed_prediction_gadget(c, g, b, samples=20)
        for bits in itertools.product((0, 1), repeat=len(c.inputs)):
            bad += gad.simulate(bits) != c.output(bits)
    ok = bad == 0
    report("C9", ok, f"50 monotone circuits, {bad} output mismatches over all inputs")
    assert ok


def test_determinism_across_workers(report):
    cpu = max(2, default_jobs())
    good = total = 0
    for seed in range(60):
        net, spec, t = random_instance(7000 + seed, max_n=7, max_q=3, max_t=6)
        first = default_decomposition(net.graph)
        second = default_decomposition(net.graph, balance=True)
        verdicts = []
        witnesses = []
        for d in (first, second):
            for jobs in (1, 2, cpu):
                v = check_spec(net, spec, decomposition=d, jobs=jobs)
                verdicts.append(v.satisfiable)
                if d is first:
                    witnesses.append(None if v.witness is None else v.witness.configs)
        total += 1
        good += len(set(verdicts)) == 1 and all(w == witnesses[0] for w in witnesses)
    ok = good == total
    report("C10", ok, f"{good}/{total} instances identical across jobs {{1, 2, {cpu}}} and two decompositions")
    assert ok
