"""Prediction, predecessor, nilpotency and asynchronous reachability as specification checks."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .core import (Network, NetworkError, async_lift, check_configuration, max_orbit_length,
                   orbit, step_deterministic)
from .solver import Verdict, WitnessError, check_spec
from .traces import AllOf, Constraint, Endpoints, RleTrace, Specification, TraceSet
from .treedecomp import default_decomposition


@dataclass
class ProblemInstance:
    variant: str  # prediction | predecessor | nilpotency | async-reach
    net: Network
    payload: dict = field(default_factory=dict)

    def __post_init__(self):
        needs = {"prediction": {"c", "v", "spec_v", "t"}, "predecessor": {"c", "t"},
                 "nilpotency": set(), "async-reach": {"c0", "c1"}}
        if self.variant not in needs:
            raise ValueError(f"unknown problem variant {self.variant!r}")
        missing = needs[self.variant] - set(self.payload)
        if missing:
            raise ValueError(f"{self.variant} needs {sorted(missing)}")

    def solve(self, **kw) -> Verdict:
        p = self.payload
        if self.variant == "prediction":
            return solve_prediction(self.net, p["c"], p["v"], p["spec_v"], p["t"], **kw)
        if self.variant == "predecessor":
            return solve_predecessor(self.net, p["c"], p["t"], **kw)
        if self.variant == "nilpotency":
            return solve_nilpotency(self.net, **kw)
        return solve_async_reachability(self.net, p["c0"], p["c1"], **kw)


def _need_deterministic(net, what):
    if not net.deterministic:
        raise NetworkError(f"{what} is defined for deterministic networks")


def _as_constraint(spec_v, t):
    if isinstance(spec_v, Constraint):
        return spec_v
    traces = set()
    for tr in spec_v:
        traces.add(tr if isinstance(tr, RleTrace) else RleTrace.from_sequence(tr))
    bad = [tr for tr in traces if tr.t != t]
    if bad:
        raise ValueError(f"trace {bad[0]!r} does not have horizon {t}")
    return TraceSet(traces)


def solve_prediction(net: Network, c, v: int, spec_v, t: int, **kw) -> Verdict:
    """Does the orbit of c, seen at node v, belong to spec_v?"""
    _need_deterministic(net, "prediction")
    c = check_configuration(net, c)
    if not 0 <= v < net.n:
        raise ValueError(f"node {v} out of range")
    con = _as_constraint(spec_v, t)
    ex = con.explicit()
    if ex is not None:
        if any(tr.first != c[v] for tr in ex):
            raise ValueError(f"every trace for node {v} must start at c_v = {c[v]!r}")
    else:
        con = AllOf(Endpoints(first=c[v]), con)
    cons = {u: Endpoints(first=c[u]) for u in range(net.n) if u != v}
    cons[v] = con
    return check_spec(net, Specification(t, cons), **kw)


def solve_predecessor(net: Network, c, t: int, **kw) -> Verdict:
    """Is there y with F^t(y) = c? The predecessor is re-simulated before returning."""
    _need_deterministic(net, "predecessor")
    c = check_configuration(net, c)
    spec = Specification(t, {u: Endpoints(last=c[u]) for u in range(net.n)})
    kw.setdefault("witness", True)
    verdict = check_spec(net, spec, **kw)
    if verdict.satisfiable and verdict.witness is not None:
        y = verdict.witness.configs[0]
        if orbit(net, y, t).configs[-1] != c:
            raise WitnessError("predecessor does not map onto the target")
        verdict.stats["predecessor"] = list(y)
    return verdict


def nilpotency_horizon(net: Network) -> int:
    return max_orbit_length(net.n, len(net.alphabet), net.n)


def solve_nilpotency(net: Network, jobs: int = 1, method: str = "fixed-points", **kw) -> Verdict:
    """Nilpotent iff at the horizon every node can end in exactly one state.

    With method "fixed-points" (default) the horizon-t* image is computed as
    the set of fixed points: a deterministic freezing orbit is stationary after
    n*height steps and every fixed point is its own image, so both sets agree.
    Each (node, state) question is then a t=1 check with constant traces.
    Method "horizon" runs the same questions at the full horizon t*.
    """
    _need_deterministic(net, "nilpotency")
    if method not in ("fixed-points", "horizon"):
        raise ValueError(f"unknown nilpotency method {method!r}")
    d = kw.pop("decomposition", None) or default_decomposition(net.graph)
    kw.pop("witness", None)
    states = list(net.alphabet.states)
    tasks = [(s, q) for s in range(net.n) for q in states]
    if method == "horizon":
        t = nilpotency_horizon(net)
        base = {}
    else:
        t = 1
        still = TraceSet(RleTrace.constant(q, 1) for q in states)
        base = {u: still for u in range(net.n)}

    def reachable_end(task):
        s, q = task
        cons = dict(base)
        cons[s] = TraceSet([RleTrace.constant(q, 1)]) if base else Endpoints(last=q)
        return check_spec(net, Specification(t, cons), decomposition=d, witness=False, **kw).satisfiable

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            answers = list(pool.map(reachable_end, tasks))
    else:
        answers = [reachable_end(task) for task in tasks]
    ends = {s: [] for s in range(net.n)}
    for (s, q), ok in zip(tasks, answers):
        if ok:
            ends[s].append(q)
    nilpotent = all(len(ends[s]) == 1 for s in ends)
    stats = {"t": t, "method": method, "horizon": nilpotency_horizon(net), "calls": len(tasks),
             "end_states": {str(s): ends[s] for s in ends}}
    if nilpotent:
        stats["fixed_point"] = [ends[s][0] for s in range(net.n)]
    return Verdict(nilpotent, None, stats)


def schedule_from_orbit(orb):
    """Per step, the sorted nodes that changed; steps without change are dropped."""
    out = []
    for a, b in zip(orb.configs, orb.configs[1:]):
        moved = [v for v in range(len(a)) if a[v] != b[v]]
        if moved:
            out.append(moved)
    return out


def replay_schedule(net: Network, c0, schedule):
    """Apply F at the listed nodes step by step; returns the visited configurations."""
    x = tuple(c0)
    seen = [x]
    for nodes in schedule:
        full = step_deterministic(net, x)
        x = tuple(full[v] if v in set(nodes) else x[v] for v in range(net.n))
        seen.append(x)
    return seen


def solve_async_reachability(net: Network, c0, c1, **kw) -> Verdict:
    """Can c1 be reached from c0 when every node may apply its rule or stall?

    Steps without any change can be removed from an asynchronous run and
    re-added at its end, so changes are searched within the first n*height steps.
    """
    _need_deterministic(net, "asynchronous reachability")
    c0 = check_configuration(net, c0)
    c1 = check_configuration(net, c1)
    lifted = async_lift(net)
    t = nilpotency_horizon(net)
    spec = Specification(t, {u: Endpoints(first=c0[u], last=c1[u]) for u in range(net.n)})
    kw.setdefault("window", max(1, net.n * net.alphabet.height()))
    verdict = check_spec(lifted, spec, **kw)
    if verdict.satisfiable and verdict.witness is not None:
        sched = schedule_from_orbit(verdict.witness)
        seen = replay_schedule(net, c0, sched)
        if seen[-1] != c1:
            raise WitnessError("schedule replay does not reach the target")
        if not all(net.alphabet.leq(a[v], b[v]) for a, b in zip(seen, seen[1:]) for v in range(net.n)):
            raise WitnessError("schedule replay is not monotone")
        verdict.stats["schedule"] = sched
    return verdict
