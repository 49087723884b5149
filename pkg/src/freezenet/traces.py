"""Run-length traces, sequence encodings over vertex sets, and specifications.

A trace of horizon t has t+1 symbols (times 0..t). Internally the solver works
with the *steps* form ``((0, s0), (c1, s1), ...)``: change times paired with the
state entered at that time.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np


class TraceError(ValueError):
    pass


def _leq(alphabet, a, b):
    if alphabet is not None:
        return alphabet.leq(a, b)
    return a <= b


@dataclass(frozen=True)
class RleTrace:
    """A state history stored as (state, run-length) pairs."""

    runs: tuple

    def __post_init__(self):
        runs = tuple((s, int(k)) for s, k in self.runs)
        if not runs:
            raise TraceError("a trace needs at least one run")
        for i, (s, k) in enumerate(runs):
            if k < 1:
                raise TraceError(f"run {i} has non-positive length {k}")
            if i and runs[i - 1][0] == s:
                raise TraceError(f"runs {i - 1} and {i} repeat state {s!r}")
        object.__setattr__(self, "runs", runs)

    @property
    def t(self) -> int:
        return sum(k for _, k in self.runs) - 1

    @property
    def first(self):
        return self.runs[0][0]

    @property
    def last(self):
        return self.runs[-1][0]

    def states(self) -> tuple:
        return tuple(s for s, _ in self.runs)

    def change_times(self) -> tuple:
        out, c = [], 0
        for _, k in self.runs:
            out.append(c)
            c += k
        return tuple(out)

    def steps(self) -> tuple:
        return tuple(zip(self.change_times(), self.states()))

    def at(self, s: int):
        if not 0 <= s <= self.t:
            raise IndexError(s)
        for c, q in reversed(self.steps()):
            if c <= s:
                return q

    def to_sequence(self) -> tuple:
        return tuple(itertools.chain.from_iterable([s] * k for s, k in self.runs))

    def is_monotone(self, alphabet=None) -> bool:
        st = self.states()
        return all(_leq(alphabet, a, b) for a, b in zip(st, st[1:]))

    def key(self):
        return canonical_key(self)

    @classmethod
    def from_sequence(cls, seq: Sequence) -> "RleTrace":
        seq = list(seq)
        if not seq:
            raise TraceError("empty sequence")
        runs = []
        for s in seq:
            if runs and runs[-1][0] == s:
                runs[-1][1] += 1
            else:
                runs.append([s, 1])
        return cls(tuple((s, k) for s, k in runs))

    @classmethod
    def from_steps(cls, steps, t: int) -> "RleTrace":
        runs = []
        for i, (c, s) in enumerate(steps):
            end = steps[i + 1][0] if i + 1 < len(steps) else t + 1
            runs.append((s, end - c))
        return cls(tuple(runs))

    @classmethod
    def constant(cls, state, t: int) -> "RleTrace":
        return cls(((state, t + 1),))

    def __repr__(self):
        return "RleTrace(" + " ".join(f"{s!r}x{k}" for s, k in self.runs) + ")"


def canonical_key(trace: RleTrace):
    """Injective, process-stable key: (t, runs) as plain tuples."""
    return (trace.t, trace.runs)


def steps_at(steps, s):
    """State of a steps-form trace at time s."""
    q = steps[0][1]
    for c, st in steps:
        if c > s:
            break
        q = st
    return q


# ---------------------------------------------------------------- encodings over vertex sets

@dataclass(frozen=True, eq=False)
class SequenceEncoding:
    """Change times of a multi-node sequence and the cross-section at each of them."""

    nodes: tuple
    times: tuple
    states: np.ndarray
    t: int

    def __eq__(self, other):
        return (isinstance(other, SequenceEncoding) and self.nodes == other.nodes
                and self.times == other.times and self.t == other.t
                and self.states.shape == other.states.shape
                and all(map(tuple.__eq__, map(tuple, self.states), map(tuple, other.states))))

    def __hash__(self):
        return hash((self.nodes, self.times, self.t, tuple(map(tuple, self.states))))

    @property
    def u_count(self):
        return len(self.nodes)

    @property
    def length(self):
        """Number of change times after time 0."""
        return len(self.times) - 1

    def rows(self):
        return [tuple(r) for r in self.states]

    def trace(self, v) -> RleTrace:
        j = self.nodes.index(v)
        steps = []
        for c, row in zip(self.times, self.states):
            if not steps or steps[-1][1] != row[j]:
                steps.append((c, row[j]))
        return RleTrace.from_steps(steps, self.t)


def _columns(S, nodes):
    if isinstance(S, Mapping):
        nodes = tuple(sorted(S)) if nodes is None else tuple(nodes)
        cols = [tuple(S[v]) for v in nodes]
    else:
        cols = [tuple(c) for c in S]
        nodes = tuple(range(len(cols))) if nodes is None else tuple(nodes)
        if len(nodes) != len(cols):
            raise TraceError("node list and columns differ in length")
    return nodes, cols


def encode(S, t: int | None = None, nodes=None, alphabet=None) -> SequenceEncoding:
    """Encode a dense sequence table given as {node: sequence} or a list of columns."""
    nodes, cols = _columns(S, nodes)
    if cols:
        lengths = {len(c) for c in cols}
        if len(lengths) != 1:
            raise TraceError(f"columns have different lengths {sorted(lengths)}")
        (length,) = lengths
        if t is not None and length != t + 1:
            raise TraceError(f"columns have length {length}, expected {t + 1}")
        t = length - 1
    elif t is None:
        raise TraceError("horizon needed for an empty vertex set")
    for v, col in zip(nodes, cols):
        for s in range(1, len(col)):
            if col[s] != col[s - 1] and not _leq(alphabet, col[s - 1], col[s]):
                raise TraceError(f"column of node {v!r} decreases at time {s}")
            if col[s] != col[s - 1] and col[s] in col[:s - 1]:
                raise TraceError(f"column of node {v!r} returns to {col[s]!r} at time {s}")
    times = [0]
    for s in range(1, t + 1):
        if any(col[s] != col[s - 1] for col in cols):
            times.append(s)
    states = np.empty((len(times), len(cols)), dtype=object)
    for i, c in enumerate(times):
        for j, col in enumerate(cols):
            states[i, j] = col[c]
    return SequenceEncoding(nodes, tuple(times), states, t)


def decode(e: SequenceEncoding) -> dict:
    """Dense {node: sequence} table; empty for an empty vertex set."""
    out = {}
    bounds = list(e.times[1:]) + [e.t + 1]
    for j, v in enumerate(e.nodes):
        col = []
        for i, c in enumerate(e.times):
            col.extend([e.states[i, j]] * (bounds[i] - c))
        out[v] = tuple(col)
    return out


def restrict(e: SequenceEncoding, Z) -> SequenceEncoding:
    """Encoding of the sub-table on Z, computed in one pass over the rows."""
    Z = set(Z)
    missing = Z - set(e.nodes)
    if missing:
        raise TraceError(f"nodes {sorted(missing, key=repr)} are not in the encoded set")
    idx = [j for j, v in enumerate(e.nodes) if v in Z]
    nodes = tuple(e.nodes[j] for j in idx)
    sub = e.states[:, idx]
    keep = [0]
    for i in range(1, len(e.times)):
        if any(sub[i, j] != sub[keep[-1], j] for j in range(len(idx))):
            keep.append(i)
    return SequenceEncoding(nodes, tuple(e.times[i] for i in keep), sub[keep, :].copy(), e.t)


def encode_traces(traces: Mapping, t: int) -> SequenceEncoding:
    """Encoding of a {node: RleTrace} assignment."""
    return encode({v: tr.to_sequence() for v, tr in traces.items()}, t=t)


def padded_form(e: SequenceEncoding, q_count: int):
    """Fixed-width layout: times and rows padded to |Q|^|U| entries with sentinel time t."""
    width = q_count ** len(e.nodes)
    times = list(e.times) + [e.t] * (width - len(e.times))
    rows = e.rows() + [e.rows()[-1]] * (width - len(e.times))
    return times, rows


# ---------------------------------------------------------------- specifications

class Constraint:
    """Admissible traces of one node."""

    def admits(self, trace: RleTrace) -> bool:
        raise NotImplementedError

    def admits_steps(self, steps, t) -> bool:
        return self.admits(RleTrace.from_steps(steps, t))

    def first_states(self):
        """States a trace may start in, or None if any."""
        return None

    def explicit(self):
        """The admissible traces as a frozenset, or None if only a predicate is known."""
        return None


class TraceSet(Constraint):
    def __init__(self, traces: Iterable[RleTrace]):
        self.traces = frozenset(traces)
        self._steps = {tr.steps() for tr in self.traces}

    def admits(self, trace):
        return trace in self.traces

    def admits_steps(self, steps, t):
        return tuple(steps) in self._steps

    def first_states(self):
        return {tr.first for tr in self.traces}

    def explicit(self):
        return self.traces

    def __len__(self):
        return len(self.traces)

    def __repr__(self):
        return f"TraceSet({len(self.traces)} traces)"


class Endpoints(Constraint):
    """Traces with a given initial and/or final state."""

    def __init__(self, first=None, last=None):
        self.first, self.last = first, last

    def admits(self, trace):
        return ((self.first is None or trace.first == self.first)
                and (self.last is None or trace.last == self.last))

    def admits_steps(self, steps, t):
        return ((self.first is None or steps[0][1] == self.first)
                and (self.last is None or steps[-1][1] == self.last))

    def first_states(self):
        return None if self.first is None else {self.first}

    def __repr__(self):
        return f"Endpoints(first={self.first!r}, last={self.last!r})"


class StatePredicate(Constraint):
    """Traces whose initial state, every state and final state pass the given tests."""

    def __init__(self, initial: Callable | None = None, every: Callable | None = None,
                 final: Callable | None = None, label="predicate"):
        self.initial, self.every, self.final = initial, every, final
        self.label = label

    def admits(self, trace):
        return self.admits_steps(trace.steps(), trace.t)

    def admits_steps(self, steps, t):
        if self.initial is not None and not self.initial(steps[0][1]):
            return False
        if self.every is not None and not all(self.every(s) for _, s in steps):
            return False
        if self.final is not None and not self.final(steps[-1][1]):
            return False
        return True

    def __repr__(self):
        return f"StatePredicate({self.label})"


class AllOf(Constraint):
    def __init__(self, *parts):
        self.parts = parts

    def admits(self, trace):
        return all(p.admits(trace) for p in self.parts)

    def admits_steps(self, steps, t):
        return all(p.admits_steps(steps, t) for p in self.parts)

    def first_states(self):
        out = None
        for p in self.parts:
            f = p.first_states()
            if f is not None:
                out = set(f) if out is None else out & set(f)
        return out

    def explicit(self):
        for p in self.parts:
            ex = p.explicit()
            if ex is not None:
                return frozenset(tr for tr in ex if self.admits(tr))
        return None


class Specification:
    """Per-node constraints at a fixed horizon; absent nodes are unconstrained."""

    def __init__(self, t: int, constraints: Mapping | None = None, generator=None):
        if t < 0:
            raise TraceError("horizon must be non-negative")
        self.t = t
        self.constraints = dict(constraints or {})
        for v, c in self.constraints.items():
            if isinstance(c, TraceSet):
                for tr in c.traces:
                    if tr.t != t:
                        raise TraceError(f"trace {tr!r} for node {v} has horizon {tr.t}, expected {t}")
        # optional provenance record so large gadget specs can be regenerated instead of listed
        self.generator = generator

    def __repr__(self):
        return f"Specification(t={self.t}, constrained={sorted(self.constraints)})"

    def constraint(self, v):
        return self.constraints.get(v)

    def admits(self, v, trace: RleTrace) -> bool:
        c = self.constraints.get(v)
        return c is None or c.admits(trace)

    def admits_steps(self, v, steps) -> bool:
        c = self.constraints.get(v)
        return c is None or c.admits_steps(steps, self.t)

    def check_nodes(self, n: int):
        bad = [v for v in self.constraints if not (isinstance(v, int) and 0 <= v < n)]
        if bad:
            raise TraceError(f"specification refers to unknown nodes {bad}")


def encode_spec(traces: Mapping, t: int, alphabet=None) -> Specification:
    """Specification from {node: [dense sequences]}; duplicates collapse."""
    cons = {}
    for v, seqs in traces.items():
        out = set()
        for seq in seqs:
            seq = tuple(seq)
            if len(seq) != t + 1:
                raise TraceError(f"sequence for node {v} has length {len(seq)}, expected {t + 1}")
            tr = RleTrace.from_sequence(seq)
            if not tr.is_monotone(alphabet):
                raise TraceError(f"sequence {seq!r} for node {v} is not non-decreasing")
            out.add(tr)
        cons[v] = TraceSet(out)
    return Specification(t, cons)


def monotone_traces(alphabet, t: int, first=None, last=None, max_change_time=None):
    """All non-decreasing traces of horizon t as steps tuples, in a fixed order.

    Changes may only happen at times 1..min(t, max_change_time).
    """
    limit = t if max_change_time is None else min(t, max_change_time)
    for chain in alphabet.chains(first=first, last=last):
        m = len(chain) - 1
        for cs in itertools.combinations(range(1, limit + 1), m):
            yield tuple(zip((0,) + cs, chain))
