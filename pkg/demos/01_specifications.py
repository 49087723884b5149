# Checking trace specifications on a small freezing network.
#
# The OR rule on a path: a node switches to 1 as soon as a neighbour holds 1,
# and never switches back.  We ask questions about whole orbits through
# per-node constraints and let the tree-decomposition solver answer.

# %%
from freezenet import Specification, check_spec, or_network, orbit, path_graph
from freezenet.oracle import brute_check_spec
from freezenet.traces import Endpoints
from freezenet.treedecomp import default_decomposition

net = or_network(path_graph(5))
print(orbit(net, (1, 0, 0, 0, 0), 4).configs)

# %%
# Can the middle node end at 1 after two steps while both ends start at 0?
spec = Specification(2, {0: Endpoints(first=0), 2: Endpoints(last=1), 4: Endpoints(first=0)})
verdict = check_spec(net, spec)
print("satisfiable:", verdict.satisfiable)
for config in verdict.witness.configs:
    print("  ", config)

# %%
# Start from a single 1 at node 0 and ask for node 4 to hold 1 at time 2.
# Impossible: a 1 spreads one node per round.
cons = {v: Endpoints(first=int(v == 0)) for v in range(4)}
cons[4] = Endpoints(first=0, last=1)
spec = Specification(2, cons)
print("satisfiable:", check_spec(net, spec).satisfiable, "| brute force:", brute_check_spec(net, spec))

# %%
# The decomposition drives the dynamic programme; levels of bags run in
# parallel.  A balanced decomposition keeps the number of levels logarithmic.
d = default_decomposition(net.graph, balance=True)
print(d, check_spec(net, spec, decomposition=d, jobs=2).stats["levels_run"], "levels")
