# Hardness gadgets: dominating set on a grid, and circuits routed through a bramble.

# %%
import random

from freezenet.core import Graph, path_graph, star_graph
from freezenet.gadgets import (Digraph, dominating_set_gadget, grid_host, parse_circuit, route,
                               routed_prediction_gadget, sat_nilpotency_gadget)
from freezenet.oracle import brute_dominating_set

# %%
# The dominating-set gadget accepts exactly when the graph has a dominating
# set of size k.  Its satisfiability is decided by simulating marked grids.
for g, k in [(star_graph(3), 1), (path_graph(4), 1), (path_graph(4), 2)]:
    gad = dominating_set_gadget(g, k)
    print(g.edges, k, gad.satisfying_selection(), brute_dominating_set(g, k), "host nodes:", gad.host.n)

# %%
# Routing a directed triangle through the row+column bramble of a 3x3 grid
g, b = grid_host(3)
emb = route(g, b, Digraph(3, [(0, 1), (1, 2), (2, 0)]))
print(emb.mu, emb.paths, "max load", emb.max_load())

# %%
# A satisfiable circuit gives a bottom-free fixed point; a contradiction does not.
# Random starts violate some gate check and collapse to all-bottom either way.
rng = random.Random(0)
for text in ["x | y", "x & ~x"]:
    c = parse_circuit(text)
    g, b = grid_host(max(2, len(c)))
    gad = sat_nilpotency_gadget(c, g, b)
    fp = gad.bot_free_fixed_point()
    ends = {gad.run_to_fixed_point(gad.random_configuration(rng)) == gad.bottom() for _ in range(20)}
    print(text, "fixed point from", fp[0] if fp else None, "| random starts reach bottom:", ends)

# %%
# Monotone circuits evaluate themselves: read the output channel after t steps.
c = parse_circuit("(x | y) & z")
g, b = grid_host(len(c))
gad = routed_prediction_gadget(c, g, b, samples=50)
for bits in [(1, 0, 1), (0, 0, 1), (1, 1, 0)]:
    print(bits, gad.simulate(bits), c.output(bits))
