# Prediction, predecessor, nilpotency and asynchronous reachability.
#
# Each problem is phrased as a specification and answered by the same solver;
# the brute-force oracle gives the reference answer on these tiny inputs.

# %%
from freezenet import constant_network, cycle_graph, or_network, path_graph, threshold_network
from freezenet.oracle import brute_async_reach, brute_nilpotency, brute_predecessor
from freezenet.problems import (solve_async_reachability, solve_nilpotency, solve_predecessor,
                                solve_prediction)

# %%
# prediction: starting from (1,0,0), is node 2 at 1 by time 2?
net = or_network(path_graph(3))
print(solve_prediction(net, (1, 0, 0), 2, [(0, 0, 1), (0, 1, 1)], 2).satisfiable)

# %%
# predecessor: OR on two nodes can produce (1,1) but never (1,0)
p2 = or_network(path_graph(2))
for target in [(1, 1), (1, 0)]:
    v = solve_predecessor(p2, target, 1)
    print(target, v.satisfiable, v.stats.get("predecessor"), brute_predecessor(p2, target, 1))

# %%
# nilpotency: a constant rule always lands on all-ones, OR does not
for net in [constant_network(cycle_graph(5)), or_network(cycle_graph(5)), threshold_network(cycle_graph(5), 2)]:
    v = solve_nilpotency(net)
    print(net.name, v.satisfiable, brute_nilpotency(net))

# %%
# asynchronous reachability, with the update schedule that gets there
v = solve_async_reachability(or_network(path_graph(4)), (1, 0, 0, 0), (1, 1, 1, 0))
print(v.satisfiable, v.stats["schedule"], brute_async_reach(or_network(path_graph(4)), (1, 0, 0, 0), (1, 1, 1, 0)))
