# A fully-dynamic stream: a sliding window over a random graph.
#
# Edges arrive in random order and only the most recent W are alive. The
# random-pairing estimator reuses deletions to admit later edges, so its
# sample stays full while the graph churns.

import numpy as np

from triest.harness import AlgoSpec, monte_carlo, query_times, truth_trace
from triest.stream import apply_sliding_window, erdos_renyi, reorder

g = reorder(erdos_renyi(60, 0.25, seed=7), "uar", seed=7)
stream = apply_sliding_window(g, 150)
print("events", len(stream), "deletions", int(np.sum(stream.op < 0)))

times = query_times(len(stream), 50)
truth = truth_trace(stream, times).estimates
rep = monte_carlo(AlgoSpec("fd", 60), stream, 200, seed=3, times=times)

print("    t   truth    mean      sd")
for t, x, m, v in zip(times, truth, rep.mean, rep.var):
    print(f"{t:5d} {x:7.0f} {m:7.1f} {np.sqrt(v):7.1f}")
