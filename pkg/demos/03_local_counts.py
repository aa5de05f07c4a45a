# Per-vertex triangle counts with a memory of a quarter of the edges.
#
# Local estimates are scaled copies of sparse per-vertex counters. We compare
# them with the exact counts using the Pearson coefficient and the mean
# relative error |truth - est| / (truth + 1).

from triest.harness import AlgoSpec, run_trace, truth_trace
from triest.metrics import eps_error, local_pearson
from triest.stream import erdos_renyi

g = erdos_renyi(120, 0.25, seed=2)
M = len(g) // 4
print("edges", len(g), "memory", M)

truth = truth_trace(g, [len(g)], with_locals=True).locals[-1]
for algo in ("base", "impr"):
    tr = run_trace(AlgoSpec(algo, M).build(seed=5), g, [len(g)], with_locals=True)
    est = tr.locals[-1]
    print(f"{algo}: pearson {local_pearson(truth, est):.3f}  eps-error {eps_error(truth, est):.3f}")

top = sorted(truth, key=truth.get, reverse=True)[:5]
tr = run_trace(AlgoSpec("impr", M).build(seed=5), g, [len(g)], with_locals=True)
for v in top:
    print(f"vertex {v}: exact {truth[v]:.0f}, estimate {tr.locals[-1].get(v, 0.0):.1f}")
