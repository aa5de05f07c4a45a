# Same memory, different sampling schemes.
#
# A fixed-probability sampler uses whatever memory the coin flips give it.
# We run it first, note its final sample size M', then give the reservoir
# estimators exactly M' edges and compare mean absolute percentage errors.

from triest.harness import matched_memory, matched_summary
from triest.stream import erdos_renyi, reorder

g = reorder(erdos_renyi(200, 0.1, seed=4), "bfs", seed=4)
for p in (0.05, 0.1, 0.2):
    rows = matched_memory(g, p, trials=5, seed=11, cadence=10)
    s = matched_summary(rows)
    print(f"p={p}: M'~{sum(r.M_prime for r in rows) / len(rows):.0f}")
    print(f"   basic    {s['mascot_c']:.4f} -> {s['triest_base']:.4f} ({100 * s['change_basic']:+.1f}%)")
    print(f"   improved {s['mascot_i']:.4f} -> {s['triest_impr']:.4f} ({100 * s['change_improved']:+.1f}%)")
