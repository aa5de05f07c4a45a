"""Fixed-memory streaming estimators of global and local triangle counts.

Three algorithms share one counter/sample core:

* :class:`TriestBase` - reservoir sample, counters track the triangles of the
  sampled subgraph exactly, estimate rescaled by the inverse third-order
  inclusion probability.
* :class:`TriestImpr` - counters are bumped for every arriving edge before the
  sampling decision, weighted by ``eta(t)``, and never decremented.
* :class:`TriestFD` - random pairing over fully-dynamic streams.

Each accepts ``multigraph=True``; the sample then becomes a bag of labelled
edge copies and counter updates weigh each shared neighbour ``c`` by
``copies(c,u) * copies(c,v)``.
"""

from __future__ import annotations

import random

from . import theory
from .sample import EdgeSample
from .stream import DELETE, INSERT, EdgeEvent, UnsupportedStreamError

__all__ = [
    "CounterBank",
    "TriangleEstimator",
    "TriestBase",
    "TriestImpr",
    "TriestFD",
    "make_estimator",
    "ALGORITHMS",
]


class CounterBank:
    """Global counter plus sparse per-vertex counters that vanish at zero."""

    __slots__ = ("tau", "locals")

    def __init__(self):
        self.tau = 0
        self.locals: dict[int, float] = {}

    def add(self, x, amount):
        loc = self.locals
        val = loc.get(x, 0) + amount
        if val:
            loc[x] = val
        else:
            del loc[x]


class TriangleEstimator:
    """Shared state and counter maintenance. Subclasses implement the sampling policy."""

    name = "abstract"
    insertion_only = True
    min_memory = 6

    def __init__(self, M=None, seed=None, multigraph=False, capacity=None):
        if M is not None:
            if M < self.min_memory:
                raise ValueError(f"memory M must be >= {self.min_memory}, got {M}")
        self.M = M
        self.multigraph = multigraph
        self.seed = seed
        self.rng = random.Random(seed)
        self.sample = EdgeSample(capacity=capacity if capacity is not None else M, multigraph=multigraph)
        self.counters = CounterBank()
        self.t = 0

    # -- counter maintenance -------------------------------------------

    def update_counters(self, sign, u, v, weight=1):
        """Apply ``sign * weight * y_c`` to tau, tau_c, tau_u, tau_v for each shared neighbour c.

        Must run while ``(u, v)`` itself is not being counted, i.e. the
        neighbourhood never contains ``u`` or ``v``.
        """
        shared = self.sample.shared_neighborhood(u, v)
        if not shared:
            return
        bank = self.counters
        add = bank.add
        step = sign * weight
        total = 0
        for c, yu, yv in shared:
            y = yu * yv
            total += y
            add(c, step * y)
        total *= step
        bank.tau += total
        add(u, total)
        add(v, total)

    # -- stream interface ------------------------------------------------

    def _key(self, u, v, label):
        if u > v:
            u, v = v, u
        if self.multigraph:
            if label is None:
                raise ValueError("multigraph estimators need edge labels")
            return (u, v, label)
        return (u, v)

    def process(self, event: EdgeEvent) -> None:
        if event.op == INSERT:
            self.insert(event.u, event.v, event.label)
        elif event.op == DELETE:
            self.delete(event.u, event.v, event.label)
        else:
            raise ValueError(f"bad op {event.op!r}")

    def insert(self, u, v, label=None):
        raise NotImplementedError

    def delete(self, u, v, label=None):
        raise UnsupportedStreamError(f"{self.name} handles insertion-only streams")

    def process_stream(self, stream) -> None:
        for e in stream:
            self.process(e)

    # -- queries -----------------------------------------------------------

    def scale(self) -> float:
        return 1.0

    def estimate_global(self) -> float:
        return self.scale() * self.counters.tau

    def estimate_local(self, u) -> float:
        val = self.counters.locals.get(u, 0)
        return self.scale() * val if val else 0.0

    def locals_snapshot(self) -> dict[int, float]:
        k = self.scale()
        return {u: k * x for u, x in self.counters.locals.items()}


class TriestBase(TriangleEstimator):
    """Reservoir sampling; the counters equal the triangle counts of the sample."""

    name = "base"

    def insert(self, u, v, label=None):
        key = self._key(u, v, label)
        self.t = t = self.t + 1
        M = self.M
        sample = self.sample
        if t > M:
            if self.rng.random() * t >= M:
                return
            victim = sample.uniform_edge(self.rng)
            sample.remove(victim)
            self.update_counters(-1, victim[0], victim[1])
        self.update_counters(1, key[0], key[1])
        sample.insert(key)

    def scale(self) -> float:
        t = self.t
        return 1.0 if t <= self.M else theory.xi(3, t, self.M)


class TriestImpr(TriangleEstimator):
    """Counts every arriving edge against the current sample with weight ``eta(t)``."""

    name = "impr"

    def insert(self, u, v, label=None):
        key = self._key(u, v, label)
        self.t = t = self.t + 1
        M = self.M
        self.update_counters(1, key[0], key[1], theory.eta(t, M))
        sample = self.sample
        if t > M:
            if self.rng.random() * t >= M:
                return
            sample.remove(sample.uniform_edge(self.rng))
        sample.insert(key)


class TriestFD(TriangleEstimator):
    """Random pairing: deletions are compensated by later insertions.

    ``d_i`` (``d_o``) counts uncompensated deletions of edges that were (were
    not) in the sample. While both are zero the sample is a plain reservoir
    over the ``s`` live edges, so a new edge is kept with probability ``M/s``.
    """

    name = "fd"
    insertion_only = False

    def __init__(self, M=None, seed=None, multigraph=False):
        super().__init__(M, seed, multigraph)
        self.s = 0
        self.d_i = 0
        self.d_o = 0
        self._kappa_key = None
        self._kappa_val = 1.0

    def insert(self, u, v, label=None):
        key = self._key(u, v, label)
        self.t += 1
        self.s = s = self.s + 1
        sample = self.sample
        d = self.d_i + self.d_o
        if d == 0:
            if len(sample) >= self.M:
                if self.rng.random() * s >= self.M:
                    return
                victim = sample.uniform_edge(self.rng)
                sample.remove(victim)
                self.update_counters(-1, victim[0], victim[1])
        elif self.rng.random() * d < self.d_i:
            self.d_i -= 1
        else:
            self.d_o -= 1
            return
        self.update_counters(1, key[0], key[1])
        sample.insert(key)

    def delete(self, u, v, label=None):
        key = self._key(u, v, label)
        self.t += 1
        self.s -= 1
        if key in self.sample:
            self.sample.remove(key)
            self.update_counters(-1, key[0], key[1])
            self.d_i += 1
        else:
            self.d_o += 1

    def kappa(self) -> float:
        state = (self.s, self.d_i, self.d_o)
        if state != self._kappa_key:
            self._kappa_key = state
            self._kappa_val = theory.kappa(self.s, self.d_i, self.d_o, self.M)
        return self._kappa_val

    def scale(self) -> float:
        m = len(self.sample)
        if m < 3:
            return 0.0
        s = self.s
        if s == m:
            return 1.0 / self.kappa()
        return theory.psi(3, m, s) / self.kappa()

    def estimate_local(self, u) -> float:
        if len(self.sample) < 3:
            return 0.0
        return super().estimate_local(u)

    def locals_snapshot(self):
        if len(self.sample) < 3:
            return {}
        return super().locals_snapshot()


ALGORITHMS = {
    "base": (TriestBase, False),
    "impr": (TriestImpr, False),
    "fd": (TriestFD, False),
    "base-m": (TriestBase, True),
    "impr-m": (TriestImpr, True),
    "fd-m": (TriestFD, True),
}


def make_estimator(algo: str, M: int, seed=None) -> TriangleEstimator:
    try:
        cls, multi = ALGORITHMS[algo]
    except KeyError:
        raise ValueError(f"unknown algorithm {algo!r}") from None
    return cls(M, seed=seed, multigraph=multi)
