"""Fixed-probability edge-sampling baselines (MASCOT-C and MASCOT-I).

Both keep every edge independently with probability ``p`` and therefore have
no bound on memory. Each insertion consumes exactly one uniform draw, so a C
and an I instance with the same seed keep identical samples run by run.
"""

from __future__ import annotations

from .estimators import TriangleEstimator

__all__ = ["MascotC", "MascotI", "make_mascot"]


class _Mascot(TriangleEstimator):
    def __init__(self, p, seed=None, multigraph=False):
        if not 0 < p <= 1:
            raise ValueError(f"p must be in (0, 1], got {p}")
        super().__init__(None, seed=seed, multigraph=multigraph)
        self.p = p


class MascotC(_Mascot):
    """Counts triangles of the sample; estimate is ``tau / p**3``."""

    name = "mascot-c"

    def insert(self, u, v, label=None):
        key = self._key(u, v, label)
        self.t += 1
        if self.rng.random() < self.p:
            self.update_counters(1, key[0], key[1])
            self.sample.insert(key)

    def scale(self) -> float:
        return self.p**-3


class MascotI(_Mascot):
    """Counts every arriving edge against the sample with weight ``p**-2``."""

    name = "mascot-i"

    def insert(self, u, v, label=None):
        key = self._key(u, v, label)
        self.t += 1
        self.update_counters(1, key[0], key[1], self.p**-2)
        if self.rng.random() < self.p:
            self.sample.insert(key)


def make_mascot(variant: str, p: float, seed=None, multigraph=False):
    variant = variant.lower().removeprefix("mascot-")
    if variant == "c":
        return MascotC(p, seed, multigraph)
    if variant == "i":
        return MascotI(p, seed, multigraph)
    raise ValueError(f"unknown MASCOT variant {variant!r}")
