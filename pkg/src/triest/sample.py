"""The bounded edge sample kept by the streaming estimators."""

from __future__ import annotations

__all__ = ["EdgeSample", "SampleInvariantError"]


class SampleInvariantError(RuntimeError):
    """A caller broke the sample's contract (duplicate, absent edge, overflow)."""


class EdgeSample:
    """Dynamic subgraph with O(1) uniform edge selection.

    ``adj[u][v]`` is the number of stored copies of the pair ``{u, v}``.
    Edges are keyed by ``(u, v)`` in graph mode and ``(u, v, label)`` in
    multigraph mode, always with ``u < v``. A dense list of keys mirrors the
    adjacency so a uniform copy can be drawn by index; removal swaps the last
    key into the hole.
    """

    __slots__ = ("multigraph", "capacity", "adj", "_keys", "_pos")

    def __init__(self, capacity=None, multigraph=False):
        if capacity is not None and capacity < 1:
            raise ValueError("capacity must be positive")
        self.multigraph = multigraph
        self.capacity = capacity
        self.adj: dict[int, dict[int, int]] = {}
        self._keys: list[tuple] = []
        self._pos: dict[tuple, int] = {}

    def __len__(self):
        return len(self._keys)

    @property
    def edge_count(self) -> int:
        return len(self._keys)

    def __contains__(self, key) -> bool:
        return key in self._pos

    def __iter__(self):
        return iter(list(self._keys))

    def multiplicity(self, u, v) -> int:
        nu = self.adj.get(u)
        return 0 if nu is None else nu.get(v, 0)

    def insert(self, key) -> None:
        if key in self._pos:
            raise SampleInvariantError(f"edge {key} already in sample")
        if self.capacity is not None and len(self._keys) >= self.capacity:
            raise SampleInvariantError("sample capacity exceeded")
        u, v = key[0], key[1]
        self._pos[key] = len(self._keys)
        self._keys.append(key)
        adj = self.adj
        nu = adj.get(u)
        if nu is None:
            adj[u] = {v: 1}
        else:
            nu[v] = nu.get(v, 0) + 1
        nv = adj.get(v)
        if nv is None:
            adj[v] = {u: 1}
        else:
            nv[u] = nv.get(u, 0) + 1

    def remove(self, key) -> None:
        pos = self._pos.pop(key, None)
        if pos is None:
            raise SampleInvariantError(f"edge {key} not in sample")
        keys = self._keys
        last = keys.pop()
        if pos < len(keys):
            keys[pos] = last
            self._pos[last] = pos
        u, v = key[0], key[1]
        self._unlink(u, v)
        self._unlink(v, u)

    def _unlink(self, u, v):
        nu = self.adj[u]
        m = nu[v] - 1
        if m:
            nu[v] = m
        else:
            del nu[v]
            if not nu:
                del self.adj[u]

    def shared_neighborhood(self, u, v) -> list[tuple[int, int, int]]:
        """``(c, copies of {c,u}, copies of {c,v})`` for every common neighbour ``c``."""
        nu = self.adj.get(u)
        nv = self.adj.get(v)
        if nu is None or nv is None:
            return []
        if len(nu) <= len(nv):
            return [(c, m, nv[c]) for c, m in nu.items() if c in nv]
        return [(c, nu[c], m) for c, m in nv.items() if c in nu]

    def uniform_edge(self, rng):
        """A stored edge copy chosen uniformly at random (``rng`` is a ``random.Random``)."""
        n = len(self._keys)
        if n == 0:
            raise SampleInvariantError("cannot draw from an empty sample")
        i = int(rng.random() * n)
        return self._keys[i if i < n else n - 1]

    def edges(self) -> list[tuple]:
        return list(self._keys)
