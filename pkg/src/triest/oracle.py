"""Exact triangle counting and the pair statistics used by the variance formulas."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .stream import DELETE, INSERT, EdgeEvent, StreamError, StreamSpec

__all__ = [
    "ExactCounter",
    "TriangleStats",
    "OracleError",
    "pair_stats",
    "z_stat",
    "count_triangles",
    "triangle_counts_over_time",
]


class OracleError(StreamError):
    pass


class ExactCounter:
    """Stores the whole (multi)graph and keeps exact global/local triangle counts.

    On each effective insertion or deletion of ``{u, v}`` the global count and
    the counts of ``u`` and ``v`` move by ``sum_c y(c,u) * y(c,v)`` and each
    common neighbour ``c`` by its own product, where ``y`` counts parallel
    edges (always 1 for simple graphs).
    """

    name = "exact"
    insertion_only = False

    def __init__(self, multigraph=False, seed=None, M=None):
        self.multigraph = multigraph
        self.adj: dict[int, dict[int, int]] = {}
        self.present: set = set()
        self.total = 0
        self.locals: dict[int, int] = {}
        self.t = 0

    def _key(self, u, v, label):
        if u > v:
            u, v = v, u
        if self.multigraph:
            if label is None:
                raise ValueError("multigraph oracle needs edge labels")
            return (u, v, label)
        return (u, v)

    def _closing(self, u, v):
        nu = self.adj.get(u)
        nv = self.adj.get(v)
        if not nu or not nv:
            return []
        if len(nu) > len(nv):
            nu, nv = nv, nu
        return [(c, m * nv[c]) for c, m in nu.items() if c in nv]

    def _bump(self, x, amount):
        val = self.locals.get(x, 0) + amount
        if val:
            self.locals[x] = val
        else:
            del self.locals[x]

    def _apply(self, sign, u, v):
        shared = self._closing(u, v)
        tot = 0
        for c, y in shared:
            tot += y
            self._bump(c, sign * y)
        if tot:
            self.total += sign * tot
            self._bump(u, sign * tot)
            self._bump(v, sign * tot)

    def _link(self, u, v, step):
        for a, b in ((u, v), (v, u)):
            na = self.adj.setdefault(a, {})
            m = na.get(b, 0) + step
            if m:
                na[b] = m
            else:
                del na[b]
                if not na:
                    del self.adj[a]

    def insert(self, u, v, label=None):
        key = self._key(u, v, label)
        if key in self.present:
            raise OracleError(f"insertion of present edge {key} at event {self.t}")
        self.t += 1
        self._apply(1, key[0], key[1])
        self.present.add(key)
        self._link(key[0], key[1], 1)

    def delete(self, u, v, label=None):
        key = self._key(u, v, label)
        if key not in self.present:
            raise OracleError(f"deletion of absent edge {key} at event {self.t}")
        self.t += 1
        self.present.discard(key)
        self._link(key[0], key[1], -1)
        self._apply(-1, key[0], key[1])

    def process(self, event: EdgeEvent):
        if event.op == INSERT:
            self.insert(event.u, event.v, event.label)
        elif event.op == DELETE:
            self.delete(event.u, event.v, event.label)
        else:
            raise ValueError(f"bad op {event.op!r}")

    def process_stream(self, stream):
        for e in stream:
            self.process(e)

    # estimator-compatible queries
    def estimate_global(self) -> float:
        return float(self.total)

    def estimate_local(self, u) -> float:
        return float(self.locals.get(u, 0))

    def locals_snapshot(self) -> dict[int, float]:
        return {u: float(x) for u, x in self.locals.items()}

    def multiplicity(self, u, v) -> int:
        return self.adj.get(u, {}).get(v, 0)


@dataclass
class TriangleStats:
    total: int
    locals: dict = field(default_factory=dict)
    r: int = 0
    w: int = 0
    h: int = 0
    r1: int = 0
    r2: int = 0
    q: int = 0
    z: int | None = None

    def as_dict(self):
        out = asdict(self)
        out["locals"] = {str(k): v for k, v in sorted(self.locals.items())}
        return out


def _as_counter(graph) -> ExactCounter:
    if isinstance(graph, ExactCounter):
        return graph
    if isinstance(graph, StreamSpec):
        oc = ExactCounter(multigraph=graph.mode == "multigraph")
        oc.process_stream(graph)
        return oc
    raise TypeError("pair_stats needs an ExactCounter or a StreamSpec")


def pair_stats(graph) -> TriangleStats:
    """Global count, local counts and triangle-pair classes of a (multi)graph.

    ``r``/``r1`` count unordered pairs of triangles sharing exactly one edge,
    ``r2`` pairs sharing two edges (multigraphs only), ``w``/``q`` pairs
    sharing none; ``h`` is the largest number of triangles on one edge copy.
    """
    oc = _as_counter(graph)
    adj = oc.adj
    one_edge_sum = 0  # sum over edge copies of C(triangles on the copy, 2)
    r2 = 0
    h = 0
    total = 0
    for u, nu in adj.items():
        for v, m_uv in nu.items():
            if v <= u:
                continue
            nv = adj[v]
            small, big = (nu, nv) if len(nu) <= len(nv) else (nv, nu)
            k = 0
            for c in small:
                if c in big:
                    m_uc, m_vc = nu[c], nv[c]
                    k += m_uc * m_vc
                    if c > v:
                        total += m_uv * m_uc * m_vc
                        r2 += (
                            m_uv * m_uc * math.comb(m_vc, 2)
                            + m_uv * m_vc * math.comb(m_uc, 2)
                            + m_uc * m_vc * math.comb(m_uv, 2)
                        )
            if k:
                one_edge_sum += m_uv * math.comb(k, 2)
                h = max(h, k)
    r1 = one_edge_sum - 2 * r2
    q = math.comb(total, 2) - r1 - r2
    return TriangleStats(
        total=total,
        locals=dict(oc.locals),
        r=r1,
        w=q,
        h=h,
        r1=r1,
        r2=r2,
        q=q,
    )


def count_triangles(stream: StreamSpec) -> int:
    oc = ExactCounter(multigraph=stream.mode == "multigraph")
    oc.process_stream(stream)
    return oc.total


def triangle_counts_over_time(stream: StreamSpec):
    """Exact global count after every event, as a list."""
    oc = ExactCounter(multigraph=stream.mode == "multigraph")
    out = []
    for e in stream:
        oc.process(e)
        out.append(oc.total)
    return out


def z_stat(stream: StreamSpec, M: int, t: int | None = None) -> int:
    """Order-dependent pair count entering the improved estimator's variance bound.

    Counts unordered pairs of triangles of ``G(t)`` that share an edge ``g``
    such that ``g`` is the last-arriving edge of neither triangle and both
    triangles were completed after time ``M + 1``.
    """
    if not stream.insertion_only:
        raise OracleError("z needs an insertion-only stream")
    if stream.mode != "graph":
        raise OracleError("z is defined for simple graphs")
    n = len(stream) if t is None else min(t, len(stream))
    arrival = {}
    adj: dict[int, set] = {}
    for i, (a, b) in enumerate(zip(stream.u[:n].tolist(), stream.v[:n].tolist()), 1):
        arrival[(a, b)] = i
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    eligible: dict[tuple, int] = {}
    for (a, b), _ in arrival.items():
        for c in adj[a] & adj[b]:
            if c <= b:
                continue
            edges = ((a, b), (a, c), (b, c))
            times = [arrival[e] for e in edges]
            t_last = max(times)
            if t_last <= M + 1:
                continue
            for e, te in zip(edges, times):
                if te != t_last:
                    eligible[e] = eligible.get(e, 0) + 1
    return sum(math.comb(k, 2) for k in eligible.values())
