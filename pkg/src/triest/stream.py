"""Edge-stream data model: events, parsing, validation, generators and transforms.

A stream is held column-wise (``op``, ``u``, ``v`` and optional ``label`` /
``ts`` arrays) so that synthetic streams with millions of events stay cheap.
Iterating a :class:`StreamSpec` yields :class:`EdgeEvent` tuples.
"""

from __future__ import annotations

import gzip
import io
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

import numpy as np

__all__ = [
    "INSERT",
    "DELETE",
    "EdgeEvent",
    "StreamSpec",
    "StreamError",
    "ParseError",
    "SelfLoopError",
    "UnsupportedStreamError",
    "ValidationReport",
    "parse_event",
    "read_stream",
    "write_stream",
    "validate_stream",
    "gen_insertion_stream",
    "clique",
    "erdos_renyi",
    "reorder",
    "apply_sliding_window",
    "apply_mass_deletion",
]

INSERT = 1
DELETE = -1


class StreamError(ValueError):
    pass


class ParseError(StreamError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class SelfLoopError(ParseError):
    pass


class UnsupportedStreamError(StreamError):
    pass


class EdgeEvent(NamedTuple):
    """One stream element. ``u < v`` always holds."""

    op: int
    u: int
    v: int
    label: int | None = None
    ts: int | None = None

    @property
    def key(self):
        if self.label is None:
            return (self.u, self.v)
        return (self.u, self.v, self.label)


def make_event(op, u, v, label=None, ts=None, lineno=None) -> EdgeEvent:
    if op not in (INSERT, DELETE):
        raise ParseError(f"bad operation {op!r}", lineno)
    if u < 0 or v < 0:
        raise ParseError("vertex ids must be non-negative", lineno)
    if u == v:
        raise SelfLoopError(f"self-loop on vertex {u}", lineno)
    if u > v:
        u, v = v, u
    return EdgeEvent(op, u, v, label, ts)


@dataclass
class StreamSpec:
    """An ordered event sequence stored as parallel numpy columns."""

    op: np.ndarray
    u: np.ndarray
    v: np.ndarray
    label: np.ndarray | None = None
    ts: np.ndarray | None = None
    mode: str = "graph"
    policy: str = "strict"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in ("graph", "multigraph"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.policy not in ("strict", "skip-invalid"):
            raise ValueError(f"unknown policy {self.policy!r}")
        self.op = np.asarray(self.op, dtype=np.int8)
        u = np.asarray(self.u, dtype=np.int64)
        v = np.asarray(self.v, dtype=np.int64)
        if not (len(self.op) == len(u) == len(v)):
            raise ValueError("column lengths differ")
        if np.any(u == v):
            idx = int(np.flatnonzero(u == v)[0])
            raise SelfLoopError(f"self-loop at event {idx}")
        self.u = np.minimum(u, v)
        self.v = np.maximum(u, v)
        if self.label is not None:
            self.label = np.asarray(self.label, dtype=np.int64)
        if self.ts is not None:
            self.ts = np.asarray(self.ts, dtype=np.int64)
        if self.mode == "multigraph" and self.label is None:
            raise ValueError("multigraph streams need labels")

    @classmethod
    def from_events(cls, events: Iterable[EdgeEvent], mode="graph", policy="strict", meta=None):
        events = list(events)
        n = len(events)
        op = np.fromiter((e.op for e in events), dtype=np.int8, count=n)
        u = np.fromiter((e.u for e in events), dtype=np.int64, count=n)
        v = np.fromiter((e.v for e in events), dtype=np.int64, count=n)
        label = ts = None
        if n and all(e.label is not None for e in events):
            label = np.fromiter((e.label for e in events), dtype=np.int64, count=n)
        elif mode == "multigraph" and n:
            raise ValueError("multigraph streams need labels on every event")
        if n and all(e.ts is not None for e in events):
            ts = np.fromiter((e.ts for e in events), dtype=np.int64, count=n)
        if n == 0 and mode == "multigraph":
            label = np.zeros(0, dtype=np.int64)
        return cls(op, u, v, label, ts, mode=mode, policy=policy, meta=dict(meta or {}))

    @classmethod
    def from_edges(cls, edges, mode="graph", labels=None, ts=None, meta=None):
        """Insertion-only stream from a sequence of ``(u, v)`` pairs."""
        arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        op = np.ones(len(arr), dtype=np.int8)
        if mode == "multigraph" and labels is None:
            labels = np.zeros(len(arr), dtype=np.int64)
        return cls(op, arr[:, 0], arr[:, 1], labels, ts, mode=mode, meta=dict(meta or {}))

    def __len__(self):
        return len(self.op)

    def __iter__(self) -> Iterator[EdgeEvent]:
        n = len(self)
        chunk = 1 << 16
        for start in range(0, n, chunk):
            stop = min(n, start + chunk)
            ops = self.op[start:stop].tolist()
            us = self.u[start:stop].tolist()
            vs = self.v[start:stop].tolist()
            labels = self.label[start:stop].tolist() if self.label is not None else [None] * (stop - start)
            tss = self.ts[start:stop].tolist() if self.ts is not None else [None] * (stop - start)
            yield from map(EdgeEvent, ops, us, vs, labels, tss)

    def __getitem__(self, i) -> EdgeEvent:
        if isinstance(i, slice):
            return self.take(np.arange(len(self))[i])
        return EdgeEvent(
            int(self.op[i]),
            int(self.u[i]),
            int(self.v[i]),
            None if self.label is None else int(self.label[i]),
            None if self.ts is None else int(self.ts[i]),
        )

    def take(self, idx) -> "StreamSpec":
        idx = np.asarray(idx, dtype=np.int64)
        return StreamSpec(
            self.op[idx],
            self.u[idx],
            self.v[idx],
            None if self.label is None else self.label[idx],
            None if self.ts is None else self.ts[idx],
            mode=self.mode,
            policy=self.policy,
            meta=dict(self.meta),
        )

    @property
    def insertion_only(self) -> bool:
        return bool(np.all(self.op == INSERT))

    def keys(self):
        """Per-event edge identity: ``(u, v)`` or ``(u, v, label)``."""
        if self.mode == "multigraph":
            return list(zip(self.u.tolist(), self.v.tolist(), self.label.tolist()))
        return list(zip(self.u.tolist(), self.v.tolist()))

    def __eq__(self, other):
        if not isinstance(other, StreamSpec):
            return NotImplemented

        def same(a, b):
            if a is None or b is None:
                return a is None and b is None
            return np.array_equal(a, b)

        return (
            self.mode == other.mode
            and same(self.op, other.op)
            and same(self.u, other.u)
            and same(self.v, other.v)
            and same(self.label, other.label)
            and same(self.ts, other.ts)
        )


# --------------------------------------------------------------------------
# text format


def parse_event(line: str, mode: str = "graph", lineno: int | None = None) -> EdgeEvent:
    """Parse ``SIGN U V [LABEL] [TS]``; the label field exists only in multigraph mode."""
    parts = line.split()
    if not parts:
        raise ParseError("empty line", lineno)
    sign = parts[0]
    if sign == "+":
        op = INSERT
    elif sign == "-":
        op = DELETE
    else:
        raise ParseError(f"expected '+' or '-', got {sign!r}", lineno)
    nfix = 4 if mode == "multigraph" else 3
    if len(parts) < nfix or len(parts) > nfix + 1:
        raise ParseError(f"expected {nfix} or {nfix + 1} fields, got {len(parts)}", lineno)
    try:
        nums = [int(x) for x in parts[1:]]
    except ValueError as exc:
        raise ParseError(str(exc), lineno) from None
    u, v = nums[0], nums[1]
    label = nums[2] if mode == "multigraph" else None
    ts = nums[nfix - 1] if len(parts) == nfix + 1 else None
    return make_event(op, u, v, label, ts, lineno=lineno)


def _open_text(path):
    path = str(path)
    if path == "-":
        import sys

        return io.TextIOWrapper(sys.stdin.buffer, encoding="utf-8")
    if path.endswith(".gz"):
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, encoding="utf-8")


def read_stream(path, mode="graph", policy="strict") -> StreamSpec:
    """Read a text stream file (gzip if the name ends in ``.gz``)."""
    events = []
    with _open_text(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            events.append(parse_event(s, mode, lineno))
    return StreamSpec.from_events(events, mode=mode, policy=policy)


def format_event(e: EdgeEvent) -> str:
    fields = ["+" if e.op == INSERT else "-", str(e.u), str(e.v)]
    if e.label is not None:
        fields.append(str(e.label))
    if e.ts is not None:
        fields.append(str(e.ts))
    return " ".join(fields)


def write_stream(spec: StreamSpec, fh) -> None:
    for e in spec:
        fh.write(format_event(e) + "\n")


# --------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    ok: bool
    first_violation: int | None = None
    reason: str | None = None
    dropped: int = 0
    stream: StreamSpec | None = None


def validate_stream(spec: StreamSpec, policy: str | None = None) -> ValidationReport:
    """Replay ``spec`` against a presence set and check every operation has effect.

    With the ``skip-invalid`` policy the ineffective events are removed and the
    filtered stream is returned in the report.
    """
    policy = policy or spec.policy
    present = set()
    keep = []
    first = reason = None
    for i, (op, key) in enumerate(zip(spec.op.tolist(), spec.keys())):
        if op == INSERT:
            bad = key in present
            why = "insertion of an edge already present"
        else:
            bad = key not in present
            why = "deletion of an absent edge"
        if bad:
            if first is None:
                first, reason = i, why
            if policy == "strict":
                return ValidationReport(False, first, reason)
            continue
        if op == INSERT:
            present.add(key)
        else:
            present.discard(key)
        keep.append(i)
    if policy == "strict":
        return ValidationReport(True, stream=spec)
    filtered = spec.take(keep)
    filtered.policy = "strict"
    dropped = len(spec) - len(keep)
    return ValidationReport(dropped == 0, first, reason, dropped, filtered)


# --------------------------------------------------------------------------
# generators


def clique(n: int) -> StreamSpec:
    """Insertion stream of the complete graph on ``n`` vertices, lexicographic order."""
    if n < 2:
        raise ValueError("clique needs n >= 2")
    iu, ju = np.triu_indices(n, k=1)
    return StreamSpec.from_edges(np.column_stack([iu, ju]), meta={"generator": f"clique({n})"})


def _index_to_pair(idx: np.ndarray, n: int):
    # Row-major enumeration of pairs (i, j), i < j.
    idx = np.asarray(idx, dtype=np.int64)
    i = np.floor(n - 0.5 - np.sqrt((n - 0.5) ** 2 - 2 * idx.astype(np.float64))).astype(np.int64)

    def row_start(r):
        return r * (2 * n - r - 1) // 2

    # float rounding can land one row off
    i[idx < row_start(i)] -= 1
    i[idx >= row_start(i + 1)] += 1
    return i, idx - row_start(i) + i + 1


def erdos_renyi(n: int, p: float, seed=None) -> StreamSpec:
    """Insertion stream of a G(n, p) graph; edges in lexicographic order."""
    if n < 2:
        raise ValueError("erdos_renyi needs n >= 2")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    rng = np.random.default_rng(seed)
    npairs = n * (n - 1) // 2
    if npairs <= 1 << 22:
        keep = np.flatnonzero(rng.random(npairs) < p)
    else:
        m = rng.binomial(npairs, p)
        keep = np.sort(rng.choice(npairs, size=m, replace=False))
    i, j = _index_to_pair(keep, n)
    return StreamSpec.from_edges(
        np.column_stack([i, j]), meta={"generator": f"erdos_renyi({n}, {p}, {seed})"}
    )


def gen_insertion_stream(kind: str, n: int, p_er: float | None = None, seed=None) -> StreamSpec:
    if kind == "clique":
        return clique(n)
    if kind in ("erdos_renyi", "er", "gnp"):
        if p_er is None:
            raise ValueError("erdos_renyi needs p_er")
        return erdos_renyi(n, p_er, seed)
    raise ValueError(f"unknown generator {kind!r}")


# --------------------------------------------------------------------------
# orderings


def _require_insertion_only(spec):
    if not spec.insertion_only:
        raise UnsupportedStreamError("transform needs an insertion-only stream")


def _bfs_order(spec: StreamSpec, rng: np.random.Generator) -> list[int]:
    adj: dict[int, list[tuple[int, int]]] = {}
    for idx, (a, b) in enumerate(zip(spec.u.tolist(), spec.v.tolist())):
        adj.setdefault(a, []).append((b, idx))
        adj.setdefault(b, []).append((a, idx))
    nodes = sorted(adj)
    unvisited = set(nodes)
    emitted = np.zeros(len(spec), dtype=bool)
    order = []
    while unvisited:
        pool = sorted(unvisited)
        root = pool[int(rng.integers(len(pool)))]
        unvisited.discard(root)
        queue = deque([root])
        while queue:
            x = queue.popleft()
            nbrs = adj[x]
            for k in rng.permutation(len(nbrs)).tolist():
                y, idx = nbrs[k]
                if not emitted[idx]:
                    emitted[idx] = True
                    order.append(idx)
                if y in unvisited:
                    unvisited.discard(y)
                    queue.append(y)
    return order


def reorder(spec: StreamSpec, order: str = "natural", seed=None) -> StreamSpec:
    """Reorder an insertion-only stream: ``natural``, ``uar`` or ``bfs``."""
    _require_insertion_only(spec)
    if order == "natural":
        return spec.take(np.arange(len(spec)))
    rng = np.random.default_rng(seed)
    if order == "uar":
        return spec.take(rng.permutation(len(spec)))
    if order == "bfs":
        return spec.take(_bfs_order(spec, rng))
    raise ValueError(f"unknown order {order!r}")


# --------------------------------------------------------------------------
# deletion models


def _interleave(spec: StreamSpec, plan: list[tuple[int, int]]) -> StreamSpec:
    # plan: (source index, op) pairs
    idx = np.fromiter((i for i, _ in plan), dtype=np.int64, count=len(plan))
    ops = np.fromiter((o for _, o in plan), dtype=np.int8, count=len(plan))
    out = spec.take(idx)
    out.op = ops
    return out


def apply_sliding_window(spec: StreamSpec, window: int, by: str = "count") -> StreamSpec:
    """Turn an insertion-only stream into a sliding-window fully-dynamic stream.

    Before each insertion, every live edge that has fallen out of the window
    is deleted (oldest first). ``by="count"`` keeps the ``window`` most recent
    insertions; ``by="time"`` keeps edges with ``ts > now - window``.
    """
    _require_insertion_only(spec)
    if window <= 0:
        raise ValueError("window must be positive")
    if by == "time" and spec.ts is None:
        raise ValueError("time-based window needs timestamps on every event")
    if by not in ("count", "time"):
        raise ValueError(f"unknown window kind {by!r}")
    live: deque[int] = deque()
    plan = []
    ts = spec.ts.tolist() if spec.ts is not None else None
    for i in range(len(spec)):
        if by == "count":
            pos = i + 1
            while live and live[0] + 1 <= pos - window:
                plan.append((live.popleft(), DELETE))
        else:
            now = ts[i]
            while live and ts[live[0]] <= now - window:
                plan.append((live.popleft(), DELETE))
        plan.append((i, INSERT))
        live.append(i)
    return _interleave(spec, plan)


def apply_mass_deletion(spec: StreamSpec, q: float, d: float, seed=None) -> StreamSpec:
    """After each insertion, with probability ``q`` delete each live edge with probability ``d``."""
    _require_insertion_only(spec)
    if not (0.0 <= q <= 1.0 and 0.0 <= d <= 1.0):
        raise ValueError("q and d must be probabilities")
    rng = np.random.default_rng(seed)
    live: list[int] = []
    plan = []
    for i in range(len(spec)):
        plan.append((i, INSERT))
        live.append(i)
        if q > 0 and rng.random() < q:
            hit = rng.random(len(live)) < d
            if hit.any():
                survivors = []
                for j, h in zip(live, hit.tolist()):
                    if h:
                        plan.append((j, DELETE))
                    else:
                        survivors.append(j)
                live = survivors
    return _interleave(spec, plan)
