"""Experiment drivers: traces, Monte-Carlo trials and matched-memory comparisons.

Everything here is deterministic given a base seed. Trial ``i`` always uses
``trial_seed(base, i)`` whatever the number of worker processes, so results do
not depend on scheduling.
"""

from __future__ import annotations

import hashlib
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import metrics
from .estimators import ALGORITHMS, make_estimator
from .mascot import make_mascot
from .oracle import ExactCounter
from .stream import StreamSpec

__all__ = [
    "AlgoSpec",
    "Trace",
    "MCReport",
    "trial_seed",
    "query_times",
    "run_trace",
    "truth_trace",
    "monte_carlo",
    "matched_memory",
    "default_workers",
]

MASCOT_ALGOS = ("mascot-c", "mascot-i")
ALL_ALGOS = tuple(ALGORITHMS) + MASCOT_ALGOS + ("exact",)


def default_workers() -> int:
    return max(1, int(os.environ.get("TRIEST_WORKERS", "1")))


def trial_seed(base_seed, i: int) -> int:
    """64-bit seed for trial ``i``: a hash of ``(base_seed, i)``."""
    digest = hashlib.blake2b(f"{base_seed}:{i}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


@dataclass(frozen=True)
class AlgoSpec:
    """Picklable description of an estimator; ``build(seed)`` makes a fresh instance."""

    algo: str
    M: int | None = None
    p: float | None = None

    def __post_init__(self):
        if self.algo not in ALL_ALGOS:
            raise ValueError(f"unknown algorithm {self.algo!r}; choose from {', '.join(ALL_ALGOS)}")
        if self.algo in MASCOT_ALGOS:
            if self.p is None:
                raise ValueError(f"{self.algo} needs a sampling probability p")
        elif self.algo != "exact":
            if self.M is None:
                raise ValueError(f"{self.algo} needs a memory size M")
            if self.M < 6:
                raise ValueError("M must be >= 6")

    @property
    def multigraph(self) -> bool:
        return self.algo.endswith("-m")

    def build(self, seed=None, multigraph=None):
        if self.algo == "exact":
            return ExactCounter(multigraph=bool(multigraph))
        if self.algo in MASCOT_ALGOS:
            return make_mascot(self.algo, self.p, seed, multigraph=bool(multigraph))
        return make_estimator(self.algo, self.M, seed)


def query_times(n_events: int, cadence: int = 1) -> np.ndarray:
    """Cadence points K, 2K, ... plus the final event: ``ceil(n / K)`` of them."""
    if cadence < 1:
        raise ValueError("cadence must be >= 1")
    if n_events == 0:
        return np.zeros(0, dtype=np.int64)
    pts = np.arange(cadence, n_events + 1, cadence, dtype=np.int64)
    if pts.size == 0 or pts[-1] != n_events:
        pts = np.append(pts, n_events)
    return pts


@dataclass
class Trace:
    times: np.ndarray
    estimates: np.ndarray
    locals: list | None = None
    update_ns: np.ndarray | None = None
    final_sample_size: int | None = None

    def timing_summary(self) -> dict:
        if self.update_ns is None or len(self.update_ns) == 0:
            return {}
        us = self.update_ns / 1000.0
        return {
            "events": int(len(us)),
            "mean_us": float(us.mean()),
            "p50_us": float(np.percentile(us, 50)),
            "p99_us": float(np.percentile(us, 99)),
        }


def _events(stream: StreamSpec):
    return list(stream)


def run_trace(est, stream, times=None, cadence=1, with_locals=False, timing=False, events=None) -> Trace:
    """Feed ``stream`` through ``est`` and record estimates at the query times."""
    if events is None:
        events = _events(stream)
    n = len(events)
    if times is None:
        times = query_times(n, cadence)
    times = np.asarray(times, dtype=np.int64)
    want = times.tolist()
    out = np.empty(len(want), dtype=np.float64)
    locs = [] if with_locals else None
    ns = np.empty(n, dtype=np.int64) if timing else None
    k = 0
    nxt = want[0] if want else -1
    process = est.process
    clock = time.perf_counter_ns
    for i, e in enumerate(events, 1):
        if timing:
            t0 = clock()
            process(e)
            ns[i - 1] = clock() - t0
        else:
            process(e)
        if i == nxt:
            out[k] = est.estimate_global()
            if with_locals:
                locs.append(est.locals_snapshot())
            k += 1
            nxt = want[k] if k < len(want) else -1
    if k != len(want):
        raise ValueError("query times beyond the end of the stream")
    size = len(est.sample) if hasattr(est, "sample") else None
    return Trace(times, out, locs, ns, size)


def truth_trace(stream, times=None, cadence=1, with_locals=False, events=None) -> Trace:
    oc = ExactCounter(multigraph=stream.mode == "multigraph")
    return run_trace(oc, stream, times, cadence, with_locals, events=events)


# --------------------------------------------------------------------------
# Monte Carlo


@dataclass
class MCReport:
    times: np.ndarray
    mean: np.ndarray
    var: np.ndarray
    se: np.ndarray
    min: np.ndarray
    max: np.ndarray
    trials: int
    values: np.ndarray | None = None
    warnings: list = field(default_factory=list)

    def var_ci(self, level=0.95, method="moment"):
        """Confidence interval for the variance at each query time.

        ``moment`` is the large-sample interval ``s2 +- z * sqrt((m4 - s2**2) / n)``,
        valid for any distribution with a finite fourth moment (the estimators
        are far from normal). ``chi2`` is the textbook interval for normal data.
        """
        from scipy import stats

        n = self.trials
        a = 1 - level
        if method == "chi2":
            lo = (n - 1) * self.var / stats.chi2.ppf(1 - a / 2, n - 1)
            hi = (n - 1) * self.var / stats.chi2.ppf(a / 2, n - 1)
            return lo, hi
        if method != "moment":
            raise ValueError(f"unknown method {method!r}")
        if self.values is None:
            raise ValueError("moment interval needs the per-trial values")
        dev = self.values - self.mean
        m4 = np.mean(dev**4, axis=0)
        half = stats.norm.ppf(1 - a / 2) * np.sqrt(np.maximum(m4 - self.var**2, 0) / n)
        return self.var - half, self.var + half

    def rows(self):
        for i, t in enumerate(self.times.tolist()):
            yield {
                "t": t,
                "mean": float(self.mean[i]),
                "var": float(self.var[i]),
                "se": float(self.se[i]),
                "min": float(self.min[i]),
                "max": float(self.max[i]),
            }


def _run_chunk(args):
    spec, multigraph, stream, times, base_seed, idx = args
    events = _events(stream)
    insertion_only = stream.insertion_only
    want = np.asarray(times, dtype=np.int64).tolist()
    out = np.empty((len(idx), len(want)), dtype=np.float64)
    for row, i in enumerate(idx):
        est = spec.build(trial_seed(base_seed, i), multigraph)
        k = 0
        nxt = want[0]
        if insertion_only:
            ins = est.insert
            for j, e in enumerate(events, 1):
                ins(e.u, e.v, e.label)
                if j == nxt:
                    out[row, k] = est.estimate_global()
                    k += 1
                    nxt = want[k] if k < len(want) else -1
        else:
            proc = est.process
            for j, e in enumerate(events, 1):
                proc(e)
                if j == nxt:
                    out[row, k] = est.estimate_global()
                    k += 1
                    nxt = want[k] if k < len(want) else -1
    return out


def trial_values(spec: AlgoSpec, stream: StreamSpec, trials: int, seed=0, times=None, workers=None):
    """``trials x len(times)`` matrix of global estimates, one row per seeded trial."""
    if times is None:
        times = [len(stream)]
    times = np.asarray(times, dtype=np.int64)
    multigraph = stream.mode == "multigraph"
    workers = default_workers() if workers is None else workers
    if workers <= 1 or trials < 2 * workers:
        return _run_chunk((spec, multigraph, stream, times, seed, range(trials)))
    bounds = np.linspace(0, trials, workers + 1).astype(int)
    chunks = [(spec, multigraph, stream, times, seed, range(a, b)) for a, b in zip(bounds[:-1], bounds[1:])]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_run_chunk, chunks))
    return np.vstack(parts)


def summarize(values: np.ndarray, times) -> MCReport:
    r = values.shape[0]
    if r < 2:
        raise ValueError("need at least two trials")
    mean = values.mean(axis=0)
    var = values.var(axis=0, ddof=1)
    warnings = []
    if r == 2 and np.array_equal(values[0], values[1]) and np.any(values[0] != 0):
        warnings.append("two identical trials: zero variance may come from a seed collision")
    return MCReport(
        np.asarray(times, dtype=np.int64),
        mean,
        var,
        np.sqrt(var / r),
        values.min(axis=0),
        values.max(axis=0),
        r,
        values,
        warnings,
    )


def monte_carlo(spec: AlgoSpec, stream: StreamSpec, trials: int, seed=0, times=None, workers=None) -> MCReport:
    """Run ``trials`` independent seeded copies and report per-time moments."""
    if trials < 2:
        raise ValueError("need at least two trials")
    if times is None:
        times = [len(stream)]
    vals = trial_values(spec, stream, trials, seed, times, workers)
    return summarize(vals, times)


# --------------------------------------------------------------------------
# matched memory


@dataclass
class MatchedRow:
    trial: int
    M_prime: int
    M_used: int
    mascot_c: float
    mascot_i: float
    triest_base: float
    triest_impr: float


def matched_memory(stream: StreamSpec, p: float, trials: int, seed=0, cadence=1, min_memory=6):
    """Run MASCOT-C/I with probability ``p``, then TRIEST with the memory MASCOT ended up using.

    MASCOT-C and MASCOT-I share their coin flips within a trial (same seed),
    so both finish with the same sample size ``M'``. TRIEST-BASE and -IMPR then
    run with ``M = max(M', min_memory)``. Each cell holds the run's MAPE over
    the cadence points.
    """
    if not stream.insertion_only:
        raise ValueError("matched-memory comparison needs an insertion-only stream")
    events = _events(stream)
    times = query_times(len(events), cadence)
    truth = truth_trace(stream, times, events=events).estimates
    multigraph = stream.mode == "multigraph"
    rows = []
    for i in range(trials):
        s = trial_seed(seed, i)
        mc = make_mascot("c", p, s, multigraph)
        mi = make_mascot("i", p, s, multigraph)
        tc = run_trace(mc, stream, times, events=events)
        ti = run_trace(mi, stream, times, events=events)
        m_prime = tc.final_sample_size
        assert m_prime == ti.final_sample_size
        M = max(m_prime, min_memory)
        base_algo, impr_algo = ("base-m", "impr-m") if multigraph else ("base", "impr")
        tb = run_trace(make_estimator(base_algo, M, s), stream, times, events=events)
        tim = run_trace(make_estimator(impr_algo, M, s), stream, times, events=events)
        rows.append(
            MatchedRow(
                i,
                m_prime,
                M,
                metrics.mape(truth, tc.estimates),
                metrics.mape(truth, ti.estimates),
                metrics.mape(truth, tb.estimates),
                metrics.mape(truth, tim.estimates),
            )
        )
    return rows


def matched_summary(rows) -> dict:
    def avg(attr):
        vals = [getattr(r, attr) for r in rows]
        vals = [v for v in vals if not math.isnan(v)]
        return float(np.mean(vals)) if vals else metrics.UNDEFINED

    out = {k: avg(k) for k in ("mascot_c", "mascot_i", "triest_base", "triest_impr")}
    out["trials"] = len(rows)
    for a, b, name in (("mascot_c", "triest_base", "change_basic"), ("mascot_i", "triest_impr", "change_improved")):
        out[name] = (out[b] - out[a]) / out[a] if out[a] else metrics.UNDEFINED
    return out


