"""Error metrics for global and local triangle estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "UNDEFINED",
    "EstimateTrace",
    "mape",
    "max_ape",
    "pearson",
    "eps_error",
    "local_pearson",
    "local_vectors",
]

# Returned when a metric has no defined value (no positive truth, constant vector, ...).
UNDEFINED = math.nan


@dataclass
class EstimateTrace:
    times: np.ndarray
    estimates: np.ndarray
    truths: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.int64)
        self.estimates = np.asarray(self.estimates, dtype=np.float64)
        self.truths = np.asarray(self.truths, dtype=np.float64)
        if not (len(self.times) == len(self.estimates) == len(self.truths)):
            raise ValueError("trace columns must have equal lengths")
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("query times must be strictly increasing")


def _ape(truths, estimates):
    truths = np.asarray(truths, dtype=np.float64)
    estimates = np.asarray(estimates, dtype=np.float64)
    mask = truths > 0
    return np.abs(truths[mask] - estimates[mask]) / truths[mask]


def mape(trace_or_truths, estimates=None) -> float:
    """Mean of |truth - est| / truth over the query points with positive truth."""
    if estimates is None:
        truths, estimates = trace_or_truths.truths, trace_or_truths.estimates
    else:
        truths = trace_or_truths
    ape = _ape(truths, estimates)
    if ape.size == 0:
        return UNDEFINED
    return float(ape.mean())


def max_ape(trace_or_truths, estimates=None) -> float:
    if estimates is None:
        truths, estimates = trace_or_truths.truths, trace_or_truths.estimates
    else:
        truths = trace_or_truths
    ape = _ape(truths, estimates)
    return float(ape.max()) if ape.size else UNDEFINED


def pearson(xs, ys) -> float:
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.size == 0:
        raise ValueError("pearson needs two non-empty vectors of equal length")
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    den = math.sqrt(float(dx @ dx) * float(dy @ dy))
    if den == 0:
        return UNDEFINED
    return float(np.clip(float(dx @ dy) / den, -1.0, 1.0))


def local_vectors(truth_map: dict, est_map: dict):
    """Align two sparse local-count maps over the union of their non-zero supports."""
    keys = sorted({k for k, x in truth_map.items() if x} | {k for k, x in est_map.items() if x})
    truth = np.array([truth_map.get(k, 0) for k in keys], dtype=np.float64)
    est = np.array([est_map.get(k, 0) for k in keys], dtype=np.float64)
    return keys, truth, est


def eps_error(truth_map: dict, est_map: dict) -> float:
    """Mean over vertices of |truth_u - est_u| / (truth_u + 1)."""
    keys, truth, est = local_vectors(truth_map, est_map)
    if not keys:
        return UNDEFINED
    return float(np.mean(np.abs(truth - est) / (truth + 1)))


def local_pearson(truth_map: dict, est_map: dict) -> float:
    keys, truth, est = local_vectors(truth_map, est_map)
    if not keys:
        return UNDEFINED
    return pearson(truth, est)
