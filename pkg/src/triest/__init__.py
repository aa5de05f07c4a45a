"""Fixed-memory estimation of global and local triangle counts in edge streams."""

from .estimators import CounterBank, TriestBase, TriestFD, TriestImpr, make_estimator
from .mascot import MascotC, MascotI, make_mascot
from .oracle import ExactCounter, TriangleStats, pair_stats, z_stat
from .sample import EdgeSample
from .stream import EdgeEvent, StreamSpec, parse_event, read_stream, validate_stream

__version__ = "0.1.0"

__all__ = [
    "CounterBank",
    "EdgeEvent",
    "EdgeSample",
    "ExactCounter",
    "MascotC",
    "MascotI",
    "StreamSpec",
    "TriangleStats",
    "TriestBase",
    "TriestFD",
    "TriestImpr",
    "make_estimator",
    "make_mascot",
    "pair_stats",
    "parse_event",
    "read_stream",
    "validate_stream",
    "z_stat",
]
