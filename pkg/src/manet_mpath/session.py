"""One source-destination session: sampled discovery/usage timeline and its metrics.

Policy, per sampling instant t:

* with no live path set, run a discovery on the snapshot at t; an empty result
  leaves t as a gap and the next instant retries;
* otherwise keep the active path while it is valid; when it breaks, move
  forward through the stored paths (ascending hop count) to the first one valid
  at t, never back to an earlier one;
* when no later path is valid, discover again at the same instant t.

A path used at instant t carries the route over [t, t + sampling_interval),
clipped to the session end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import DomainError, UndefinedMetric
from .mobility import MobilityTrace
from .routing import MultiPathSet, Strategy, discover
from .topology import SnapshotGraph, path_valid


@dataclass(frozen=True)
class SessionConfig:
    source: int
    destination: int
    strategy: Strategy
    start_time: float
    end_time: float
    sampling_interval: float = 0.25
    range: float = 250.0
    # False: after a break only later paths of the set are tried. True: any
    # valid path of the set may be (re)adopted, lowest index first.
    revisit: bool = False

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy.parse(self.strategy) if isinstance(self.strategy, str) else self.strategy)
        if self.source == self.destination:
            raise DomainError("source and destination must differ")
        if not self.start_time < self.end_time:
            raise DomainError(f"start_time {self.start_time} must precede end_time {self.end_time}")
        if self.sampling_interval <= 0:
            raise DomainError("sampling_interval must be positive")
        if self.range <= 0:
            raise DomainError("range must be positive")

    def instants(self) -> np.ndarray:
        count = math.ceil((self.end_time - self.start_time) / self.sampling_interval - 1e-9)
        return self.start_time + self.sampling_interval * np.arange(max(count, 1))


class DiscoveryEvent(NamedTuple):
    t: float
    set: MultiPathSet

    @property
    def failed(self) -> bool:
        return not self.set


class UsageInterval(NamedTuple):
    start: float
    end: float
    hop_count: int
    epoch: int  # index into the successful discoveries
    path_index: int

    @property
    def duration(self) -> float:
        return self.end - self.start


@dataclass
class SessionRecord:
    config: SessionConfig
    discoveries: list[DiscoveryEvent] = field(default_factory=list)
    usage: list[UsageInterval] = field(default_factory=list)

    @property
    def successful(self) -> list[DiscoveryEvent]:
        return [e for e in self.discoveries if not e.failed]


class TraceTimeline:
    """Sampled positions of every node over a session's instants.

    Path validity over many instants is evaluated in bulk from the positions,
    with the same squared-distance test the snapshot builder applies.
    """

    def __init__(self, trace: MobilityTrace, times: Sequence[float], range_: float):
        self.times = np.asarray(times, dtype=float)
        self.range = range_
        self._r2 = range_ * range_
        self._pos = trace.positions(self.times)
        self.node_count = trace.node_count

    @classmethod
    def for_session(cls, trace: MobilityTrace, config: SessionConfig) -> "TraceTimeline":
        if config.end_time > trace.duration:
            raise DomainError(f"end_time {config.end_time} beyond trace duration {trace.duration}")
        if config.start_time < 0:
            raise DomainError("start_time must be non-negative")
        return cls(trace, config.instants(), config.range)

    def __len__(self):
        return len(self.times)

    def snapshot(self, k: int) -> SnapshotGraph:
        return SnapshotGraph.from_positions(self._pos[k], float(self.times[k]), self.range)

    def _bad(self, nodes, lo: int, hi: int) -> np.ndarray:
        a = list(nodes[:-1])
        b = list(nodes[1:])
        seg = self._pos[lo:hi]
        dx = seg[:, a, 0] - seg[:, b, 0]
        dy = seg[:, a, 1] - seg[:, b, 1]
        return (dx * dx + dy * dy > self._r2).any(axis=1)

    def valid(self, nodes, k: int) -> bool:
        return not self._bad(nodes, k, k + 1)[0]

    def first_invalid(self, nodes, k0: int) -> int:
        """First instant index >= k0 at which ``nodes`` is broken, or len(self)."""
        k, chunk, n = k0, 16, len(self.times)
        while k < n:
            hi = min(n, k + chunk)
            bad = self._bad(nodes, k, hi)
            if bad.any():
                return k + int(np.argmax(bad))
            k, chunk = hi, chunk * 2
        return n


class SnapshotTimeline:
    """A fixed, explicitly listed sequence of snapshots (hand-built scenarios)."""

    def __init__(self, snapshots: Sequence[SnapshotGraph]):
        self.snapshots = list(snapshots)
        self.times = np.array([g.t for g in self.snapshots], dtype=float)

    def __len__(self):
        return len(self.snapshots)

    def snapshot(self, k: int) -> SnapshotGraph:
        return self.snapshots[k]

    def valid(self, nodes, k: int) -> bool:
        return path_valid(self.snapshots[k], nodes)

    def first_invalid(self, nodes, k0: int) -> int:
        for k in range(k0, len(self.snapshots)):
            if not path_valid(self.snapshots[k], nodes):
                return k
        return len(self.snapshots)


Timeline = Union[TraceTimeline, SnapshotTimeline]


def simulate_session(source: Union[MobilityTrace, Timeline], config: SessionConfig) -> SessionRecord:
    """Run ``config`` over a trace (sampled at the config's instants) or a prepared timeline."""
    timeline = TraceTimeline.for_session(source, config) if isinstance(source, MobilityTrace) else source
    times = timeline.times
    if len(times) == 0:
        raise DomainError("timeline has no sampling instants")
    if not np.isclose(times[0], config.start_time) or times[-1] >= config.end_time:
        raise DomainError("timeline instants do not fit the session window")

    s, d = config.source, config.destination
    n = len(timeline)
    record = SessionRecord(config)
    current: Optional[MultiPathSet] = None
    ptr = 0
    epoch = -1
    k = 0

    def t_at(i: int) -> float:
        return float(times[i]) if i < n else config.end_time

    while k < n:
        if current is None:
            found = discover(timeline.snapshot(k), s, d, config.strategy, t_at(k))
            record.discoveries.append(DiscoveryEvent(t_at(k), found))
            if not found:
                k += 1
                continue
            current, ptr = found, 0
            epoch += 1
        path = current.paths[ptr]
        brk = timeline.first_invalid(path.nodes, k)
        if brk > k:
            record.usage.append(UsageInterval(t_at(k), t_at(brk), path.hop_count, epoch, ptr))
        k = brk
        if k >= n:
            break
        first = 0 if config.revisit else ptr + 1
        nxt = next((j for j in range(first, len(current.paths)) if timeline.valid(current.paths[j].nodes, k)), None)
        if nxt is None:
            current = None
        else:
            ptr = nxt
    return record


def time_averaged_hop_count(record: Union[SessionRecord, Sequence[tuple[float, float, int]]]) -> float:
    """Duration-weighted mean hop count over the time a route was in use."""
    usage = record.usage if isinstance(record, SessionRecord) else record
    total = sum(u[1] - u[0] for u in usage)
    if not usage or total <= 0:
        raise UndefinedMetric("session never had a route")
    return sum(u[2] * (u[1] - u[0]) for u in usage) / total


def mean_time_between_discoveries(record: SessionRecord) -> float:
    """Mean gap between successive successful discoveries.

    A session with a single successful discovery contributes the remaining
    session time (the route outlived the session).
    """
    ts = [e.t for e in record.successful]
    if not ts:
        raise UndefinedMetric("no successful discovery")
    if len(ts) == 1:
        return record.config.end_time - ts[0]
    return (ts[-1] - ts[0]) / (len(ts) - 1)


def paths_per_discovery(record: SessionRecord) -> float:
    sizes = [len(e.set) for e in record.successful]
    if not sizes:
        raise UndefinedMetric("no successful discovery")
    return sum(sizes) / len(sizes)


def session_metrics(record: SessionRecord) -> dict[str, Optional[float]]:
    """All three metrics, with None where a metric is undefined."""
    out: dict[str, Optional[float]] = {}
    for name, fn in (
        ("paths_per_set", paths_per_discovery),
        ("time_between_discoveries", mean_time_between_discoveries),
        ("hop_count", time_averaged_hop_count),
    ):
        try:
            out[name] = fn(record)
        except UndefinedMetric:
            out[name] = None
    return out
