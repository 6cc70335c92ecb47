import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from manet_mpath.errors import DomainError, UndefinedMetric
from manet_mpath.mobility import RwpParams, generate_trace, static_trace
from manet_mpath.routing import MultiPathSet, Path, Strategy
from manet_mpath.session import (
    DiscoveryEvent,
    SessionConfig,
    SessionRecord,
    SnapshotTimeline,
    TraceTimeline,
    UsageInterval,
    mean_time_between_discoveries,
    paths_per_discovery,
    session_metrics,
    simulate_session,
    time_averaged_hop_count,
)
from manet_mpath.topology import build_snapshot, path_valid

from conftest import graph

T0, DT = 2.0, 0.25
P1 = [(0, 1), (1, 5)]
P2 = [(0, 2), (2, 3), (3, 5)]


def timeline(*edge_lists):
    return SnapshotTimeline([graph(6, e, t=T0 + k * DT) for k, e in enumerate(edge_lists)])


def config(strategy, steps, **kw):
    return SessionConfig(0, 5, strategy, T0, T0 + steps * DT, DT, **kw)


def test_hand_built_policy_trace():
    tl = timeline(P1 + P2, P1 + P2, [(0, 1)] + P2, [(0, 1), (0, 2), (3, 5)])
    rec = simulate_session(tl, config(Strategy.NODE, 4))
    assert [(e.t, e.failed) for e in rec.discoveries] == [(T0, False), (T0 + 3 * DT, True)]
    assert [p.nodes for p in rec.discoveries[0].set.paths] == [(0, 1, 5), (0, 2, 3, 5)]
    assert [(u.start, u.end, u.hop_count) for u in rec.usage] == [
        (T0, T0 + 2 * DT, 2),
        (T0 + 2 * DT, T0 + 3 * DT, 3),
    ]


def test_consumption_is_forward_only():
    # p1 recovers while p2 is in use: stay on p2; when p2 breaks, rediscover even though p1 is valid
    tl = timeline(P1 + P2, [(0, 1)] + P2, P1 + P2, P1)
    rec = simulate_session(tl, config(Strategy.NODE, 4))
    assert [e.t for e in rec.discoveries] == [T0, T0 + 3 * DT]
    assert [(u.hop_count, u.epoch, u.path_index) for u in rec.usage] == [(2, 0, 0), (3, 0, 1), (2, 1, 0)]
    assert rec.usage[1].end == T0 + 3 * DT


def test_revisit_readopts_an_earlier_path():
    tl = timeline(P1 + P2, [(0, 1)] + P2, P1 + P2, P1)
    rec = simulate_session(tl, config(Strategy.NODE, 4, revisit=True))
    assert [e.t for e in rec.discoveries] == [T0]
    assert [(u.hop_count, u.epoch, u.path_index) for u in rec.usage] == [(2, 0, 0), (3, 0, 1), (2, 0, 0)]


def test_static_single_path_session():
    trace = static_trace([(0, 0), (200, 0), (400, 0)], 1000, 1000, 100)
    rec = simulate_session(trace, SessionConfig(0, 2, Strategy.SINGLE, 1.0, 100.0))
    assert len(rec.discoveries) == 1
    assert [(u.start, u.end, u.hop_count) for u in rec.usage] == [(1.0, 100.0, 2)]
    assert mean_time_between_discoveries(rec) == 99.0
    assert time_averaged_hop_count(rec) == 2


def test_disconnected_pair_fails_every_instant():
    trace = static_trace([(0, 0), (900, 900)], 1000, 1000, 20)
    cfg = SessionConfig(0, 1, Strategy.ZONE, 1.0, 20.0)
    rec = simulate_session(trace, cfg)
    assert rec.usage == []
    assert len(rec.discoveries) == len(cfg.instants()) == 76
    assert all(e.failed for e in rec.discoveries)
    assert session_metrics(rec) == {"paths_per_set": None, "time_between_discoveries": None, "hop_count": None}
    for fn in (time_averaged_hop_count, mean_time_between_discoveries, paths_per_discovery):
        with pytest.raises(UndefinedMetric):
            fn(rec)


def test_session_end_beyond_trace_rejected():
    trace = static_trace([(0, 0), (10, 0)], 100, 100, 20)
    with pytest.raises(DomainError):
        simulate_session(trace, SessionConfig(0, 1, Strategy.SINGLE, 1.0, 25.0))


@pytest.mark.parametrize(
    "kw", [dict(source=1, destination=1), dict(start_time=5.0, end_time=5.0), dict(sampling_interval=0)]
)
def test_config_invariants(kw):
    base = dict(source=0, destination=1, strategy="single", start_time=1.0, end_time=10.0)
    base.update(kw)
    with pytest.raises(DomainError):
        SessionConfig(**base)


def test_hop_count_worked_examples():
    # (hop_count, seconds) sequences, laid end to end
    def usage(seq):
        out, t = [], 0.0
        for hops, secs in seq:
            out.append((t, t + secs, hops))
            t += secs
        return out

    assert time_averaged_hop_count(usage([(2, 2), (3, 3), (2, 5)])) == pytest.approx(2.3, abs=1e-12)
    assert time_averaged_hop_count(usage([(2, 8), (3, 3), (4, 4)])) == pytest.approx(41 / 15, abs=1e-12)
    assert time_averaged_hop_count(usage([(5, 7.5)])) == 5


def record_with(times, sizes=None, start=0.0, end=100.0):
    cfg = SessionConfig(0, 1, Strategy.LINK, start, end)
    sizes = sizes or [1] * len(times)
    events = [
        DiscoveryEvent(t, MultiPathSet(Strategy.LINK, tuple(Path((0, 1)) for _ in range(k)), t))
        for t, k in zip(times, sizes)
    ]
    return SessionRecord(cfg, events)


def test_time_between_discoveries():
    assert mean_time_between_discoveries(record_with([1, 11, 31])) == 15
    assert mean_time_between_discoveries(record_with([5.0], start=5.0, end=65.0)) == 60.0
    assert mean_time_between_discoveries(record_with([5.0, 5.25])) == 0.25


def test_failed_discoveries_do_not_count():
    rec = record_with([1, 2, 3], sizes=[2, 0, 4])
    assert mean_time_between_discoveries(rec) == 2
    assert paths_per_discovery(rec) == 3.0


def test_paths_per_discovery():
    assert paths_per_discovery(record_with([1, 2], sizes=[2, 4])) == 3.0
    assert paths_per_discovery(record_with([1], sizes=[7])) == 7


def test_replay_is_identical():
    tl = timeline(P1 + P2, [(0, 1)] + P2, P1 + P2, P1)
    a = simulate_session(tl, config(Strategy.LINK, 4))
    b = simulate_session(tl, config(Strategy.LINK, 4))
    assert repr(a) == repr(b)


SMALL = dict(width=600, height=600, node_count=25, v_max=25, duration=40)


def check_record(trace, rec):
    cfg = rec.config
    ok_events = [e for e in rec.discoveries if not e.failed]
    prev_end = cfg.start_time
    for u in rec.usage:
        assert cfg.start_time <= u.start < u.end <= cfg.end_time
        assert u.start >= prev_end - 1e-12
        prev_end = u.end
        mps = ok_events[u.epoch].set
        assert u.hop_count == mps.paths[u.path_index].hop_count
        assert ok_events[u.epoch].t <= u.start
        # validity against independently built snapshots
        k0 = round((u.start - cfg.start_time) / cfg.sampling_interval)
        k1 = math.ceil((u.end - cfg.start_time) / cfg.sampling_interval - 1e-9)
        for k in range(k0, k1):
            t = cfg.start_time + k * cfg.sampling_interval
            assert path_valid(build_snapshot(trace, t, cfg.range), mps.paths[u.path_index])
    # forward-only within each epoch
    for a, b in zip(rec.usage, rec.usage[1:]):
        if a.epoch == b.epoch:
            assert b.path_index > a.path_index
        else:
            assert b.epoch == a.epoch + 1 and b.path_index == 0
    # a rediscovery happens only when nothing at or after the pointer survives
    for e in ok_events[1:]:
        before = [u for u in rec.usage if u.end <= e.t]
        last = before[-1]
        if last.end < e.t:
            continue  # a gap of failed discoveries came first
        mps = ok_events[last.epoch].set
        snap = build_snapshot(trace, e.t, cfg.range)
        assert not any(path_valid(snap, p) for p in mps.paths[last.path_index :])


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32), strategy=st.sampled_from(list(Strategy)), start=st.floats(1, 10))
def test_policy_properties_on_random_traces(seed, strategy, start):
    trace = generate_trace(RwpParams(seed=seed, **SMALL))
    cfg = SessionConfig(0, 1, strategy, start, 40.0)
    rec = simulate_session(trace, cfg)
    check_record(trace, rec)
    assert repr(simulate_session(trace, cfg)) == repr(rec)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_single_path_uses_min_hop_at_discovery(seed):
    trace = generate_trace(RwpParams(seed=seed, **SMALL))
    rec = simulate_session(trace, SessionConfig(2, 3, Strategy.SINGLE, 1.0, 40.0))
    ok_events = [e for e in rec.discoveries if not e.failed]
    if ok_events:
        assert paths_per_discovery(rec) == 1.0
    for u in rec.usage:
        snap = build_snapshot(trace, ok_events[u.epoch].t, 250.0)
        ref = nx.Graph(snap.edges())
        assert u.hop_count == nx.shortest_path_length(ref, 2, 3)


def test_bulk_validity_matches_snapshots():
    trace = generate_trace(RwpParams(seed=4, **SMALL))
    cfg = SessionConfig(0, 1, Strategy.SINGLE, 1.0, 40.0)
    tl = TraceTimeline.for_session(trace, cfg)
    paths = [[0, 5, 1], [0, 1], [3, 7, 9, 12]]
    for nodes in paths:
        expect = [path_valid(build_snapshot(trace, t, 250.0), nodes) for t in tl.times]
        got = [tl.valid(nodes, k) for k in range(len(tl))]
        assert got == expect
        first = next((k for k, ok in enumerate(expect) if not ok), len(expect))
        assert tl.first_invalid(nodes, 0) == first
