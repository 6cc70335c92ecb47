"""Brute-force checks for the routing layer on small graphs.

Everything here enumerates simple paths exhaustively and shares no code with
the BFS-based extractors it checks, apart from the graph container.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .routing import Strategy, discover, is_link_disjoint, is_node_disjoint, is_zone_disjoint, min_hop_path
from .topology import SnapshotGraph


def simple_paths(nbrs: dict[int, set[int]], s: int, d: int) -> Iterator[tuple[int, ...]]:
    stack = [(s, (s,))]
    while stack:
        u, path = stack.pop()
        for v in nbrs.get(u, ()):
            if v in path:
                continue
            if v == d:
                yield path + (v,)
            else:
                stack.append((v, path + (v,)))


def edge_sets(graph: SnapshotGraph) -> dict[int, set[int]]:
    nbrs: dict[int, set[int]] = {v: set() for v in range(graph.node_count)}
    for u, v in graph.edges():
        nbrs[u].add(v)
        nbrs[v].add(u)
    return nbrs


def shortest_paths(graph: SnapshotGraph, s: int, d: int) -> list[tuple[int, ...]]:
    """All minimum-hop s-d paths, sorted."""
    paths = list(simple_paths(edge_sets(graph), s, d))
    if not paths:
        return []
    best = min(len(p) for p in paths)
    return sorted(p for p in paths if len(p) == best)


def residual(graph: SnapshotGraph, strategy: Strategy, paths, s: int, d: int) -> dict[int, set[int]]:
    """What is left of ``graph`` after applying the strategy's removal rule for every path."""
    nbrs = edge_sets(graph)
    original = edge_sets(graph)
    dead: set[int] = set()
    for p in paths:
        for u, v in zip(p, p[1:]):
            nbrs[u].discard(v)
            nbrs[v].discard(u)
        if strategy is Strategy.LINK:
            continue
        mids = set(p[1:-1])
        dead |= mids
        if strategy is Strategy.ZONE:
            for u in mids:
                dead |= original[u] - {s, d}
    return {u: {v for v in vs if v not in dead} for u, vs in nbrs.items() if u not in dead}


@dataclass
class OracleReport:
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_instance(graph: SnapshotGraph, s: int, d: int, report: Optional[OracleReport] = None) -> OracleReport:
    report = report or OracleReport()
    report.checked += 1
    tag = f"edges={graph.edges()} s={s} d={d}"
    best = shortest_paths(graph, s, d)
    mh = min_hop_path(graph, s, d)
    if not best:
        if mh is not None:
            report.failures.append(f"min_hop_path found {mh.nodes} on a disconnected pair; {tag}")
    elif mh is None or mh.nodes != best[0]:
        report.failures.append(f"min_hop_path {mh and mh.nodes} != lexicographic shortest {best[0]}; {tag}")

    for strategy in (Strategy.LINK, Strategy.NODE, Strategy.ZONE):
        got = discover(graph, s, d, strategy)
        paths = [p.nodes for p in got.paths]
        name = strategy.short
        if not best:
            if paths:
                report.failures.append(f"{name}: paths on a disconnected pair; {tag}")
            continue
        if not paths or paths[0] != best[0]:
            report.failures.append(f"{name}: first path {paths[:1]} != min-hop {best[0]}; {tag}")
        hops = [len(p) - 1 for p in paths]
        if hops != sorted(hops):
            report.failures.append(f"{name}: hop counts not non-decreasing {hops}; {tag}")
        if not is_link_disjoint(paths):
            report.failures.append(f"{name}: set not link-disjoint {paths}; {tag}")
        if strategy is not Strategy.LINK and not is_node_disjoint(paths):
            report.failures.append(f"{name}: set not node-disjoint {paths}; {tag}")
        if strategy is Strategy.ZONE and not is_zone_disjoint(graph, paths):
            report.failures.append(f"{name}: set not zone-disjoint {paths}; {tag}")
        # greedy maximality: each path is a shortest path of the residual left
        # by its predecessors, and nothing survives the last removal
        for i, p in enumerate(paths):
            rest = residual(graph, strategy, paths[:i], s, d)
            cands = list(simple_paths(rest, s, d))
            shortest = min((len(c) for c in cands), default=None)
            expect = min((c for c in cands if len(c) == shortest), default=None)
            if p != expect:
                report.failures.append(f"{name}: path {i} {p} != residual's lexicographic shortest {expect}; {tag}")
        leftover = next(simple_paths(residual(graph, strategy, paths, s, d), s, d), None)
        if leftover is not None:
            report.failures.append(f"{name}: residual still holds {leftover}; {tag}")
    return report


def random_connected_graph(rng: random.Random, max_nodes: int) -> SnapshotGraph:
    n = rng.randint(2, max_nodes)
    pairs = list(itertools.combinations(range(n), 2))
    while True:
        p = rng.uniform(0.2, 0.9)
        edges = [e for e in pairs if rng.random() < p]
        g = SnapshotGraph.from_edges(n, edges)
        seen, todo = {0}, [0]
        while todo:
            u = todo.pop()
            for v in g.adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    todo.append(v)
        if len(seen) == n:
            return g


def run_random_suite(samples: int = 500, max_nodes: int = 7, seed: int = 0) -> OracleReport:
    rng = random.Random(seed)
    report = OracleReport()
    for _ in range(samples):
        g = random_connected_graph(rng, max_nodes)
        s, d = rng.sample(range(g.node_count), 2)
        check_instance(g, s, d, report)
    return report


def all_graphs(n: int) -> Iterator[SnapshotGraph]:
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield SnapshotGraph.from_edges(n, [e for i, e in enumerate(pairs) if mask >> i & 1])


def run_exhaustive_suite(n: int = 4) -> OracleReport:
    """Every labelled graph on ``n`` nodes, every ordered (s, d) pair."""
    report = OracleReport()
    for g in all_graphs(n):
        for s, d in itertools.permutations(range(n), 2):
            check_instance(g, s, d, report)
    return report
