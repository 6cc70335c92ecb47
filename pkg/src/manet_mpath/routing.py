"""Minimum-hop routing and greedy link-, node- and zone-disjoint path sets.

All three extractors share one loop: take the minimum-hop path in the working
graph, keep it, strip part of the working graph, repeat until the source and
destination are disconnected. They differ only in what gets stripped:

    link  the path's edges
    node  the path's edges and its intermediate nodes
    zone  the path's edges, its intermediate nodes, and every neighbour of an
          intermediate node other than the source and destination

Stripping the path's edges in every variant keeps the loop finite when the
minimum-hop path is the direct edge [s, d], which has no intermediates.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import DomainError
from .topology import SnapshotGraph, check_path


class Strategy(str, enum.Enum):
    SINGLE = "single"
    LINK = "link_disjoint"
    NODE = "node_disjoint"
    ZONE = "zone_disjoint"

    @property
    def short(self) -> str:
        return {"single": "single", "link_disjoint": "link", "node_disjoint": "node", "zone_disjoint": "zone"}[self.value]

    @classmethod
    def parse(cls, name: str) -> "Strategy":
        for s in cls:
            if name in (s.value, s.short):
                return s
        raise DomainError(f"unknown strategy {name!r}")


@dataclass(frozen=True)
class Path:
    nodes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(int(v) for v in self.nodes))
        if len(self.nodes) < 2:
            raise DomainError("a path needs at least 2 nodes")
        if len(set(self.nodes)) != len(self.nodes):
            raise DomainError(f"path {self.nodes} repeats a node")

    @property
    def source(self) -> int:
        return self.nodes[0]

    @property
    def destination(self) -> int:
        return self.nodes[-1]

    @property
    def hop_count(self) -> int:
        return len(self.nodes) - 1

    @property
    def intermediates(self) -> tuple[int, ...]:
        return self.nodes[1:-1]

    def edges(self) -> list[tuple[int, int]]:
        return [(min(u, v), max(u, v)) for u, v in zip(self.nodes, self.nodes[1:])]

    def __len__(self):
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)


@dataclass(frozen=True)
class MultiPathSet:
    strategy: Strategy
    paths: tuple[Path, ...]
    discovered_at: float = 0.0

    def __len__(self):
        return len(self.paths)

    def __bool__(self):
        return bool(self.paths)

    @property
    def hop_counts(self) -> list[int]:
        return [p.hop_count for p in self.paths]


class _WorkingGraph:
    """Mutable copy of a snapshot with neighbour sets held as integer bitmasks."""

    def __init__(self, graph: SnapshotGraph):
        self.adj = list(graph.bitmasks)
        self.alive = (1 << graph.node_count) - 1

    def remove_edge(self, u: int, v: int):
        self.adj[u] &= ~(1 << v)
        self.adj[v] &= ~(1 << u)

    def remove_node(self, v: int):
        self.alive &= ~(1 << v)

    def remove_nodes(self, mask: int):
        self.alive &= ~mask

    def shortest(self, s: int, d: int) -> Optional[list[int]]:
        """Lexicographically smallest minimum-hop s-d node sequence, or None.

        Breadth-first layers are grown from d until s is reached; walking back
        from s, the smallest-id neighbour one layer closer to d is taken at
        every step.
        """
        adj, alive = self.adj, self.alive
        src = 1 << s
        layers = [1 << d]
        seen = 1 << d
        frontier = 1 << d
        while not frontier & src:
            grown = 0
            f = frontier
            while f:
                low = f & -f
                grown |= adj[low.bit_length() - 1]
                f ^= low
            grown &= alive & ~seen
            if not grown:
                return None
            layers.append(grown)
            seen |= grown
            frontier = grown
        path = [s]
        u = s
        for layer in reversed(layers[:-1]):
            cand = adj[u] & layer
            u = (cand & -cand).bit_length() - 1
            path.append(u)
        return path


def _check_pair(graph: SnapshotGraph, s: int, d: int):
    for v in (s, d):
        if not (0 <= v < graph.node_count):
            raise DomainError(f"unknown node id {v}")
    if s == d:
        raise DomainError("source and destination must differ")


def min_hop_path(graph: SnapshotGraph, s: int, d: int) -> Optional[Path]:
    _check_pair(graph, s, d)
    nodes = _WorkingGraph(graph).shortest(s, d)
    return Path(tuple(nodes)) if nodes else None


def _extract(graph: SnapshotGraph, s: int, d: int, strategy: Strategy, t: float) -> MultiPathSet:
    _check_pair(graph, s, d)
    work = _WorkingGraph(graph)
    original = graph.bitmasks
    ends = (1 << s) | (1 << d)
    paths = []
    while True:
        nodes = work.shortest(s, d)
        if nodes is None:
            break
        path = Path(tuple(nodes))
        paths.append(path)
        for u, v in zip(nodes, nodes[1:]):
            work.remove_edge(u, v)
        if strategy is Strategy.LINK:
            continue
        for u in path.intermediates:
            work.remove_node(u)
            if strategy is Strategy.ZONE:
                work.remove_nodes(original[u] & ~ends)
    return MultiPathSet(strategy, tuple(paths), t)


def link_disjoint_set(graph: SnapshotGraph, s: int, d: int, t: Optional[float] = None) -> MultiPathSet:
    return _extract(graph, s, d, Strategy.LINK, graph.t if t is None else t)


def node_disjoint_set(graph: SnapshotGraph, s: int, d: int, t: Optional[float] = None) -> MultiPathSet:
    return _extract(graph, s, d, Strategy.NODE, graph.t if t is None else t)


def zone_disjoint_set(graph: SnapshotGraph, s: int, d: int, t: Optional[float] = None) -> MultiPathSet:
    return _extract(graph, s, d, Strategy.ZONE, graph.t if t is None else t)


def discover(graph: SnapshotGraph, s: int, d: int, strategy: Strategy, t: Optional[float] = None) -> MultiPathSet:
    """One route discovery under ``strategy``; an empty set means s and d are disconnected."""
    t = graph.t if t is None else t
    if strategy is Strategy.SINGLE:
        p = min_hop_path(graph, s, d)
        return MultiPathSet(strategy, (p,) if p else (), t)
    return _extract(graph, s, d, strategy, t)


def _as_paths(paths) -> list[Path]:
    out = [p if isinstance(p, Path) else Path(tuple(p)) for p in paths]
    if out:
        ends = {(p.source, p.destination) for p in out}
        if len(ends) != 1:
            raise DomainError(f"paths do not share endpoints: {sorted(ends)}")
    return out


def is_link_disjoint(paths: Sequence) -> bool:
    seen: set[tuple[int, int]] = set()
    for p in _as_paths(paths):
        edges = set(p.edges())
        if seen & edges:
            return False
        seen |= edges
    return True


def is_node_disjoint(paths: Sequence) -> bool:
    seen: set[int] = set()
    for p in _as_paths(paths):
        mid = set(p.intermediates)
        if seen & mid:
            return False
        seen |= mid
    return True


def is_zone_disjoint(graph: SnapshotGraph, paths: Sequence) -> bool:
    ps = _as_paths(paths)
    for p in ps:
        check_path(graph.node_count, p.nodes)
    if not is_node_disjoint(ps):
        return False
    for i, p in enumerate(ps):
        for q in ps[i + 1 :]:
            for u in p.intermediates:
                for v in q.intermediates:
                    if graph.has_edge(u, v):
                        return False
    return True
