"""Unit-disk snapshot graphs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, ParameterError
from .mobility import MobilityTrace


def link_matrix(positions: np.ndarray, range_: float) -> np.ndarray:
    """Boolean adjacency for an (N, 2) position array; a link needs squared distance <= range**2."""
    dx = positions[:, None, 0] - positions[None, :, 0]
    dy = positions[:, None, 1] - positions[None, :, 1]
    mask = dx * dx + dy * dy <= range_ * range_
    np.fill_diagonal(mask, False)
    return mask


@dataclass(frozen=True, eq=False)
class SnapshotGraph:
    """Undirected topology at one instant.

    Backed by a dense boolean matrix for O(1) link tests; the sorted
    neighbour lists are derived on first use.
    """

    node_count: int
    t: float
    range: float
    matrix: np.ndarray = field(repr=False)

    @classmethod
    def from_positions(cls, positions: np.ndarray, t: float, range_: float) -> "SnapshotGraph":
        return cls(len(positions), t, range_, link_matrix(np.asarray(positions, dtype=float), range_))

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[tuple[int, int]], t: float = 0.0, range_: float = 1.0) -> "SnapshotGraph":
        m = np.zeros((node_count, node_count), dtype=bool)
        for u, v in edges:
            if u == v:
                raise DomainError(f"self-loop on node {u}")
            m[u, v] = m[v, u] = True
        return cls(node_count, t, range_, m)

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        rows, cols = np.nonzero(self.matrix)
        bounds = np.searchsorted(rows, np.arange(self.node_count + 1)).tolist()
        cols = cols.tolist()
        return tuple(tuple(cols[bounds[i] : bounds[i + 1]]) for i in range(self.node_count))

    @cached_property
    def bitmasks(self) -> tuple[int, ...]:
        """Neighbour set of each node as an int with bit v set for neighbour v."""
        packed = np.packbits(self.matrix, axis=1, bitorder="little")
        return tuple(int.from_bytes(row.tobytes(), "little") for row in packed)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.matrix[u, v])

    def edges(self) -> list[tuple[int, int]]:
        us, vs = np.nonzero(np.triu(self.matrix, 1))
        return [(int(u), int(v)) for u, v in zip(us, vs)]

    def degrees(self) -> np.ndarray:
        return self.matrix.sum(axis=1)

    def __eq__(self, other):
        if not isinstance(other, SnapshotGraph):
            return NotImplemented
        return (self.node_count, self.t, self.range) == (other.node_count, other.t, other.range) and np.array_equal(
            self.matrix, other.matrix
        )

    __hash__ = None


def build_snapshot(trace: MobilityTrace, t: float, range_: float) -> SnapshotGraph:
    if range_ <= 0:
        raise ParameterError(f"range must be positive, got {range_}")
    pos = trace.positions([t])[0]
    return SnapshotGraph.from_positions(pos, t, range_)


def expected_neighborhood_size(node_count: int, range_: float, area: float) -> float:
    """Mean node degree N * pi * R^2 / A, ignoring border effects."""
    if area <= 0:
        raise ParameterError(f"area must be positive, got {area}")
    return node_count * math.pi * range_**2 / area


def check_path(node_count: int, nodes: Sequence[int]):
    if len(nodes) < 2:
        raise DomainError("a path needs at least 2 nodes")
    for i, v in enumerate(nodes):
        if not (0 <= v < node_count):
            raise DomainError(f"unknown node id {v}")
        if i and nodes[i - 1] == v:
            raise DomainError(f"repeated consecutive node {v}")


def path_valid(graph: SnapshotGraph, path) -> bool:
    """True iff every hop of ``path`` (a Path or a node sequence) is a link in ``graph``."""
    nodes = getattr(path, "nodes", path)
    check_path(graph.node_count, nodes)
    a = np.asarray(nodes[:-1])
    b = np.asarray(nodes[1:])
    return bool(graph.matrix[a, b].all())
