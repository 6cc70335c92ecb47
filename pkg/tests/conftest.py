import itertools
import random

import pytest
from hypothesis import strategies as st

from manet_mpath.topology import SnapshotGraph


def graph(n, edges, t=0.0):
    return SnapshotGraph.from_edges(n, edges, t=t)


@st.composite
def small_graphs(draw, max_nodes=7, connected=False):
    """(graph, s, d) with up to ``max_nodes`` nodes."""
    n = draw(st.integers(2, max_nodes))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = [e for e, keep in zip(pairs, mask) if keep]
    if connected:
        # a random spanning chain keeps the sample connected
        order = draw(st.permutations(range(n)))
        edges = sorted(set(edges) | {tuple(sorted(p)) for p in zip(order, order[1:])})
    s, d = draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
    return graph(n, edges), s, d


@pytest.fixture
def rng():
    return random.Random(12345)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (k[0], int(k[1:]))):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key} {'PASS' if ok else 'FAIL'}  {detail}")
