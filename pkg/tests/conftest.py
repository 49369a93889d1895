import itertools

import numpy as np
import pytest

from edgeflow import build_network
from edgeflow.generators import complete_graph, path_graph, random_connected_graph


@pytest.fixture
def k3():
    return build_network([(1, 2), (2, 3), (3, 1)])


@pytest.fixture
def p3():
    return build_network([(1, 2), (2, 3)])


@pytest.fixture
def k4():
    return complete_graph(4)


@pytest.fixture
def p4():
    return path_graph(4)


def random_graphs(count, seed=0, n_range=(5, 20), max_density=0.5, min_cycles=1):
    """Random connected graphs with at least ``min_cycles`` independent cycles."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        net = random_connected_graph(n, rng.uniform(0.05, max_density), rng)
        if net.cycle_rank >= min_cycles:
            out.append(net)
    return out


def brute_triangles(net):
    es = set(net.edges)
    return [t for t in itertools.combinations(range(net.n), 3)
            if {(t[0], t[1]), (t[0], t[2]), (t[1], t[2])} <= es]


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
