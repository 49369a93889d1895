"""Small built-in graph families used by tests and the CLI."""

from __future__ import annotations

import itertools

import numpy as np

from .graph import FlowNetwork, build_network


def path_graph(n: int) -> FlowNetwork:
    return build_network([(k, k + 1) for k in range(1, n)])


def ring_graph(n: int) -> FlowNetwork:
    return build_network([(k, k % n + 1) for k in range(1, n + 1)])


def complete_graph(n: int) -> FlowNetwork:
    return build_network(list(itertools.combinations(range(1, n + 1), 2)))


def star_graph(leaves: int) -> FlowNetwork:
    return build_network([(1, k) for k in range(2, leaves + 2)])


def _grid_edges(rows, cols, offset=0):
    vid = lambda r, c: offset + r * cols + c + 1  # noqa: E731
    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((vid(r, c), vid(r, c + 1)))
            if r + 1 < rows:
                edges.append((vid(r, c), vid(r + 1, c)))
    return edges


def grid_graph(rows: int, cols: int) -> FlowNetwork:
    """``rows`` x ``cols`` lattice; vertex ``r*cols + c + 1`` sits at (r, c)."""
    return build_network(_grid_edges(rows, cols))


def barbell_graph(k: int) -> FlowNetwork:
    """Two copies of K_k joined by the single edge (k, k+1)."""
    a = list(itertools.combinations(range(1, k + 1), 2))
    b = list(itertools.combinations(range(k + 1, 2 * k + 1), 2))
    return build_network(a + [(k, k + 1)] + b)


def barbell_grid(rows: int, cols: int, bridges: int = 1) -> FlowNetwork:
    """Two ``rows`` x ``cols`` grids side by side, joined by ``bridges`` edges.

    Bridge ``t`` joins the right-most vertex of row ``t`` in the first grid
    to the left-most vertex of the same row in the second. Vertices
    ``1..rows*cols`` form the first cluster.
    """
    if not 1 <= bridges <= rows:
        raise ValueError("need 1 <= bridges <= rows")
    off = rows * cols
    edges = _grid_edges(rows, cols) + _grid_edges(rows, cols, off)
    step = max(rows // bridges, 1)
    for t in range(bridges):
        r = (t * step + step // 2) % rows
        edges.append((r * cols + cols, off + r * cols + 1))
    return build_network(edges)


def random_connected_graph(n: int, density: float, rng) -> FlowNetwork:
    """Random spanning tree plus each remaining pair with probability ``density``."""
    rng = np.random.default_rng(rng)
    order = rng.permutation(n) + 1
    edges = set()
    for k in range(1, n):
        a, b = order[k], order[rng.integers(k)]
        edges.add((min(a, b), max(a, b)))
    for a, b in itertools.combinations(range(1, n + 1), 2):
        if (a, b) not in edges and rng.random() < density:
            edges.add((a, b))
    return build_network(sorted(edges))
