"""Flow networks and their discrete operators.

Vertices are renumbered densely ``0..n-1`` in order of first appearance and
every edge ``(i, j)`` is stored with ``i < j``; that is the reference
orientation, so a positive flow value means flow from ``i`` to ``j``.
Edges are sorted lexicographically, which fixes the index of every flow
entry across runs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components


class GraphError(ValueError):
    """Raised for malformed graph input."""


@dataclass(frozen=True, eq=False)
class FlowNetwork:
    """Simple undirected graph with canonical edge orientation.

    Attributes
    ----------
    n : int
        Number of vertices.
    edges : tuple of (int, int)
        Zero-based vertex pairs with ``i < j``, sorted.
    vertex_ids : tuple of int
        Original (user-facing) id of every vertex.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    vertex_ids: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not self.vertex_ids:
            object.__setattr__(self, "vertex_ids", tuple(range(1, self.n + 1)))
        if len(self.vertex_ids) != self.n:
            raise GraphError("vertex_ids must have one entry per vertex")
        prev = None
        for i, j in self.edges:
            if not 0 <= i < j < self.n:
                raise GraphError(f"edge ({i}, {j}) is not canonical")
            if prev is not None and (i, j) <= prev:
                raise GraphError("edges must be sorted and unique")
            prev = (i, j)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def o(self) -> int:
        return len(self.triangles)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: r for r, e in enumerate(self.edges)}

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges:
            nbrs[i].append(j)
            nbrs[j].append(i)
        return tuple(tuple(sorted(a)) for a in nbrs)

    @cached_property
    def triangles(self) -> tuple[tuple[int, int, int], ...]:
        # forward-neighbor intersection; each 3-clique emitted once as i<j<k
        fwd = [set(k for k in nb if k > v) for v, nb in enumerate(self.adjacency)]
        tris = []
        for i, j in self.edges:
            for k in sorted(fwd[i] & fwd[j]):
                tris.append((i, j, k))
        tris.sort()
        return tuple(tris)

    @cached_property
    def components(self) -> tuple[int, np.ndarray]:
        adj = sp.coo_matrix(
            (np.ones(self.m), self.endpoints), shape=(self.n, self.n)
        ).tocsr()
        return connected_components(adj, directed=False)

    @property
    def n_components(self) -> int:
        return int(self.components[0])

    @property
    def is_connected(self) -> bool:
        return self.n_components == 1

    @property
    def cycle_rank(self) -> int:
        """Dimension of the cycle space, ``m - n + #components``."""
        return self.m - self.n + self.n_components

    @cached_property
    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.edges:
            return np.zeros(0, dtype=int), np.zeros(0, dtype=int)
        arr = np.asarray(self.edges, dtype=int)
        return arr[:, 0], arr[:, 1]

    def edge_id(self, a: int, b: int) -> tuple[int, int]:
        """Return ``(r, sign)`` for the zero-based vertex pair ``(a, b)``.

        ``sign`` is -1 when ``(a, b)`` runs against the reference orientation.
        """
        if a < b:
            return self.edge_index[(a, b)], 1
        return self.edge_index[(b, a)], -1

    def __repr__(self):
        return f"FlowNetwork(n={self.n}, m={self.m}, o={self.o})"


def build_network(edge_list, *, warn_disconnected: bool = True) -> FlowNetwork:
    """Build a :class:`FlowNetwork` from pairs of positive integer vertex ids.

    Vertices are renumbered by order of first appearance. Self-loops and
    duplicate edges (in either orientation) raise :class:`GraphError`.
    """
    edge_list = [tuple(e) for e in edge_list]
    if not edge_list:
        raise GraphError("edge list is empty")
    index: dict[int, int] = {}
    seen = set()
    canon = []
    for pair in edge_list:
        if len(pair) != 2:
            raise GraphError(f"expected a vertex pair, got {pair!r}")
        a, b = pair
        if int(a) != a or int(b) != b or a < 1 or b < 1:
            raise GraphError(f"vertex ids must be positive integers: {pair!r}")
        a, b = int(a), int(b)
        if a == b:
            raise GraphError(f"self-loop at vertex {a}")
        for v in (a, b):
            if v not in index:
                index[v] = len(index)
        i, j = sorted((index[a], index[b]))
        if (i, j) in seen:
            raise GraphError(f"duplicate edge ({a}, {b})")
        seen.add((i, j))
        canon.append((i, j))
    ids = tuple(sorted(index, key=index.__getitem__))
    net = FlowNetwork(len(index), tuple(sorted(canon)), ids)
    if warn_disconnected and not net.is_connected:
        warnings.warn(
            f"graph has {net.n_components} connected components", stacklevel=2
        )
    return net


def incidence_matrix(net: FlowNetwork) -> sp.csr_matrix:
    """Signed n-by-m incidence matrix: +1 at the tail, -1 at the head."""
    i, j = net.endpoints
    r = np.arange(net.m)
    rows = np.concatenate([i, j])
    cols = np.concatenate([r, r])
    vals = np.concatenate([np.ones(net.m), -np.ones(net.m)])
    return sp.csr_matrix((vals, (rows, cols)), shape=(net.n, net.m))


def curl_matrix(net: FlowNetwork) -> sp.csr_matrix:
    """m-by-o edge/triangle operator.

    Triangle ``(i, j, k)`` gets +1 on edges ``(i, j)`` and ``(j, k)`` and -1 on
    ``(i, k)``.
    """
    idx = net.edge_index
    rows, cols, vals = [], [], []
    for u, (i, j, k) in enumerate(net.triangles):
        rows += [idx[(i, j)], idx[(j, k)], idx[(i, k)]]
        cols += [u, u, u]
        vals += [1.0, 1.0, -1.0]
    return sp.csr_matrix((vals, (rows, cols)), shape=(net.m, net.o))


def laplacian(net: FlowNetwork) -> sp.csr_matrix:
    B = incidence_matrix(net)
    return (B @ B.T).tocsr()


def edge_laplacian(net: FlowNetwork) -> sp.csr_matrix:
    B = incidence_matrix(net)
    return (B.T @ B).tocsr()


def _check_flow(net: FlowNetwork, f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != (net.m,):
        raise ValueError(f"flow has shape {f.shape}, expected ({net.m},)")
    return f


def divergence(net: FlowNetwork, f) -> np.ndarray:
    """Net outflow at every vertex, ``B f``."""
    return incidence_matrix(net) @ _check_flow(net, f)


def curl(net: FlowNetwork, f) -> np.ndarray:
    """Circulation around every triangle, ``C^T f``."""
    return curl_matrix(net).T @ _check_flow(net, f)


def gradient(net: FlowNetwork, y) -> np.ndarray:
    """Gradient flow ``B^T y`` induced by vertex potentials ``y``."""
    y = np.asarray(y, dtype=float)
    if y.shape != (net.n,):
        raise ValueError(f"potentials have shape {y.shape}, expected ({net.n},)")
    return incidence_matrix(net).T @ y


def line_graph(net: FlowNetwork) -> FlowNetwork:
    """Graph with one vertex per edge; adjacent iff the edges share an endpoint.

    Line-graph vertex ``r`` (zero-based) corresponds to edge ``r`` of ``net``.
    """
    incident: list[list[int]] = [[] for _ in range(net.n)]
    for r, (i, j) in enumerate(net.edges):
        incident[i].append(r)
        incident[j].append(r)
    pairs = set()
    for rs in incident:
        for a in range(len(rs)):
            for b in range(a + 1, len(rs)):
                pairs.add((min(rs[a], rs[b]), max(rs[a], rs[b])))
    return FlowNetwork(net.m, tuple(sorted(pairs)), tuple(range(1, net.m + 1)))


def flow_mat_to_vec(net: FlowNetwork, F, atol: float = 1e-12) -> np.ndarray:
    """Read ``f_r = F[i, j]`` for every edge ``r = (i, j)`` from an n-by-n matrix.

    ``F`` must be antisymmetric and vanish off the edge set.
    """
    F = sp.csr_matrix(F) if sp.issparse(F) else np.asarray(F, dtype=float)
    if F.shape != (net.n, net.n):
        raise ValueError(f"matrix has shape {F.shape}, expected ({net.n}, {net.n})")
    D = (F + F.T) if sp.issparse(F) else F + F.T
    viol = abs(D).max() if D.shape[0] else 0.0
    if viol > atol:
        raise ValueError(f"flow matrix is not antisymmetric (max |F + F^T| = {viol:g})")
    i, j = net.endpoints
    dense = F.toarray() if sp.issparse(F) else F
    mask = np.ones_like(dense, dtype=bool)
    mask[i, j] = mask[j, i] = False
    off = np.abs(dense[mask]).max() if mask.any() else 0.0
    if off > atol:
        raise ValueError(f"flow matrix is nonzero off the edge set (max {off:g})")
    return np.asarray(dense[i, j], dtype=float)


def flow_vec_to_mat(net: FlowNetwork, f) -> np.ndarray:
    """Dense antisymmetric n-by-n matrix with ``F[i, j] = f_r``."""
    f = _check_flow(net, f)
    i, j = net.endpoints
    F = np.zeros((net.n, net.n))
    F[i, j] = f
    F[j, i] = -f
    return F
