"""Choosing which edges to measure."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg

from .graph import FlowNetwork, laplacian
from .solvers import orient_columns, pivoted_qr
from .spectral import SpectralBasis, compute_basis


@dataclass(frozen=True)
class SelectionResult:
    """Selected zero-based edge indices, in selection order."""

    indices: np.ndarray
    method: str
    clusters: np.ndarray | None = None
    cuts: list = field(default_factory=list)


def _remaining_pivots(M, exclude, m):
    """Pivot order of the columns of ``M`` not in ``exclude``."""
    rest = np.setdiff1d(np.arange(m), np.asarray(exclude, dtype=int))
    if rest.size == 0 or M.shape[0] == 0:
        return rest
    perm, _ = pivoted_qr(M[:, rest])
    return rest[perm]


def _cycle_tail(VC, chosen, k):
    """Up to ``k`` more rows of ``VC``, each aimed at the weakest direction of
    the Gram matrix of the rows chosen so far."""
    chosen = list(chosen)
    taken = np.zeros(VC.shape[0], dtype=bool)
    taken[chosen] = True
    G = VC[chosen].T @ VC[chosen]
    for _ in range(k):
        _, vec = scipy.linalg.eigh(G, subset_by_index=[0, 0])
        score = (VC @ vec[:, 0]) ** 2
        score[taken] = -1.0
        if score.max() <= 1e-20:
            score = np.where(taken, -1.0, (VC**2).sum(axis=1))
        r = int(np.argmax(score))
        if score[r] <= 1e-20:
            break
        chosen.append(r)
        taken[r] = True
        G += np.outer(VC[r], VC[r])
    return chosen


def select_rrqr(basis: SpectralBasis, m_L: int, seed=None) -> SelectionResult:
    """Greedy pivoted QR on the rows of the cycle basis.

    The first ``min(m_L, c)`` pivots of ``V_C^T`` are the cycle-space picks.
    Past ``c``, each extra edge is the one with the largest component along
    the least-covered cycle direction; once only cut-space edges remain they
    are ordered by pivoted QR on ``V_R^T``. On a tree (``c = 0``) falls back
    to a uniform random choice.
    """
    m = basis.m
    if not 0 <= m_L <= m:
        raise ValueError(f"m_L must lie in [0, {m}]")
    if basis.c == 0:
        warnings.warn("no cycle space (tree); falling back to random selection",
                      stacklevel=2)
        return SelectionResult(select_random(m, m_L, seed).indices, "random")
    return SelectionResult(_rrqr_order(basis, m_L).copy(), "rrqr")


@lru_cache(maxsize=64)
def _rrqr_order(basis: SpectralBasis, m_L: int) -> np.ndarray:
    m = basis.m
    perm, rdiag = pivoted_qr(basis.V_C.T)
    # pivots past the numerical rank of V_C carry no cycle information
    rank = int(np.sum(rdiag > 1e-10 * max(rdiag[0], 1e-300)))
    chosen = perm[:min(rank, m_L)]
    if m_L > rank:
        chosen = np.array(_cycle_tail(basis.V_C, chosen, m_L - rank), dtype=int)
    if m_L > chosen.size:
        chosen = np.concatenate([chosen, _remaining_pivots(basis.V_R.T, chosen, m)])
    return np.asarray(chosen[:m_L], dtype=int)


def select_random(m: int, m_L: int, seed=None) -> SelectionResult:
    rng = np.random.default_rng(seed)
    return SelectionResult(rng.choice(m, size=m_L, replace=False), "random")


def spectral_embedding(net: FlowNetwork, dim: int = 2) -> np.ndarray:
    """Vertex coordinates from the Laplacian eigenvectors with the smallest
    nonzero eigenvalues (one per connected component is skipped)."""
    L = laplacian(net).toarray()
    k = net.n_components
    hi = min(k + dim, net.n) - 1
    if hi < k:
        return np.zeros((net.n, dim))
    _, vecs = scipy.linalg.eigh(L, subset_by_index=[k, hi])
    vecs = orient_columns(vecs)[0]
    if vecs.shape[1] < dim:
        vecs = np.hstack([vecs, np.zeros((net.n, dim - vecs.shape[1]))])
    return vecs


def _median_split(X, members):
    # coincident points: halve by first coordinate, ties by vertex id
    order = np.lexsort((members, X[:, 0]))
    half = len(members) // 2
    mask = np.zeros(len(members), dtype=bool)
    mask[order[half:]] = True
    return mask


def two_means(X, members, max_iter: int = 100) -> np.ndarray:
    """Lloyd 2-means on the rows of ``X``; returns a boolean side mask.

    Centers start at the points with minimum and maximum first coordinate.
    Falls back to a median split when the clustering degenerates.
    """
    if len(members) < 2:
        return np.zeros(len(members), dtype=bool)
    spread = np.ptp(X, axis=0)
    if np.all(spread <= 1e-12 * max(1.0, np.abs(X).max())):
        return _median_split(X, members)
    centers = np.stack([X[np.argmin(X[:, 0])], X[np.argmax(X[:, 0])]])
    if np.allclose(centers[0], centers[1]):
        far = np.argmax(np.linalg.norm(X - centers[0], axis=1))
        centers[1] = X[far]
    side = None
    for _ in range(max_iter):
        d = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new = d[:, 1] < d[:, 0]
        if side is not None and np.array_equal(new, side):
            break
        side = new
        if side.all() or not side.any():
            return _median_split(X, members)
        centers = np.stack([X[~side].mean(axis=0), X[side].mean(axis=0)])
    return side


def select_recursive_bisection(net: FlowNetwork, m_L: int, embed_dim: int = 2,
                               seed=None) -> SelectionResult:
    """Label the edges cut by repeated bisection of the largest cluster.

    The spectral embedding is computed once for the whole graph. Each round
    splits the cluster with the most vertices (lowest cluster id on ties)
    by 2-means and appends every edge running between the two halves.
    Stops once ``m_L`` edges are collected and keeps the earliest-added
    ``m_L`` (within a round, lowest edge index first).
    """
    m = net.m
    if not 0 <= m_L <= m:
        raise ValueError(f"m_L must lie in [0, {m}]")
    X = spectral_embedding(net, embed_dim)
    clusters = np.zeros(net.n, dtype=int)
    i, j = net.endpoints
    selected: list[int] = []
    taken = np.zeros(m, dtype=bool)
    cuts = []
    n_clusters = 1
    while len(selected) < m_L:
        sizes = np.bincount(clusters, minlength=n_clusters)
        target = int(np.argmax(sizes))
        if sizes[target] < 2:
            break
        members = np.flatnonzero(clusters == target)
        side = two_means(X[members], members)
        clusters[members[side]] = n_clusters
        cut = np.flatnonzero(
            ((clusters[i] == target) & (clusters[j] == n_clusters))
            | ((clusters[i] == n_clusters) & (clusters[j] == target))
        )
        cuts.append((target, n_clusters, cut))
        n_clusters += 1
        new = cut[~taken[cut]]
        taken[new] = True
        selected.extend(new.tolist())
    return SelectionResult(np.asarray(selected[:m_L], dtype=int), "rb",
                           clusters=clusters, cuts=cuts)


def select(method: str, net: FlowNetwork, m_L: int, seed=None,
           embed_dim: int = 2) -> SelectionResult:
    if method == "random":
        return select_random(net.m, m_L, seed)
    if method == "rrqr":
        return select_rrqr(compute_basis(net), m_L, seed)
    if method == "rb":
        return select_recursive_bisection(net, m_L, embed_dim, seed)
    raise ValueError(f"unknown selection method {method!r}")
