"""Semi-supervised edge-flow inference and its baselines."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .graph import FlowNetwork, incidence_matrix, laplacian, line_graph
from .solvers import DEFAULT_TOL, lsqr


@dataclass(frozen=True, eq=False)
class LabelSet:
    """Measured flows on a subset of edges.

    ``indices`` are zero-based edge indices in selection order; ``values``
    are the measurements oriented along each edge's reference orientation.
    """

    m: int
    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=int).reshape(-1)
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if idx.shape != vals.shape:
            raise ValueError("indices and values differ in length")
        if idx.size and (idx.min() < 0 or idx.max() >= self.m):
            raise IndexError(f"edge index outside [0, {self.m})")
        if np.unique(idx).size != idx.size:
            raise ValueError("duplicate labeled edge")
        if not np.all(np.isfinite(vals)):
            raise ValueError("non-finite measurement")
        idx.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_truth(cls, truth, indices) -> "LabelSet":
        truth = np.asarray(truth, dtype=float)
        indices = np.asarray(indices, dtype=int)
        return cls(truth.shape[0], indices, truth[indices])

    @property
    def unlabeled(self) -> np.ndarray:
        mask = np.ones(self.m, dtype=bool)
        mask[self.indices] = False
        return np.flatnonzero(mask)

    @property
    def f0(self) -> np.ndarray:
        """Measured values on labeled edges, zero elsewhere."""
        f = np.zeros(self.m)
        f[self.indices] = self.values
        return f

    def expansion(self) -> sp.csr_matrix:
        """Expansion operator: m-by-m_U selector of the unlabeled edges."""
        u = self.unlabeled
        return sp.csr_matrix(
            (np.ones(u.size), (u, np.arange(u.size))), shape=(self.m, u.size)
        )


@dataclass(frozen=True)
class SSLConfig:
    lam: float = 0.1
    tol: float = DEFAULT_TOL
    max_iter: int | None = None

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValueError("lambda must be non-negative")


def objective(net: FlowNetwork, f, lam: float) -> float:
    """``||B f||^2 + lam^2 ||f||^2``."""
    f = np.asarray(f, dtype=float)
    div = incidence_matrix(net) @ f
    return float(div @ div + lam**2 * (f @ f))


def _check_labels(net, labels):
    if labels.m != net.m:
        raise ValueError(f"label set is for m={labels.m}, network has m={net.m}")


def infer_divergence_free(net: FlowNetwork, labels: LabelSet,
                          cfg: SSLConfig = SSLConfig(), return_report: bool = False):
    """Fill in unlabeled edge flows with minimal divergence.

    Solves ``min ||B f||^2 + lam^2 ||f||^2`` subject to ``f = f_hat`` on the
    labeled edges by writing ``f = f0 + Phi f_U`` and running LSQR on
    ``min ||B Phi f_U + B f0||^2 + lam^2 ||f_U||^2``. Labeled entries are
    copied, not fitted, so they match the measurements exactly.
    """
    _check_labels(net, labels)
    f0 = labels.f0
    u = labels.unlabeled
    report = None
    if u.size:
        B = incidence_matrix(net)
        BU = B[:, u]
        x, report = lsqr(BU, -(B @ f0), tol=cfg.tol, max_iter=cfg.max_iter,
                         damp=cfg.lam)
        f0[u] = x
    return (f0, report) if return_report else f0


def baseline_zero_fill(net: FlowNetwork, labels: LabelSet) -> np.ndarray:
    """Measured values on labeled edges, zero on the rest."""
    _check_labels(net, labels)
    return labels.f0


def vertex_ssl_harmonic(graph: FlowNetwork, indices, values) -> np.ndarray:
    """Harmonic extension of vertex labels (minimize ``y^T L y``, labels fixed).

    Solves ``L_UU y_U = -L_UL y_L``. Every connected component must hold
    at least one labeled vertex.
    """
    indices = np.asarray(indices, dtype=int)
    values = np.asarray(values, dtype=float)
    n = graph.n
    y = np.zeros(n)
    y[indices] = values
    mask = np.ones(n, dtype=bool)
    mask[indices] = False
    free = np.flatnonzero(mask)
    if free.size == 0:
        return y
    _, comp = graph.components
    unlabeled_comps = sorted(set(comp[free]) - set(comp[indices]))
    if unlabeled_comps:
        raise ValueError(
            f"connected component {unlabeled_comps[0]} has no labeled vertex"
        )
    L = laplacian(graph).tocsc()
    rhs = -(L[free][:, indices] @ values)
    LUU = L[free][:, free]
    y[free] = spla.spsolve(LUU.tocsc(), rhs) if free.size > 1 else rhs / LUU.toarray()[0, 0]
    return y


def baseline_line_graph(net: FlowNetwork, labels: LabelSet) -> np.ndarray:
    """Vertex SSL on the line graph, signed flows used as plain labels."""
    _check_labels(net, labels)
    if labels.indices.size == net.m:
        return labels.f0
    return vertex_ssl_harmonic(line_graph(net), labels.indices, labels.values)


METHODS = {
    "flowssl": infer_divergence_free,
    "zerofill": lambda net, labels, cfg=None: baseline_zero_fill(net, labels),
    "linegraph": lambda net, labels, cfg=None: baseline_line_graph(net, labels),
}


def infer(method: str, net: FlowNetwork, labels: LabelSet,
          cfg: SSLConfig = SSLConfig()) -> np.ndarray:
    try:
        fn = METHODS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(METHODS)}") from None
    return fn(net, labels, cfg)
