"""Edge-space spectral basis from the SVD of the incidence matrix.

Columns of ``V`` are ordered by increasing singular value, so the
cycle-space (divergence-free) columns come first and the cut-space
(gradient) columns follow.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .graph import FlowNetwork, incidence_matrix
from .solvers import svd_dense

ZERO_SIGMA_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    """Orthonormal edge basis split into cycle and cut space.

    Attributes
    ----------
    sigma : ndarray, shape (m,)
        Singular values in ascending order, zero-padded to length ``m``;
        the first ``c`` are treated as exactly zero.
    V : ndarray, shape (m, m)
        Right singular vectors, columns matching ``sigma``.
    U : ndarray, shape (n, n)
        Left singular vectors in ascending order; ``U[:, a + n - m]`` pairs
        with ``V[:, a]`` for the cut-space columns.
    c : int
        Number of cycle-space columns.
    """

    sigma: np.ndarray
    V: np.ndarray
    U: np.ndarray
    c: int
    warnings: tuple[str, ...] = field(default=())

    @property
    def m(self) -> int:
        return self.V.shape[0]

    @property
    def n(self) -> int:
        return self.U.shape[0]

    @property
    def V_C(self) -> np.ndarray:
        return self.V[:, : self.c]

    @property
    def V_R(self) -> np.ndarray:
        return self.V[:, self.c :]

    def left_vector(self, alpha: int) -> np.ndarray:
        """Left singular vector paired with column ``alpha`` of ``V``."""
        a = alpha + self.n - self.m
        if alpha < self.c or not 0 <= a < self.n:
            raise IndexError(f"column {alpha} has no paired left vector")
        return self.U[:, a]


@dataclass(frozen=True)
class SpectralCoefficients:
    p: np.ndarray
    c: int

    @property
    def p_C(self) -> np.ndarray:
        return self.p[: self.c]

    @property
    def p_R(self) -> np.ndarray:
        return self.p[self.c :]


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@lru_cache(maxsize=16)
def _basis_cached(net: FlowNetwork, rtol: float) -> SpectralBasis:
    B = incidence_matrix(net).toarray()
    U, sigma, V = svd_dense(B, ascending=True)
    smax = sigma.max() if sigma.size else 0.0
    thr = rtol * smax
    zero = sigma < thr
    c = int(zero.sum())
    notes = []
    near = (sigma > thr / 10) & (sigma < thr * 10)
    if near.any():
        notes.append(
            f"{int(near.sum())} singular value(s) within a factor 10 of the "
            f"zero threshold {thr:.3g}"
        )
    if c != net.cycle_rank:
        notes.append(f"found {c} zero singular values, expected {net.cycle_rank}")
    sigma = np.where(zero, 0.0, sigma)
    return SpectralBasis(_frozen(sigma), _frozen(V), _frozen(U), c, tuple(notes))


def compute_basis(net: FlowNetwork, rtol: float = ZERO_SIGMA_RTOL) -> SpectralBasis:
    """SVD-based spectral basis of ``net``; cached per network.

    Singular values below ``rtol * max(sigma)`` count as zero.
    """
    if not net.is_connected:
        warnings.warn(
            f"network has {net.n_components} components; cut space has "
            f"dimension n - {net.n_components}",
            stacklevel=2,
        )
    basis = _basis_cached(net, float(rtol))
    for note in basis.warnings:
        warnings.warn(note, stacklevel=2)
    return basis


def to_spectral(basis: SpectralBasis, f) -> SpectralCoefficients:
    f = np.asarray(f, dtype=float)
    if f.shape != (basis.m,):
        raise ValueError(f"flow has shape {f.shape}, expected ({basis.m},)")
    return SpectralCoefficients(basis.V.T @ f, basis.c)


def from_spectral(basis: SpectralBasis, p) -> np.ndarray:
    p = p.p if isinstance(p, SpectralCoefficients) else np.asarray(p, dtype=float)
    return basis.V @ p


def spectral_ratio(basis: SpectralBasis, f) -> float:
    """``||p_R|| / ||p_C||``: cut-space energy relative to cycle-space energy.

    A cycle part at rounding level (``<= 1e-12 ||p||``) counts as zero and
    gives ``inf``.
    """
    if basis.c == 0:
        raise ValueError("spectral ratio is undefined without a cycle space (c = 0)")
    coef = to_spectral(basis, f)
    pc = np.linalg.norm(coef.p_C)
    pr = np.linalg.norm(coef.p_R)
    if pc <= 1e-12 * np.hypot(pc, pr):
        return np.inf
    return float(pr / pc)


def spectrum_rows(basis: SpectralBasis, f, target_rms: float = 0.2):
    """Rows ``(percentile, sigma, |p| normalized)`` in ascending-sigma order.

    Magnitudes are scaled so the root-mean-square of the cycle-space
    coefficients equals ``target_rms``. The percentile of column ``a`` is
    ``100 * (a + 1) / m``.
    """
    p = np.abs(to_spectral(basis, f).p)
    if basis.c:
        rms = np.sqrt(np.mean(p[: basis.c] ** 2))
        scale = target_rms / rms if rms > 0 else 1.0
    else:
        scale = 1.0
    m = basis.m
    return [(100.0 * (a + 1) / m, float(basis.sigma[a]), float(p[a] * scale))
            for a in range(m)]
