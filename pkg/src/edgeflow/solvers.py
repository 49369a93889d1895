"""Numerical kernels: sparse least squares, dense SVD, pivoted QR, box QP."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse.linalg as spla

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class SolveReport:
    """Outcome of an iterative solve.

    ``residual_norm`` is ``||A x - b||`` (damping term excluded) and
    ``normal_residual`` is ``||A^T r - damp^2 x||``, the quantity LSQR drives
    to zero for inconsistent systems.
    """

    iterations: int
    residual_norm: float
    normal_residual: float
    converged: bool
    stop_code: int = 0


# scipy's istop codes 3, 6 (condition limit) and 7 (iteration limit) mean
# the requested accuracy was not reached.
_NOT_CONVERGED = {3, 6, 7}


def lsqr(A, b, tol: float = DEFAULT_TOL, max_iter: int | None = None,
         damp: float = 0.0):
    """Solve ``min ||A x - b||^2 + damp^2 ||x||^2`` with LSQR.

    ``A`` may be a dense array, sparse matrix or
    :class:`scipy.sparse.linalg.LinearOperator`. Starting from ``x = 0``,
    the iterates stay in the row space of ``A``, so a rank-deficient
    problem returns its minimum-norm solution.
    """
    A = spla.aslinearoperator(A)
    b = np.asarray(b, dtype=float)
    rows, cols = A.shape
    if b.shape != (rows,):
        raise ValueError(f"b has shape {b.shape}, operator has {rows} rows")
    if not np.all(np.isfinite(b)):
        raise ValueError("b has non-finite entries")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter is None:
        max_iter = max(4 * cols, 20)
    if cols == 0:
        return np.zeros(0), SolveReport(0, float(np.linalg.norm(b)), 0.0, True)
    out = spla.lsqr(A, b, damp=damp, atol=tol, btol=tol, conlim=1e12,
                    iter_lim=max_iter)
    x, istop, itn = out[0], out[1], out[2]
    if not np.all(np.isfinite(x)):
        raise FloatingPointError("LSQR produced non-finite iterates")
    r = b - A.matvec(x)
    normal = A.rmatvec(r) - damp**2 * x
    report = SolveReport(
        iterations=int(itn),
        residual_norm=float(np.linalg.norm(r)),
        normal_residual=float(np.linalg.norm(normal)),
        converged=istop not in _NOT_CONVERGED,
        stop_code=int(istop),
    )
    return x, report


def orient_columns(V, *others):
    """Flip column signs so each column's largest-magnitude entry is positive.

    The same flips are applied to every array in ``others``. Magnitudes
    within a relative 1e-9 of the column maximum count as ties, which go to
    the first index.
    """
    V = np.array(V, dtype=float)
    if V.size == 0:
        return (V, *(np.array(o, dtype=float) for o in others))
    mag = np.abs(V)
    lead = np.argmax(mag >= mag.max(axis=0) * (1 - 1e-9), axis=0)
    signs = np.sign(V[lead, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    V *= signs
    outs = []
    for o in others:
        o = np.array(o, dtype=float)
        k = min(o.shape[1], len(signs))
        o[:, :k] *= signs[:k]
        outs.append(o)
    return (V, *outs)


def svd_dense(M, ascending: bool = False):
    """Full SVD ``M = U diag(s) V^T`` with deterministic signs.

    Returns ``(U, s, V)`` where ``U`` is rows-by-rows, ``V`` is cols-by-cols
    and ``s`` has length ``cols``: the ``min(rows, cols)`` singular values
    followed by zeros for the extra columns of ``V``. In descending order
    ``U[:, a]`` pairs with ``V[:, a]``. With ``ascending=True`` the columns
    of ``U`` and ``V`` are both reversed, so zero singular values come first
    and ``U[:, a + rows - cols]`` pairs with ``V[:, a]``.

    Signs: every column of ``V`` has its largest-magnitude entry positive;
    columns of ``U`` paired with a nonzero singular value follow their
    ``V`` column, the others get the same rule applied to themselves.
    """
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    rows, cols = M.shape
    U, s, Vt = np.linalg.svd(M, full_matrices=True)
    V = Vt.T
    k = len(s)
    sigma = np.zeros(cols)
    sigma[:k] = s
    V, Upaired = orient_columns(V, U[:, :k])
    U = U.copy()
    U[:, :k] = Upaired
    # left vectors with no (or zero) partner fix their own signs
    tol = s.max() * max(rows, cols) * np.finfo(float).eps if k else 0.0
    free = [a for a in range(rows) if a >= k or s[a] <= tol]
    if free:
        U[:, free] = orient_columns(U[:, free])[0]
    if ascending:
        V = V[:, ::-1]
        sigma = sigma[::-1]
        U = U[:, ::-1]
    return U, sigma, V


def pivoted_qr(M):
    """Householder QR with greedy column pivoting (LAPACK ``geqp3``).

    Returns ``(perm, rdiag)``: the column indices in pivot order and the
    magnitudes ``|R_kk|``, which are non-increasing.
    """
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    if M.size == 0:
        return np.arange(M.shape[1]), np.zeros(0)
    R, perm = scipy.linalg.qr(M, mode="r", pivoting=True)
    k = min(M.shape)
    return np.asarray(perm, dtype=int), np.abs(np.diag(R[:k, :k]))


def _power_norm(Q, dim, iters=100, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(dim)
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(iters):
        y = Q.matvec(x)
        ny = np.linalg.norm(y)
        if ny == 0:
            return 0.0
        lam_new = float(x @ y)
        x = y / ny
        if abs(lam_new - lam) <= 1e-12 * abs(lam_new):
            lam = lam_new
            break
        lam = lam_new
    return max(lam, float(np.linalg.norm(Q.matvec(x))))


def box_qp(Q, c, lower, upper, tol: float = 1e-10, max_iter: int = 200_000,
           x0=None, return_info: bool = False):
    """Minimize ``0.5 x^T Q x + c^T x`` subject to ``lower <= x <= upper``.

    ``Q`` is symmetric positive (semi)definite, given as an array, sparse
    matrix or :class:`~scipy.sparse.linalg.LinearOperator`. Uses accelerated
    projected gradient with step ``1/L`` (``L`` from power iteration) and
    gradient-based restarts. Stops when
    ``||x - clip(x - grad, lower, upper)|| <= tol * (1 + ||x||)``.
    """
    Q = spla.aslinearoperator(Q)
    c = np.asarray(c, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    dim = c.shape[0]
    if Q.shape != (dim, dim) or lower.shape != (dim,) or upper.shape != (dim,):
        raise ValueError("dimension mismatch")
    if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
        raise ValueError("bounds must be finite")
    bad = np.flatnonzero(lower > upper)
    if bad.size:
        raise ValueError(f"lower > upper at indices {bad.tolist()}")

    L = _power_norm(Q, dim) * 1.05
    x = np.clip(np.zeros(dim) if x0 is None else np.asarray(x0, float), lower, upper)
    if L == 0:
        x = np.where(c > 0, lower, np.where(c < 0, upper, x))
        return (x, {"iterations": 0, "stationarity": 0.0}) if return_info else x
    step = 1.0 / L
    z = x.copy()
    t = 1.0
    it = 0
    station = np.inf
    for it in range(1, max_iter + 1):
        g = Q.matvec(z) + c
        x_new = np.clip(z - step * g, lower, upper)
        # restart momentum when it points uphill
        if (z - x_new) @ (x_new - x) > 0:
            t = 1.0
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        z = x_new + ((t - 1.0) / t_new) * (x_new - x)
        x, t = x_new, t_new
        if it % 10 == 0:
            gx = Q.matvec(x) + c
            station = np.linalg.norm(x - np.clip(x - gx, lower, upper))
            if station <= tol * (1.0 + np.linalg.norm(x)):
                break
    x = np.clip(x, lower, upper)
    if return_info:
        return x, {"iterations": it, "stationarity": float(station)}
    return x
