import itertools

import numpy as np
import pytest
import scipy.linalg
import scipy.sparse.linalg as spla

from edgeflow import incidence_matrix
from edgeflow.graph import edge_laplacian
from edgeflow.solvers import box_qp, lsqr, pivoted_qr, svd_dense


# -- lsqr -------------------------------------------------------------------

def test_lsqr_identity():
    b = np.array([3.0, -1.0, 2.5, 0.0, 7.0])
    x, rep = lsqr(np.eye(5), b)
    np.testing.assert_allclose(x, b, rtol=1e-12)
    assert rep.iterations <= 2 and rep.converged


def test_lsqr_mean():
    x, _ = lsqr(np.array([[1.0], [1.0]]), np.array([1.0, 3.0]))
    np.testing.assert_allclose(x, [2.0], rtol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_lsqr_matches_dense_qr(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((50, 30))
    b = rng.standard_normal(50)
    Q, R = scipy.linalg.qr(A, mode="economic")
    ref = scipy.linalg.solve_triangular(R, Q.T @ b)
    x, rep = lsqr(A, b)
    assert rep.converged
    assert np.linalg.norm(x - ref) <= 1e-8 * np.linalg.norm(ref)
    assert rep.normal_residual <= 1e-8 * np.linalg.norm(A, 2) * rep.residual_norm


def test_lsqr_minimum_norm_when_rank_deficient():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((20, 5)) @ rng.standard_normal((5, 12))
    b = rng.standard_normal(20)
    x, _ = lsqr(A, b, tol=1e-14)
    np.testing.assert_allclose(x, np.linalg.pinv(A) @ b, atol=1e-8)


def test_lsqr_damped_matches_stacked_system():
    rng = np.random.default_rng(4)
    A = rng.standard_normal((15, 10))
    b = rng.standard_normal(15)
    lam = 0.3
    x, _ = lsqr(A, b, damp=lam)
    ref = np.linalg.lstsq(np.vstack([A, lam * np.eye(10)]), np.r_[b, np.zeros(10)],
                          rcond=None)[0]
    np.testing.assert_allclose(x, ref, rtol=1e-8)


def test_lsqr_residual_non_increasing():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((40, 25))
    b = rng.standard_normal(40)
    res = []
    for k in range(1, 26):
        x = spla.lsqr(A, b, atol=0, btol=0, iter_lim=k)[0]
        res.append(np.linalg.norm(A @ x - b))
    assert all(r2 <= r1 * (1 + 1e-12) for r1, r2 in zip(res, res[1:]))


def test_lsqr_consistent_system_converges_within_min_dim():
    rng = np.random.default_rng(6)
    A = rng.standard_normal((30, 12))
    b = A @ rng.standard_normal(12)
    x, rep = lsqr(A, b, max_iter=12)
    assert rep.converged and rep.iterations <= 12
    assert rep.residual_norm <= 1e-8 * np.linalg.norm(b)


def test_lsqr_errors():
    with pytest.raises(ValueError):
        lsqr(np.eye(3), np.ones(4))
    with pytest.raises(ValueError):
        lsqr(np.eye(2), np.array([1.0, np.nan]))


# -- svd --------------------------------------------------------------------

def test_svd_k3_against_edge_laplacian(k3):
    B = incidence_matrix(k3).toarray()
    U, s, V = svd_dense(B)
    evals, evecs = np.linalg.eigh(edge_laplacian(k3).toarray())
    np.testing.assert_allclose(np.sort(s**2), np.sort(evals), atol=1e-12)
    np.testing.assert_allclose(np.sort(s), [0, np.sqrt(3), np.sqrt(3)], atol=1e-12)
    null = V[:, np.argmin(s)]
    np.testing.assert_allclose(null, np.array([1, -1, 1]) / np.sqrt(3), atol=1e-12)


def test_svd_p3(p3):
    _, s, _ = svd_dense(incidence_matrix(p3).toarray())
    # path Laplacian eigenvalues are 0, 1, 3
    np.testing.assert_allclose(s, [np.sqrt(3), 1.0], atol=1e-12)


def test_svd_zero_matrix():
    _, s, V = svd_dense(np.zeros((3, 4)))
    np.testing.assert_array_equal(s, 0)
    np.testing.assert_allclose(V.T @ V, np.eye(4), atol=1e-12)


@pytest.mark.parametrize("shape", [(6, 9), (9, 6), (5, 5)])
@pytest.mark.parametrize("ascending", [False, True])
def test_svd_reconstruction_and_signs(shape, ascending):
    rng = np.random.default_rng(sum(shape))
    M = rng.standard_normal(shape)
    U, s, V = svd_dense(M, ascending=ascending)
    rows, cols = shape
    np.testing.assert_allclose(U.T @ U, np.eye(rows), atol=1e-10)
    np.testing.assert_allclose(V.T @ V, np.eye(cols), atol=1e-10)
    if ascending:
        assert np.all(np.diff(s) >= 0)
        for a in range(cols):
            if s[a] > 0:
                np.testing.assert_allclose(M @ V[:, a], s[a] * U[:, a + rows - cols], atol=1e-10)
    else:
        assert np.all(np.diff(s) <= 0)
        S = np.zeros(shape)
        k = min(shape)
        S[:k, :k] = np.diag(s[:k])
        np.testing.assert_allclose(U @ S @ V.T, M, atol=1e-10 * np.abs(M).max())
    lead = V[np.argmax(np.abs(V), axis=0), np.arange(cols)]
    assert np.all(lead > 0)


# -- pivoted QR -------------------------------------------------------------

def test_pivoted_qr_identity():
    perm, rdiag = pivoted_qr(np.eye(3))
    assert sorted(perm) == [0, 1, 2]
    np.testing.assert_allclose(rdiag, 1)


def test_pivoted_qr_larger_norm_first():
    perm, _ = pivoted_qr(np.array([[2.0, 1.0], [0.0, 0.0]]))
    assert perm[0] == 0


@pytest.mark.parametrize("seed", range(5))
def test_pivoted_qr_beats_random_subsets(seed):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((4, 8))
    perm, rdiag = pivoted_qr(M)
    assert np.all(np.diff(rdiag) <= 1e-12)
    smin = lambda cols: np.linalg.svd(M[:, cols], compute_uv=False).min()  # noqa: E731
    picked = smin(perm[:4])
    others = [smin(rng.choice(8, 4, replace=False)) for _ in range(100)]
    assert picked >= np.median(others)
    best = max(smin(list(c)) for c in itertools.combinations(range(8), 4))
    assert picked >= 0.25 * best


def test_pivoted_qr_rank_revealing_on_orthonormal_rows():
    rng = np.random.default_rng(9)
    Q, _ = np.linalg.qr(rng.standard_normal((10, 4)))
    M = Q.T
    M[:, :3] = 0.0  # some columns carry nothing
    M /= np.linalg.norm(M, axis=1, keepdims=True)
    perm, _ = pivoted_qr(M)
    assert np.linalg.svd(M[:, perm[:4]], compute_uv=False).min() > 1e-8
    assert not set(perm[:4]) & {0, 1, 2}


# -- box QP -----------------------------------------------------------------

def active_set_oracle(Q, c, lo, hi):
    """Enumerate every (lower, upper, free) pattern; return the KKT point."""
    d = len(c)
    best = None
    for pattern in itertools.product((0, 1, 2), repeat=d):
        pattern = np.array(pattern)
        free = pattern == 2
        x = np.where(pattern == 0, lo, hi).astype(float)
        if free.any():
            rhs = -(c[free] + Q[np.ix_(free, ~free)] @ x[~free])
            x[free] = np.linalg.solve(Q[np.ix_(free, free)], rhs)
        if np.any(x < lo - 1e-12) or np.any(x > hi + 1e-12):
            continue
        g = Q @ x + c
        if np.any(g[pattern == 0] < -1e-10) or np.any(g[pattern == 1] > 1e-10):
            continue
        val = 0.5 * x @ Q @ x + c @ x
        if best is None or val < best[0]:
            best = (val, x)
    return best[1]


def test_box_qp_interior():
    x = box_qp(2 * np.eye(4), np.zeros(4), -np.ones(4), np.ones(4))
    np.testing.assert_allclose(x, 0, atol=1e-12)


def test_box_qp_clipped():
    x = box_qp(2 * np.eye(4), np.full(4, -4.0), -np.ones(4), np.ones(4))
    np.testing.assert_array_equal(x, 1.0)


@pytest.mark.parametrize("seed", range(3))
def test_box_qp_matches_active_set_oracle(seed):
    rng = np.random.default_rng(seed)
    d = 10
    A = rng.standard_normal((d, d))
    Q = A @ A.T + 0.5 * np.eye(d)
    c = rng.standard_normal(d) * 3
    lo = -rng.uniform(0.05, 1.0, d)
    hi = rng.uniform(0.05, 1.0, d)
    x = box_qp(Q, c, lo, hi, tol=1e-12)
    ref = active_set_oracle(Q, c, lo, hi)
    np.testing.assert_allclose(x, ref, atol=1e-6)
    assert np.all(x >= lo) and np.all(x <= hi)


def test_box_qp_stationarity_and_bounds_exact():
    rng = np.random.default_rng(7)
    d = 30
    A = rng.standard_normal((d, d))
    Q = A @ A.T + 1e-3 * np.eye(d)
    c = rng.standard_normal(d)
    lo, hi = -0.1 * np.ones(d), 0.2 * np.ones(d)
    tol = 1e-10
    x, info = box_qp(Q, c, lo, hi, tol=tol, return_info=True)
    g = Q @ x + c
    assert np.linalg.norm(x - np.clip(x - g, lo, hi)) <= tol * (1 + np.linalg.norm(x))
    assert np.all(x >= lo) and np.all(x <= hi)


def test_box_qp_point_box():
    lo = np.array([0.5, -2.0])
    x = box_qp(np.eye(2), np.ones(2), lo, lo)
    np.testing.assert_array_equal(x, lo)


def test_box_qp_errors():
    with pytest.raises(ValueError, match="lower > upper"):
        box_qp(np.eye(2), np.zeros(2), [0, 1], [1, 0])
    with pytest.raises(ValueError, match="finite"):
        box_qp(np.eye(2), np.zeros(2), [0, -np.inf], [1, 1])
