"""Dense small-matrix kernels for the embedding pipeline.

QR is a hand-rolled modified Gram-Schmidt because the pipeline relies on
its rank-deficiency convention: a column that lies in the span of the
previous ones produces a zero column in Q and a zero diagonal entry in R.
The SVD-based routines delegate the factorization to LAPACK and impose a
deterministic sign convention on top, so repeated runs agree bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_RANK_TOL = 1e-8

# Relative singular-value cutoff below which a direction is treated as
# numerical noise of an exactly rank-deficient input (the noise floor of
# the Gram-matrix route is ~sqrt(eps) * sigma_1 ~ 1.5e-8 * sigma_1).
_SIGMA_RANK_CUT = 1e-7


def _as_finite_matrix(A, name: str) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite entries")
    return A


def qr_decompose(A, rank_tol: float = DEFAULT_RANK_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Modified Gram-Schmidt QR with zero columns for dependent input.

    Returns (Q, R) with A = Q @ R. When the residual norm of column j
    falls at or below ``rank_tol`` times the column's original norm, the
    j-th column of Q is left as the zero vector and R[j, j] = 0; all other
    Q columns are orthonormal. The diagonal of R is non-negative.
    """
    A = _as_finite_matrix(A, "A")
    d, k = A.shape
    Q = np.zeros((d, k), dtype=np.float64)
    R = np.zeros((k, k), dtype=np.float64)
    original_norms = np.linalg.norm(A, axis=0)

    for j in range(k):
        u = A[:, j].copy()
        for i in range(j):
            r = Q[:, i] @ u
            R[i, j] = r
            u -= r * Q[:, i]
        norm = float(np.linalg.norm(u))
        if norm <= rank_tol * original_norms[j]:
            R[j, j] = 0.0
        else:
            R[j, j] = norm
            Q[:, j] = u / norm
    return Q, R


def residual_basis(
    C, v, rank_tol: float = DEFAULT_RANK_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Novel direction of ``v`` relative to the columns of ``C``.

    Equivalent to taking the last columns of Q and R from
    ``qr_decompose([C | v])``: ``q`` is the unit residual of ``v`` against
    span(C) (zero when v already lies in it) and ``r`` holds the expansion
    coefficients, its last entry being the residual norm.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"v must be 1-dimensional, got shape {v.shape}")
    C = np.asarray(C, dtype=np.float64)
    if C.size == 0:
        C = C.reshape(v.shape[0], 0)
    Q, R = qr_decompose(np.concatenate([C, v[:, None]], axis=1), rank_tol)
    return Q[:, -1].copy(), R[:, -1].copy()


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD ``A = U @ diag(sigma) @ V.T``.

    U is (d, r) and V is (k, r) with orthonormal columns, r = min(d, k);
    sigma is non-negative and non-increasing. Each U column is sign-fixed
    so its entry of largest absolute value is positive (ties: lowest row
    index wins), with the matching V column flipped to preserve A.
    """

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray


def _fix_signs(U: np.ndarray, V: np.ndarray | None = None):
    """Apply the deterministic sign convention in place-free fashion."""
    U = U.copy()
    V = None if V is None else V.copy()
    for j in range(U.shape[1]):
        anchor = int(np.argmax(np.abs(U[:, j])))
        if U[anchor, j] < 0:
            U[:, j] = -U[:, j]
            if V is not None:
                V[:, j] = -V[:, j]
    return U if V is None else (U, V)


def svd_thin(A) -> SvdResult:
    """Thin singular value decomposition with the fixed sign convention."""
    A = _as_finite_matrix(A, "A")
    try:
        U, sigma, Vt = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        d, k = A.shape
        raise ValueError(f"SVD failed to converge for a {d}x{k} matrix") from exc
    U, V = _fix_signs(U, Vt.T)
    return SvdResult(U=U, sigma=sigma, V=V)


def top_left_singular(X, K: int) -> tuple[np.ndarray, np.ndarray]:
    """Leading left singular vectors of a (typically wide) matrix.

    Works on the d x d Gram matrix X @ X.T via a symmetric
    eigendecomposition, which is much cheaper than a full SVD when X has
    many more columns than rows. Returns (D, sigma) where the columns of D
    are at most min(K, rank(X)) orthonormal directions under the same sign
    convention as :func:`svd_thin`; directions whose singular value falls
    below the numerical-rank cutoff are dropped rather than padded.
    """
    X = _as_finite_matrix(X, "X")
    if K < 1:
        raise ValueError(f"K must be positive, got {K}")
    gram = X @ X.T
    try:
        eigvals, eigvecs = np.linalg.eigh(gram)
    except np.linalg.LinAlgError as exc:
        d, n = X.shape
        raise ValueError(f"eigendecomposition failed for a {d}x{n} matrix") from exc
    order = np.argsort(eigvals)[::-1]
    sigma = np.sqrt(np.clip(eigvals[order], 0.0, None))
    D = eigvecs[:, order]

    rank = int(np.count_nonzero(sigma > sigma[0] * _SIGMA_RANK_CUT)) if sigma[0] > 0 else 0
    keep = min(K, rank)
    return _fix_signs(D[:, :keep]), sigma[:keep].copy()


def pearson(x, y) -> float:
    """Sample Pearson correlation of two equal-length series."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
        raise ValueError(f"series must be 1-dimensional and equal length, got {x.shape} vs {y.shape}")
    if len(x) < 2:
        raise ValueError("correlation needs at least two points")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = float(dx @ dx)
    sy = float(dy @ dy)
    if sx == 0.0 or sy == 0.0:
        raise ValueError("correlation is undefined for a constant series")
    r = float(dx @ dy) / float(np.sqrt(sx * sy))
    return min(1.0, max(-1.0, r))
