"""Dense complex linear-algebra kernels used by the precoder solvers.

Thin wrappers around numpy/scipy with the numeric conventions the solvers
rely on: pseudoinverse rank threshold, Cholesky pivot ridge, descending
top-k SVD.
"""

from __future__ import annotations

import numpy as np

from .errors import NotPositiveDefinite

# Singular values below max(rows, cols) * sigma_max * RANK_RTOL count as zero.
RANK_RTOL = 1e-12

# Pivot below PIVOT_FLOOR_RTOL * max diagonal triggers one ridge retry;
# pivot below -PIVOT_NEG_RTOL * max(1, max diagonal) is a hard failure.
PIVOT_FLOOR_RTOL = 1e-12
PIVOT_NEG_RTOL = 1e-10


def _as_matrix(m) -> np.ndarray:
    a = np.asarray(m)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"expected a non-empty matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("matrix entries must be finite")
    return a


def frobenius_norm(m) -> float:
    """sqrt of the sum of squared entry magnitudes."""
    return float(np.linalg.norm(_as_matrix(m)))


def pseudoinverse(m) -> np.ndarray:
    """Moore-Penrose pseudoinverse with a numerical-rank cutoff."""
    a = _as_matrix(m)
    rcond = max(a.shape) * RANK_RTOL
    return np.linalg.pinv(a, rcond=rcond)


def _cholesky_attempt(g: np.ndarray) -> tuple[np.ndarray, bool]:
    """One pass of column-wise upper Cholesky (R^H R = G).

    Returns (R, needs_ridge). Raises NotPositiveDefinite on a clearly
    negative pivot.
    """
    n = g.shape[0]
    max_diag = float(np.max(np.abs(np.diag(g).real))) if n else 0.0
    floor = PIVOT_FLOOR_RTOL * max(max_diag, 0.0)
    neg_tol = PIVOT_NEG_RTOL * max(1.0, max_diag)
    r = np.zeros_like(g)
    for j in range(n):
        # column above the pivot: solve R[:j,:j]^H r = G[:j, j]
        for i in range(j):
            s = g[i, j] - np.dot(r[:i, i].conj(), r[:i, j])
            r[i, j] = s / r[i, i]
        pivot = g[j, j].real - float(np.real(np.dot(r[:j, j].conj(), r[:j, j])))
        if pivot < -neg_tol:
            raise NotPositiveDefinite(f"pivot {pivot:.3e} at column {j}")
        if pivot <= floor:
            return r, True
        r[j, j] = np.sqrt(pivot)
    return r, False


def cholesky_upper(g) -> np.ndarray:
    """Upper-triangular R with R^H R = G for Hermitian PSD G.

    A near-zero pivot triggers a single diagonal ridge
    (1e-10 * trace(G)/n) and one refactorization; a pivot that is
    negative beyond tolerance raises NotPositiveDefinite.
    """
    a = _as_matrix(g)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"cholesky needs a square matrix, got {a.shape}")
    r, needs_ridge = _cholesky_attempt(a)
    if not needs_ridge:
        return r
    n = a.shape[0]
    eps = 1e-10 * float(np.trace(a).real) / n
    if eps <= 0.0:
        raise NotPositiveDefinite("ridge unavailable: non-positive trace")
    ridged = a + eps * np.eye(n, dtype=a.dtype)
    r, needs_ridge = _cholesky_attempt(ridged)
    if needs_ridge:
        raise NotPositiveDefinite("pivot still degenerate after ridge")
    return r


def svd_topk(m, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Top-k left singular vectors and singular values (descending).

    Returns (U_k, S_k) with U_k of shape (rows, k) and S_k the k x k
    diagonal matrix of the k largest singular values.
    """
    a = _as_matrix(m)
    if not 1 <= k <= min(a.shape):
        raise ValueError(f"k={k} out of range for shape {a.shape}")
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    return u[:, :k], np.diag(s[:k])
