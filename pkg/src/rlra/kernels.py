"""Dense factorization kernels: pivoted LU, economy QR, pseudoinverse solves,
truncated SVD oracle.

The LU elimination runs on the selected backend (compiled or NumPy); QR and
SVD are delegated to LAPACK.  All shapes are economy: r = min(m, n).
"""

from typing import NamedTuple

import numpy as np
from scipy.linalg import solve_triangular

from . import backend, core
from .errors import IllPosedPseudoinverse

# R diagonal below this fraction of ||L||_F marks the pseudoinverse ill-posed
PINV_RTOL = 1e-12


class PivotedLU(NamedTuple):
    L: np.ndarray  # m x r, unit-diagonal lower trapezoidal
    U: np.ndarray  # r x n, upper trapezoidal
    p: np.ndarray  # row permutation: A[p, :] = L @ U


class EconomyQR(NamedTuple):
    Q: np.ndarray  # m x r, orthonormal columns
    R: np.ndarray  # r x n


class TruncatedSVD(NamedTuple):
    U: np.ndarray  # m x k
    S: np.ndarray  # k, nonincreasing
    V: np.ndarray  # n x k


def plu(a):
    """Partial-pivot LU: returns (L, U, p) with A[p, :] = L @ U.

    The pivot is the max-magnitude entry of the active column.  A column
    whose active part is negligible (relative to the whole column) gets no
    swap and a zero L column below the diagonal, so rank-deficient input is
    handled without error.
    """
    a = core.as_fmatrix(a)
    m, n = a.shape
    lu = a.copy(order="F")
    piv = np.arange(m, dtype=np.int64)
    backend.plu_inplace(lu, piv)
    r = min(m, n)
    L = np.tril(lu[:, :r], -1)
    L[np.arange(r), np.arange(r)] = 1.0
    U = np.triu(lu[:r, :])
    return PivotedLU(L, U, piv)


def eqr(a):
    """Economy QR via Householder reflections (LAPACK)."""
    a = np.asarray(a, dtype=np.float64)
    q, r = np.linalg.qr(a, mode="reduced")
    return EconomyQR(q, r)


def pinv_factor(l):
    """Economy QR of a tall full-column-rank matrix, validated for pinv solves.

    Raises IllPosedPseudoinverse when any |R_ii| falls below
    PINV_RTOL * ||L||_F, i.e. the least-squares system is numerically
    rank-deficient.
    """
    l = np.asarray(l, dtype=np.float64)
    if l.shape[0] < l.shape[1]:
        raise ValueError(f"need a tall matrix, got {l.shape}")
    q, r = np.linalg.qr(l, mode="reduced")
    if np.abs(np.diag(r)).min(initial=np.inf) <= PINV_RTOL * core.fro_norm(l):
        raise IllPosedPseudoinverse(
            f"matrix of shape {l.shape} is numerically rank-deficient"
        )
    return EconomyQR(q, r)


def pinv_apply(l, m):
    """L^+ @ M for tall full-rank L, via QR and back substitution.

    Solves R X = Q^T M instead of forming (L^T L)^{-1}; the normal-equations
    formula is the definition, not the algorithm.
    """
    q, r = pinv_factor(l)
    return solve_triangular(r, q.T @ np.asarray(m, dtype=np.float64), lower=False)


def pinv_transpose_apply(l, m):
    """(L^T)^+ @ M for tall full-rank L: the minimum-norm solve Q R^{-T} M."""
    q, r = pinv_factor(l)
    x = solve_triangular(r, np.asarray(m, dtype=np.float64), trans="T", lower=False)
    return q @ x


def projector_apply(q, m):
    """Orthogonal projection Q (Q^T M) onto the column span of orthonormal Q."""
    q = np.asarray(q, dtype=np.float64)
    return q @ (q.T @ np.asarray(m, dtype=np.float64))


def tsvd(a, k):
    """Top-k singular triplets; the optimal rank-k approximation oracle."""
    a = np.asarray(a, dtype=np.float64)
    r = min(a.shape)
    if not 1 <= k <= r:
        raise ValueError(f"k={k} outside 1..{r}")
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    return TruncatedSVD(u[:, :k], s[:k], vt[:k].T)


def spec_norm(a):
    """Largest singular value."""
    return float(tsvd(a, 1).S[0])
