"""Fixed-rank drivers: randomized SVD and the two randomized LU factorizations.

All three share the sketch machinery in rangefinder and consume a strict
pass budget: 2p + 2 products for the SVD and LU drivers at exponent p, and
exactly v products for the pass-parameterized LU driver.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import solve_triangular

from . import core, kernels, rangefinder
from .accessors import as_accessor


@dataclass
class LowRankLU:
    """Rank-k factorization A[p, :][:, q] ~ L @ U.

    L is m x k lower trapezoidal, U is k x n upper trapezoidal, p and q are
    row and column index permutations.
    """

    p: np.ndarray
    q: np.ndarray
    L: np.ndarray
    U: np.ndarray
    rank: int


class LowRankSVD(NamedTuple):
    U: np.ndarray
    S: np.ndarray
    V: np.ndarray


def _validate_rank(a, k, q_os):
    m, n = a.shape
    if k < 1:
        raise ValueError("target rank must be >= 1")
    if q_os < 0:
        raise ValueError("oversampling must be >= 0")
    if k + q_os > min(m, n):
        raise ValueError(f"sketch width {k + q_os} exceeds min{(m, n)}")


def randsvd(a, k, q_os=10, p=1, seed=0, truncate=False):
    """Randomized SVD with QR-reorthogonalized power iteration.

    Parameters
    ----------
    a : array or accessor
    k : target rank
    q_os : oversampling columns on top of k
    p : power iteration exponent (2p + 2 passes total)
    seed : Gaussian draw seed
    truncate : return only the leading k triplets instead of the full
        sketch width l = k + q_os

    Returns
    -------
    LowRankSVD with orthonormal U (m x l), S nonincreasing, V (n x l).
    """
    a = as_accessor(a)
    _validate_rank(a, k, q_os)
    basis = rangefinder.power_basis_q(a, k + q_os, p, seed)
    b = a.rmatmul(basis.V).T  # = Q^T A, one pass
    ub, s, vt = np.linalg.svd(b, full_matrices=False)
    u = basis.V @ ub
    if truncate:
        return LowRankSVD(u[:, :k], s[:k], vt[:k].T)
    return LowRankSVD(u, s, vt.T)


def randlu(a, k, q_os=10, p=1, seed=0):
    """Randomized LU: LU-stabilized sketch, truncation to k, pivoted assembly.

    The sketch L factor is cut to its first k columns; B = L_y^+ P A is formed
    through the accessor (one transpose product); the column-pivoted step is a
    partial-pivot LU of B^T.  2p + 2 passes total.

    Raises IllPosedPseudoinverse when the truncated sketch is numerically
    rank-deficient (target rank above the numerical rank of A).
    """
    a = as_accessor(a)
    _validate_rank(a, k, q_os)
    sk = rangefinder.power_basis_lu_l(a, k + q_os, p, seed)
    return _assemble_from_sketch_lu(a, sk, k)


def randlu_noreorth(a, k, q_os=10, p=1, seed=0):
    """randlu with the raw sketch A (A^T A)^p Omega, no stabilization.

    The baseline variant: round-off drowns the small singular directions as
    p grows, which is what reorthogonalization prevents.  Same pass budget
    and same post-sketch assembly as randlu.
    """
    a = as_accessor(a)
    _validate_rank(a, k, q_os)
    l = k + q_os
    t = core.gaussian(seed, a.shape[1], l)
    for _ in range(p):
        t = a.rmatmul(a.matmul(t))
    sk = rangefinder._final_sketch_lu(a.matmul(t))
    return _assemble_from_sketch_lu(a, sk, k)


def _assemble_from_sketch_lu(a, sk, k):
    ly = sk.L[:, :k]
    qy, ry = kernels.pinv_factor(ly)
    # B = L_y^+ P A = R^{-1} (P^T Q)^T A, read through one transpose product
    c = a.rmatmul(core.apply_inv_row_perm(sk.p, qy))
    b = solve_triangular(ry, c.T, lower=False)
    lb, ub, qperm = kernels.plu(b.T)  # column pivoting via the transpose
    return LowRankLU(p=sk.p, q=qperm, L=ly @ ub.T, U=lb.T, rank=k)


def powerlu(a, k, q_os=10, v=3, seed=0):
    """Pass-parameterized randomized LU.

    Builds a row-space basis with v - 1 products, spends the last pass on
    Y = A V(:, 1:k), and assembles the factorization from two small pivoted
    LUs.  Works for any pass budget v >= 2.
    """
    a = as_accessor(a)
    _validate_rank(a, k, q_os)
    if v < 2:
        raise ValueError("pass budget v must be >= 2")
    basis = rangefinder.general_power_basis_v(a, k + q_os, v, seed)
    vk = basis.V[:, :k]
    return lu_from_projection(a.matmul(vk), vk)


def lu_from_projection(g, vk):
    """Exact pivoted-LU factorization of G V^T given G = A V.

    lu(G) -> (L1, U1, p); lu((U1 V^T)^T) -> (L2, U2, q);
    L = L1 U2^T, U = L2^T.  The only approximation in the caller is A ~ A V V^T;
    these steps are exact.
    """
    k = g.shape[1]
    l1, u1, perm = kernels.plu(g)
    l2, u2, qperm = kernels.plu((u1 @ vk.T).T)
    return LowRankLU(p=perm, q=qperm, L=l1 @ u2.T, U=l2.T, rank=k)


def reconstruct(f):
    """Undo the permutations: returns the m x n matrix with (L U)[i, j]
    placed at row f.p[i], column f.q[j]."""
    r = f.L @ f.U
    out = np.empty_like(r)
    out[np.ix_(f.p, f.q)] = r
    return out


def range_agreement(f1, f2):
    """Largest principal angle (radians) between the two permuted L ranges."""
    if f1.L.shape[0] != f2.L.shape[0]:
        raise ValueError("row dimensions differ")
    if f1.rank != f2.rank:
        raise ValueError(f"rank mismatch: {f1.rank} vs {f2.rank}")
    q1, _ = np.linalg.qr(core.apply_inv_row_perm(f1.p, f1.L))
    q2, _ = np.linalg.qr(core.apply_inv_row_perm(f2.p, f2.L))
    c = q1.T @ q2
    cos_min = np.linalg.svd(c, compute_uv=False)[-1]
    if cos_min**2 <= 0.5:
        return float(np.arccos(np.clip(cos_min, -1.0, 1.0)))
    # near-aligned ranges: the cosine saturates at 1 and loses half the
    # digits, while the residual sine stays fully accurate
    sin_max = np.linalg.svd(q2 - q1 @ c, compute_uv=False)[0]
    return float(np.arcsin(np.clip(sin_max, -1.0, 1.0)))
