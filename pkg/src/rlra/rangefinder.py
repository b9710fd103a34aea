"""Power-iteration range finders with reorthogonalization.

Four schemes produce a basis of the dominant row or column space from a
Gaussian sketch.  Interior renormalizations use pivoted LU (keeping only the
row-unpermuted L factor, which preserves the span exactly); the final step
uses QR when an orthonormal basis is required.  Pass accounting is strict:
one accessor product equals one pass.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import core, kernels
from .accessors import as_accessor
from .errors import RankCollapse


class RangeBasis(NamedTuple):
    V: np.ndarray  # orthonormal columns (n x l for row-space, m x l for column-space)
    passes_used: int


class SketchLU(NamedTuple):
    L: np.ndarray  # m x l, unit-diagonal lower trapezoidal
    U: np.ndarray  # l x l
    p: np.ndarray  # row permutation of the sketch


@dataclass(frozen=True)
class PowerParams:
    """Sketch-size bookkeeping: width l = k + q_oversample, exponent p, passes v.

    The two conventions are tied by v = 2p + 2 (the pass count of the
    LU/SVD drivers at exponent p).
    """

    l: int
    p: int
    v: int
    q_oversample: int

    @classmethod
    def from_power(cls, k, q_oversample, p):
        return cls(l=k + q_oversample, p=p, v=2 * p + 2, q_oversample=q_oversample)

    @classmethod
    def from_passes(cls, k, q_oversample, v):
        if v < 2 or v % 2:
            raise ValueError(f"pass budget {v} has no power-exponent equivalent")
        return cls(l=k + q_oversample, p=(v - 2) // 2, v=v, q_oversample=q_oversample)


def _check_width(diag, requested):
    """Exactly zero pivots mean the sketch has structurally dependent columns.

    Benign near-deficiency (tiny but nonzero pivots) passes through: unit
    lower factors and Householder Q stay full width regardless, so the basis
    remains usable.
    """
    achieved = int(np.count_nonzero(diag))
    if achieved < requested:
        raise RankCollapse(achieved, requested)


def _qr_basis(x):
    q, r = kernels.eqr(x)
    _check_width(np.diag(r), x.shape[1])
    return q


def _lu_basis(x):
    """Row-unpermuted L of lu(x): spans exactly what x spans."""
    f = kernels.plu(x)
    _check_width(np.diag(f.U), x.shape[1])
    return core.apply_inv_row_perm(f.p, f.L)


def _validate(a, l, lower=1):
    m, n = a.shape
    if not lower <= l <= min(m, n):
        raise ValueError(f"sketch width l={l} outside {lower}..min{(m, n)}")


def power_basis_q(a, l, p, seed):
    """Column-space basis Q of (A A^T)^p A Omega, QR at every step.

    Consumes exactly 2p + 1 passes.
    """
    a = as_accessor(a)
    _validate(a, l)
    if p < 0:
        raise ValueError("p must be >= 0")
    om = core.gaussian(seed, a.shape[1], l)
    q = _qr_basis(a.matmul(om))
    passes = 1
    for _ in range(p):
        q = _qr_basis(a.rmatmul(q))
        q = _qr_basis(a.matmul(q))
        passes += 2
    return RangeBasis(q, passes)


def power_basis_lu_l(a, l, p, seed):
    """LU-stabilized sketch of A (A^T A)^p Omega for the LU driver.

    Returns (L, U, p_perm) from a final pivoted LU.  Interior LU
    renormalizations rescale the sketch, so P^T L U equals the raw chain
    only up to an invertible right factor; Range(P^T L) matches it exactly
    (in exact arithmetic).  Consumes exactly 2p + 1 passes.
    """
    a = as_accessor(a)
    _validate(a, l)
    if p < 0:
        raise ValueError("p must be >= 0")
    om = core.gaussian(seed, a.shape[1], l)
    y = a.matmul(om)
    if p == 0:
        return _final_sketch_lu(y)
    w = _lu_basis(y)
    for i in range(1, p + 1):
        w = _lu_basis(a.rmatmul(w))
        y = a.matmul(w)
        if i == p:
            return _final_sketch_lu(y)
        w = _lu_basis(y)
    raise AssertionError("unreachable")


def _final_sketch_lu(y):
    f = kernels.plu(y)
    _check_width(np.diag(f.U), y.shape[1])
    return SketchLU(f.L, f.U, f.p)


def power_basis_v(a, l, p, seed):
    """Row-space basis V of (A^T A)^p Omega; odd pass budget 2p (p >= 1)."""
    if p < 1:
        raise ValueError("p must be >= 1: no products means no basis")
    return general_power_basis_v(a, l, 2 * p + 1, seed)


def general_power_basis_v(a, l, v, seed):
    """Row-space basis for any pass budget v >= 2.

    Odd v: basis of (A^T A)^{(v-1)/2} Omega with Omega n x l (identical code
    path to power_basis_v at p = (v-1)/2).  Even v: basis of
    (A^T A)^{floor((v-1)/2)} A^T Omega with Omega m x l.  Consumes exactly
    v - 1 passes; the caller's A @ V spends the final one.
    """
    a = as_accessor(a)
    _validate(a, l)
    if v < 2:
        raise ValueError("pass budget v must be >= 2")
    m, n = a.shape
    passes = 0
    if v % 2 == 0:
        om = core.gaussian(seed, m, l)
        x = a.rmatmul(om)
        passes += 1
        if v == 2:
            return RangeBasis(_qr_basis(x), passes)
        w = _lu_basis(x)
    else:
        w = core.gaussian(seed, n, l)
    half = (v - 1) // 2
    for i in range(1, half + 1):
        w = _lu_basis(a.matmul(w))
        passes += 1
        if i == half:
            basis = _qr_basis(a.rmatmul(w))
        else:
            w = _lu_basis(a.rmatmul(w))
        passes += 1
    return RangeBasis(basis, passes)
