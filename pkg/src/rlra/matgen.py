"""Synthetic test matrices with prescribed singular spectra, plus sparse
random operands.

The decay matrices are A = U diag(sigma) V^T with orthonormalized Gaussian
factors, so the exact spectrum is known and closed-form error oracles apply.
"""

import numpy as np
import scipy.sparse as sp
from scipy.special import expit

from . import core
from .accessors import SparseAccessor

DECAY_KINDS = ("slow", "fast", "sshaped")


def decay_sigma(kind, r):
    """Prescribed spectrum, 1-based index k = 1..r.

    slow:    1 / k^2
    fast:    exp(-k / 7)
    sshaped: 0.0001 + 1 / (1 + exp(k - 30))
    """
    k = np.arange(1, r + 1, dtype=np.float64)
    if kind == "slow":
        return 1.0 / k**2
    if kind == "fast":
        return np.exp(-k / 7.0)
    if kind == "sshaped":
        # expit(30 - k) = 1/(1 + e^{k-30}) without overflow for large k
        return 1e-4 + expit(30.0 - k)
    raise ValueError(f"unknown decay kind {kind!r}; pick from {DECAY_KINDS}")


def gen_decay(kind, m, n, seed, sigma=None):
    """Dense m x n matrix with known singular values.

    kind is one of DECAY_KINDS, or "custom" with an explicit sigma of length
    min(m, n) (nonincreasing, nonnegative).  Returns (A, sigma).
    """
    if m < 1 or n < 1:
        raise ValueError("need m, n >= 1")
    r = min(m, n)
    if kind == "custom":
        sigma = np.asarray(sigma, dtype=np.float64)
        if sigma.shape != (r,):
            raise ValueError(f"custom sigma must have length {r}")
        if (sigma < 0).any() or (np.diff(sigma) > 0).any():
            raise ValueError("sigma must be nonnegative and nonincreasing")
    elif sigma is not None:
        raise ValueError("explicit sigma requires kind='custom'")
    else:
        sigma = decay_sigma(kind, r)
    rng = np.random.default_rng(seed)
    u, _ = np.linalg.qr(core.gaussian_from(rng, m, r))
    v, _ = np.linalg.qr(core.gaussian_from(rng, n, r))
    return np.asfortranarray((u * sigma) @ v.T), sigma


def gen_sparse(m, n, density, seed):
    """Sparse accessor with a uniform random pattern and uniform(0,1) values."""
    if not 0.0 < density <= 1.0:
        raise ValueError(f"density {density} outside (0, 1]")
    rng = np.random.default_rng(seed)
    a = sp.random(m, n, density=density, format="csc", dtype=np.float64, random_state=rng)
    return SparseAccessor(a)


def oracle_error(sigma, k):
    """Optimal rank-k approximation errors from a known spectrum.

    Returns (frobenius, spectral) = ((sum of sigma_i^2 for i > k)^0.5, sigma_{k+1}).
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    if not 0 <= k < sigma.shape[0]:
        raise ValueError(f"k={k} outside 0..{sigma.shape[0] - 1}")
    tail = sigma[k:]
    return float(np.sqrt((tail**2).sum())), float(tail[0])
