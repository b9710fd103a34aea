"""Pure NumPy partial-pivot LU kernel (fallback backend).

Kept in lockstep with the compiled kernel in _lu_cython.pyx: same pivot rule,
same elementary operations in the same order, so the two produce bit-identical
output.  Any change here must be mirrored there.
"""

import numpy as np

# a pivot this small relative to its column is treated as exactly zero
ZERO_PIVOT_RTOL = 1e-14


def plu_inplace(lu, piv):
    """Factor an F-ordered m x n matrix in place, packed LU with row pivoting.

    On return lu holds U on and above the diagonal and the unit-lower L
    multipliers strictly below it; piv (preloaded with 0..m-1) maps output
    row i back to source row piv[i].  A pivot whose magnitude is at most
    ZERO_PIVOT_RTOL times the largest magnitude in its column counts as
    zero: the row order is kept and the L column below the diagonal is
    zeroed, dropping at most that negligible mass from the reconstruction.
    """
    m, n = lu.shape
    for j in range(min(m, n)):
        col = lu[:, j]
        active = np.abs(col[j:])
        rel = int(np.argmax(active))  # first maximum wins on ties
        amax = float(active[rel])
        colmax = float(np.abs(col).max()) if j else amax
        if amax <= ZERO_PIVOT_RTOL * colmax:
            lu[j + 1 :, j] = 0.0
            continue
        prow = j + rel
        if prow != j:
            lu[[j, prow], :] = lu[[prow, j], :]
            piv[j], piv[prow] = piv[prow], piv[j]
        lu[j + 1 :, j] /= lu[j, j]
        if j + 1 < n:
            lu[j + 1 :, j + 1 :] -= np.outer(lu[j + 1 :, j], lu[j, j + 1 :])
