# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled partial-pivot LU kernel.

Mirror of _lu_numpy.plu_inplace, loop for loop: same pivot rule, same
operation order, compiled without FMA contraction, so results match the
fallback bit for bit.  Any change here must be mirrored there.
"""

from libc.math cimport fabs

cdef double ZERO_PIVOT_RTOL = 1e-14


def plu_inplace(double[::1, :] lu, long long[:] piv):
    """In-place packed LU with row pivoting; see the NumPy twin for contract."""
    cdef Py_ssize_t m = lu.shape[0]
    cdef Py_ssize_t n = lu.shape[1]
    cdef Py_ssize_t r = m if m < n else n
    cdef Py_ssize_t i, j, jj, rel, prow
    cdef double v, amax, colmax, ljj, ujj, tmp
    cdef long long ptmp

    for j in range(r):
        amax = -1.0
        rel = j
        for i in range(j, m):
            v = fabs(lu[i, j])
            if v > amax:
                amax = v
                rel = i
        colmax = amax
        for i in range(j):
            v = fabs(lu[i, j])
            if v > colmax:
                colmax = v
        if amax <= ZERO_PIVOT_RTOL * colmax:
            for i in range(j + 1, m):
                lu[i, j] = 0.0
            continue
        prow = rel
        if prow != j:
            for jj in range(n):
                tmp = lu[j, jj]
                lu[j, jj] = lu[prow, jj]
                lu[prow, jj] = tmp
            ptmp = piv[j]
            piv[j] = piv[prow]
            piv[prow] = ptmp
        ljj = lu[j, j]
        for i in range(j + 1, m):
            lu[i, j] = lu[i, j] / ljj
        for jj in range(j + 1, n):
            ujj = lu[j, jj]
            for i in range(j + 1, m):
                lu[i, jj] = lu[i, jj] - lu[i, j] * ujj
