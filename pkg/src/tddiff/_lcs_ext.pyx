# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled longest-common-subsequence kernel over interned token ids."""

from cpython.mem cimport PyMem_Malloc, PyMem_Free


def lcs_length(const int[:] a, const int[:] b):
    """Length of the longest common subsequence of two int sequences."""
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0]
    cdef Py_ssize_t i, j
    cdef int *row
    cdef int prev_diag, tmp, ai
    if n == 0 or m == 0:
        return 0
    if m > n:
        a, b = b, a
        n, m = m, n
    row = <int *> PyMem_Malloc((m + 1) * sizeof(int))
    if row == NULL:
        raise MemoryError()
    try:
        for j in range(m + 1):
            row[j] = 0
        for i in range(n):
            ai = a[i]
            prev_diag = 0
            for j in range(1, m + 1):
                tmp = row[j]
                if ai == b[j - 1]:
                    row[j] = prev_diag + 1
                elif row[j - 1] > row[j]:
                    row[j] = row[j - 1]
                prev_diag = tmp
        return row[m]
    finally:
        PyMem_Free(row)
