# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled banded Gaussian elimination with partial pivoting.

Same algorithm and band layout as ``_banded_py.solve_banded``; see there for
the contract.  The elimination runs without the GIL so independent solves can
proceed on separate threads.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


cdef inline double cabs2(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef Py_ssize_t _factor_solve(double complex[:, ::1] ab, double[::1] scale,
                              Py_ssize_t[::1] ipiv, double complex[::1] b,
                              Py_ssize_t n, Py_ssize_t kl, Py_ssize_t ku,
                              double tiny) noexcept nogil:
    cdef Py_ssize_t kv = kl + ku
    cdef Py_ssize_t j, i, c, km, jp, ju = 0, l
    cdef double best, a, s
    cdef double complex t, pivot, bj
    for j in range(n):
        km = kl if kl < n - 1 - j else n - 1 - j
        jp = 0
        best = cabs2(ab[kv, j])
        for i in range(1, km + 1):
            a = cabs2(ab[kv + i, j])
            if a > best:
                best = a
                jp = i
        ipiv[j] = j + jp
        s = scale[j + jp]
        if s == 0.0 or sqrt(best) < tiny * s:
            return j
        c = j + ku + jp
        if c > n - 1:
            c = n - 1
        if c > ju:
            ju = c
        if jp != 0:
            for c in range(j, ju + 1):
                t = ab[kv + j - c, c]
                ab[kv + j - c, c] = ab[kv + j + jp - c, c]
                ab[kv + j + jp - c, c] = t
            s = scale[j]
            scale[j] = scale[j + jp]
            scale[j + jp] = s
        if km > 0:
            pivot = ab[kv, j]
            for i in range(1, km + 1):
                ab[kv + i, j] = ab[kv + i, j] / pivot
            for c in range(j + 1, ju + 1):
                t = ab[kv + j - c, c]
                if t != 0:
                    for i in range(1, km + 1):
                        ab[kv + j + i - c, c] -= ab[kv + i, j] * t

    for j in range(n - 1):
        l = ipiv[j]
        if l != j:
            t = b[l]
            b[l] = b[j]
            b[j] = t
        bj = b[j]
        km = kl if kl < n - 1 - j else n - 1 - j
        for i in range(1, km + 1):
            b[j + i] -= ab[kv + i, j] * bj
    for j in range(n - 1, -1, -1):
        b[j] = b[j] / ab[kv, j]
        bj = b[j]
        i = j - kv if j > kv else 0
        while i < j:
            b[i] -= ab[kv + i - j, j] * bj
            i += 1
    return -1


def solve_banded(diags, Py_ssize_t kl, Py_ssize_t ku, rhs, double tiny=1e-14):
    """Solve ``A x = rhs``; returns ``(x, info)`` like the pure-Python twin."""
    cdef double complex[:, ::1] d = np.ascontiguousarray(diags, dtype=np.complex128)
    cdef double complex[::1] b = np.array(rhs, dtype=np.complex128, copy=True)
    cdef Py_ssize_t n = b.shape[0]
    cdef Py_ssize_t kv = kl + ku
    cdef Py_ssize_t i, o, lo, hi
    cdef double a
    if d.shape[0] != kl + ku + 1 or d.shape[1] != n:
        raise ValueError("diags must have shape (kl + ku + 1, len(rhs))")
    ab_arr = np.zeros((2 * kl + ku + 1, n), dtype=np.complex128)
    scale_arr = np.zeros(n, dtype=np.float64)
    cdef double complex[:, ::1] ab = ab_arr
    cdef double[::1] scale = scale_arr
    cdef Py_ssize_t[::1] ipiv = np.zeros(n, dtype=np.intp)
    cdef Py_ssize_t info
    with nogil:
        for o in range(-kl, ku + 1):
            lo = -o if o < 0 else 0
            hi = n - o if o > 0 else n
            for i in range(lo, hi):
                ab[kv - o, i + o] = d[kl + o, i]
                a = sqrt(cabs2(d[kl + o, i]))
                if a > scale[i]:
                    scale[i] = a
        info = _factor_solve(ab, scale, ipiv, b, n, kl, ku, tiny)
    if info >= 0:
        return None, info
    return np.asarray(b), -1
