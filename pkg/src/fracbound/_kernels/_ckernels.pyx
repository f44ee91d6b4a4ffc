# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops. Same signatures as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport pow, sqrt, INFINITY

cnp.import_array()


def holder_pair_max(x, v, double alpha, double delta=INFINITY, bint uniform=False):
    cdef const double[::1] xs = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double complex[::1] vs = np.ascontiguousarray(v, dtype=np.complex128)
    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double lim = delta * (1.0 + 1e-12)
    cdef double best = 0.0, gap, dr, di, r2, w
    cdef double[::1] table
    if uniform and n > 1:
        # gap depends only on the index offset; squared weights per offset
        table = np.empty(n, dtype=np.float64)
        for k in range(1, n):
            gap = xs[k] - xs[0]
            table[k] = pow(gap, -2.0 * alpha)
        for i in range(n - 1):
            for j in range(i + 1, n):
                k = j - i
                if xs[k] - xs[0] > lim:
                    break
                dr = vs[j].real - vs[i].real
                di = vs[j].imag - vs[i].imag
                r2 = (dr * dr + di * di) * table[k]
                if r2 > best:
                    best = r2
    else:
        for i in range(n - 1):
            for j in range(i + 1, n):
                gap = xs[j] - xs[i]
                if gap > lim:
                    break
                dr = vs[j].real - vs[i].real
                di = vs[j].imag - vs[i].imag
                r2 = (dr * dr + di * di) * pow(gap, -2.0 * alpha)
                if r2 > best:
                    best = r2
    return sqrt(best)


def causal_convolve(c, q):
    # split real/imaginary parts: avoids the NaN-checking complex multiply
    c = np.asarray(c, dtype=np.complex128)
    q = np.asarray(q, dtype=np.complex128)
    cdef Py_ssize_t n = q.shape[0]
    cdef Py_ssize_t m = min(n, c.shape[0])
    # reversed so both operands stream forward in the inner loop
    cdef const double[::1] cr = np.ascontiguousarray(c.real[:m][::-1])
    cdef const double[::1] ci = np.ascontiguousarray(c.imag[:m][::-1])
    cdef const double[::1] qr = np.ascontiguousarray(q.real)
    cdef const double[::1] qi = np.ascontiguousarray(q.imag)
    yr_arr = np.zeros(n, dtype=np.float64)
    yi_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] yr = yr_arr
    cdef double[::1] yi = yi_arr
    cdef Py_ssize_t k, j, jlo, off
    cdef double ar, ai, a, b
    for k in range(n):
        ar = 0.0
        ai = 0.0
        jlo = k - m + 1
        if jlo < 0:
            jlo = 0
        off = m - 1 - k
        for j in range(jlo, k + 1):
            a = cr[off + j]
            b = ci[off + j]
            ar += a * qr[j] - b * qi[j]
            ai += a * qi[j] + b * qr[j]
        yr[k] = ar
        yi[k] = ai
    return yr_arr + 1j * yi_arr
