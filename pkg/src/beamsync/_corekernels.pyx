# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled inner loops: correlation sums and modulated accumulation.

Semantics must match `_kernels_py` exactly (up to float summation order).
"""

import numpy as np

cimport numpy as cnp

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double complex conj(double complex)

BACKEND = "compiled"


def window_correlate(cnp.complex128_t[::1] y, cnp.complex128_t[::1] c, Py_ssize_t start):
    """(1/N) * sum_m y[start+m] * conj(c[m]) over the length of ``c``."""
    cdef Py_ssize_t n = c.shape[0]
    cdef Py_ssize_t m
    cdef double complex acc = 0
    with nogil:
        for m in range(n):
            acc += y[start + m] * conj(c[m])
    return complex(acc / n)


def shifted_correlate(cnp.complex128_t[::1] a, cnp.complex128_t[::1] b,
                      Py_ssize_t tau, double omega):
    """(1/N) * sum_m a[m] * conj(b[m-tau]) * exp(-1j*omega*m), b zero-padded."""
    cdef Py_ssize_t na = a.shape[0]
    cdef Py_ssize_t nb = b.shape[0]
    cdef Py_ssize_t lo = tau if tau > 0 else 0
    cdef Py_ssize_t hi = nb + tau if nb + tau < na else na
    cdef Py_ssize_t m
    cdef double complex acc = 0
    cdef double complex jw = -1j * omega
    if hi <= lo:
        return 0j
    with nogil:
        for m in range(lo, hi):
            acc += a[m] * conj(b[m - tau]) * cexp(jw * m)
    return complex(acc / na)


def window_correlate_rotated(cnp.complex128_t[::1] y, cnp.complex128_t[::1] c,
                             Py_ssize_t start, double omega):
    """Like ``window_correlate`` with the window de-rotated by ``omega``."""
    cdef Py_ssize_t n = c.shape[0]
    cdef Py_ssize_t m
    cdef double complex acc = 0
    cdef double complex jw = -1j * omega
    with nogil:
        for m in range(n):
            acc += y[start + m] * cexp(jw * (start + m)) * conj(c[m])
    return complex(acc / n)


def add_modulated(cnp.complex128_t[::1] out, cnp.complex128_t[::1] seq,
                  double complex amp, double omega, Py_ssize_t start):
    """In place: out[start+m] += amp * seq[m] * exp(1j*omega*(start+m))."""
    cdef Py_ssize_t n = seq.shape[0]
    cdef Py_ssize_t m
    cdef double complex jw = 1j * omega
    with nogil:
        for m in range(n):
            out[start + m] += amp * seq[m] * cexp(jw * (start + m))


def derotate(cnp.complex128_t[::1] y, double omega):
    """Return y[m] * exp(-1j*omega*m) as a new array."""
    cdef Py_ssize_t n = y.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef cnp.complex128_t[::1] ov = out
    cdef Py_ssize_t m
    cdef double complex jw = -1j * omega
    with nogil:
        for m in range(n):
            ov[m] = y[m] * cexp(jw * m)
    return out
