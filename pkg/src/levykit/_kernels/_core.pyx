# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see _fallback.py for the contract."""

from libc.math cimport cos, sin, floor, pow

import numpy as np

NAME = "cython"


def symbol_reduce(object q_in, object r_in, object w_in, object chi_in):
    cdef double[::1] q = np.ascontiguousarray(q_in, dtype=np.float64)
    cdef double[::1] r = np.ascontiguousarray(r_in, dtype=np.float64)
    cdef double[::1] w = np.ascontiguousarray(w_in, dtype=np.float64)
    cdef unsigned char[::1] chi = np.ascontiguousarray(chi_in, dtype=np.uint8)
    cdef Py_ssize_t m = q.shape[0], n = r.shape[0]
    out = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef Py_ssize_t i, j
    cdef double qi, t, t2, s, re, im, term
    for i in range(m):
        qi = q[i]
        re = 0.0
        im = 0.0
        for j in range(n):
            t = qi * r[j]
            s = sin(0.5 * t)
            re += w[j] * (-2.0) * s * s
            if chi[j]:
                if t < 1e-4 and t > -1e-4:
                    t2 = t * t
                    term = -t * t2 / 6.0 * (1.0 - t2 / 20.0)
                else:
                    term = sin(t) - t
            else:
                term = sin(t)
            im += w[j] * term
        ov[i] = re + 1j * im
    return out


def cp_accumulate_1d(object u_in, object bounds_in, double eps,
                     double alpha, object out_in):
    cdef double[::1] u = np.ascontiguousarray(u_in, dtype=np.float64)
    cdef long long[::1] bounds = np.ascontiguousarray(bounds_in, dtype=np.int64)
    cdef double[::1] out = out_in
    cdef Py_ssize_t nseg = bounds.shape[0] - 1
    cdef Py_ssize_t s, j
    cdef double acc, f, v, inv_alpha = 1.0 / alpha
    cdef bint harmonic = alpha == 1.0
    for s in range(nseg):
        acc = 0.0
        for j in range(bounds[s], bounds[s + 1]):
            f = floor(2.0 * u[j])
            v = 2.0 * u[j] - f
            if v < 1e-300:
                v = 1e-300
            if harmonic:
                acc += (2.0 * f - 1.0) * eps / v
            else:
                acc += (2.0 * f - 1.0) * eps * pow(v, -inv_alpha)
        out[s] += acc
