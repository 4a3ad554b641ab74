# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled biquad filter kernel (direct form II transposed)."""

import numpy as np


def biquad_filter(double[::1] x, double b0, double b1, double b2, double a1, double a2):
    """Run a second-order IIR section over x with zero initial state."""
    cdef Py_ssize_t n = x.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] y = out
    cdef double z1 = 0.0, z2 = 0.0, xn, yn
    cdef Py_ssize_t i
    for i in range(n):
        xn = x[i]
        yn = b0 * xn + z1
        z1 = b1 * xn - a1 * yn + z2
        z2 = b2 * xn - a2 * yn
        y[i] = yn
    return out
