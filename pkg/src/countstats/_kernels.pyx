# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.  Must stay numerically identical to _kernels_py."""

import numpy as np
cimport numpy as cnp
from libc.math cimport NAN, floor

cnp.import_array()

DEF BISECT_STEPS = 48


cdef inline double _hermite(double s, double n0, double n1, double m0, double m1) nogil:
    cdef double s2 = s * s
    cdef double s3 = s2 * s
    return ((2.0 * s3 - 3.0 * s2 + 1.0) * n0 + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * n1 + (s3 - s2) * m1)


def invert_survival(double t0, double h, double[::1] norm, double[::1] dnorm, double[::1] u):
    """Times at which a non-increasing survival curve first drops to ``u``.

    The curve is known on the grid ``t0 + k h`` together with its
    derivative and is interpolated by cubic Hermite segments.  Entries of
    ``u`` not reached on the grid give NaN.
    """
    cdef Py_ssize_t n = norm.shape[0]
    cdef Py_ssize_t m = u.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, lo, hi, mid, it
    cdef double target, a, b, s, n0, n1, m0, m1
    with nogil:
        for i in range(m):
            target = u[i]
            if target <= norm[n - 1]:
                out[i] = NAN
                continue
            if target >= norm[0]:
                out[i] = t0
                continue
            # largest lo with norm[lo] >= target; norm[hi] < target
            lo = 0
            hi = n - 1
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if norm[mid] >= target:
                    lo = mid
                else:
                    hi = mid
            n0 = norm[lo]
            n1 = norm[lo + 1]
            m0 = dnorm[lo] * h
            m1 = dnorm[lo + 1] * h
            a = 0.0
            b = 1.0
            for it in range(BISECT_STEPS):
                s = 0.5 * (a + b)
                if _hermite(s, n0, n1, m0, m1) >= target:
                    a = s
                else:
                    b = s
            out[i] = t0 + (lo + 0.5 * (a + b)) * h
    return out_arr


def pair_lag_counts(double[::1] times, double bin_width, Py_ssize_t n_bins, double t_ref_max):
    """Histogram of forward lags ``t_j - t_i`` (j > i) below ``n_bins * bin_width``.

    Only reference events with ``t_i <= t_ref_max`` contribute.  ``times``
    must be sorted.
    """
    cdef Py_ssize_t n = times.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts_arr = np.zeros(n_bins, dtype=np.int64)
    cdef cnp.int64_t[::1] counts = counts_arr
    cdef double span = n_bins * bin_width
    cdef double lag
    cdef Py_ssize_t i, j, k
    with nogil:
        for i in range(n):
            if times[i] > t_ref_max:
                break
            for j in range(i + 1, n):
                lag = times[j] - times[i]
                if lag >= span:
                    break
                k = <Py_ssize_t> floor(lag / bin_width)
                if k < n_bins:
                    counts[k] += 1
    return counts_arr
