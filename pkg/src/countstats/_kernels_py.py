"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``.

The arithmetic is ordered exactly as in the Cython code so both backends
return bit-identical results on IEEE hardware.
"""

import numpy as np

BISECT_STEPS = 48


def _hermite(s, n0, n1, m0, m1):
    s2 = s * s
    s3 = s2 * s
    return (2.0 * s3 - 3.0 * s2 + 1.0) * n0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * n1 + (s3 - s2) * m1


def invert_survival(t0, h, norm, dnorm, u):
    norm = np.ascontiguousarray(norm, dtype=float)
    dnorm = np.ascontiguousarray(dnorm, dtype=float)
    u = np.ascontiguousarray(u, dtype=float)
    out = np.full(u.shape, np.nan)
    out[u >= norm[0]] = t0
    live = (u > norm[-1]) & (u < norm[0])
    target = u[live]
    # norm is non-increasing; search on the negated (non-decreasing) copy
    hi = np.searchsorted(-norm, -target, side="right")
    lo = hi - 1
    n0, n1 = norm[lo], norm[lo + 1]
    m0, m1 = dnorm[lo] * h, dnorm[lo + 1] * h
    a = np.zeros_like(target)
    b = np.ones_like(target)
    for _ in range(BISECT_STEPS):
        s = 0.5 * (a + b)
        above = _hermite(s, n0, n1, m0, m1) >= target
        a = np.where(above, s, a)
        b = np.where(above, b, s)
    out[live] = t0 + (lo + 0.5 * (a + b)) * h
    return out


def pair_lag_counts(times, bin_width, n_bins, t_ref_max):
    times = np.ascontiguousarray(times, dtype=float)
    counts = np.zeros(int(n_bins), dtype=np.int64)
    span = n_bins * bin_width
    n_ref = int(np.searchsorted(times, t_ref_max, side="right"))
    k = 1
    while k < times.size:
        lags = times[k:k + n_ref] - times[:n_ref][: times.size - k]
        lags = lags[lags < span]
        if lags.size == 0:
            # lags grow with k for sorted times, so no later offset can contribute
            break
        idx = np.floor(lags / bin_width).astype(np.int64)
        idx = idx[idx < n_bins]
        counts += np.bincount(idx, minlength=n_bins)
        k += 1
    return counts
