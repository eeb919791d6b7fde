"""Backend selection for the hot loops.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``COUNTSTATS_PURE_PYTHON`` is set to a non-empty value,
the numpy implementation is used.  Both expose the same two functions.
"""

import os

from countstats import _kernels_py

if os.environ.get("COUNTSTATS_PURE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from countstats import _kernels as _impl
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"
    else:
        BACKEND = "cython"

import numpy as np


def invert_survival(t0, h, norm, dnorm, u):
    """Times at which a non-increasing survival curve on ``t0 + k h`` falls to ``u``.

    ``norm`` and its derivative ``dnorm`` define a cubic Hermite interpolant;
    the result is ``t0`` where ``u >= norm[0]`` and NaN where ``u <= norm[-1]``.
    """
    c = np.ascontiguousarray
    return np.asarray(_impl.invert_survival(float(t0), float(h), c(norm, float), c(dnorm, float), c(u, float)))


def pair_lag_counts(times, bin_width, n_bins, t_ref_max):
    """Histogram of lags ``t_j - t_i`` (``j > i``, ``t_i <= t_ref_max``) in ``n_bins`` bins."""
    times = np.ascontiguousarray(times, dtype=float)
    return np.asarray(_impl.pair_lag_counts(times, float(bin_width), int(n_bins), float(t_ref_max)))

__all__ = ["BACKEND", "invert_survival", "pair_lag_counts"]
