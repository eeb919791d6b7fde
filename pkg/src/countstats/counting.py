"""Time-adjusted counting and estimators on the adjusted click stream.

Adjustment deletes the idle time between a click and the next pulse, and
drops cycles without a detected click entirely.  What remains is a stream
in which each click is followed at once by a re-excitation, i.e. a
renewal process with the single-cycle waiting-time distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from countstats import kernels
from countstats.errors import CountstatsError
from countstats.stats.correlation import G2Curve
from countstats.trajectory import Channel, ClickRecord

MIN_CLICKS_G2 = 100


class InsufficientDataError(CountstatsError, ValueError):
    """Too few clicks, or too short a record, for the requested estimate."""


@dataclass(frozen=True, eq=False)
class AdjustedRecord:
    waits: np.ndarray
    source: str = ""

    def __post_init__(self):
        waits = np.asarray(self.waits, dtype=float)
        if waits.ndim != 1:
            raise ValueError("waits must be one-dimensional")
        if np.any(waits <= 0):
            raise ValueError("adjusted waiting times must be positive")
        object.__setattr__(self, "waits", waits)

    @property
    def clock(self) -> np.ndarray:
        """Cumulative click times on the adjusted time axis."""
        return np.cumsum(self.waits)

    def __len__(self):
        return self.waits.size

    def __eq__(self, other):
        if not isinstance(other, AdjustedRecord):
            return NotImplemented
        return self.source == other.source and np.array_equal(self.waits, other.waits)


def time_adjust(rec: ClickRecord) -> AdjustedRecord:
    keep = rec.detected & (rec.channel == Channel.CAVITY)
    waits = rec.offset[keep]
    if np.any(waits == 0):
        # a click exactly at the pulse has no duration on the adjusted axis
        raise ValueError("a detected click coincides with its pulse")
    return AdjustedRecord(waits.copy(), source=f"seed={rec.seed} pulses={rec.protocol.n_pulses}")


@dataclass(frozen=True)
class RateEstimate:
    rate: float
    stderr: float


def estimate_rate(adj: AdjustedRecord) -> RateEstimate:
    """``N / t_N`` with the renewal standard error ``std(w) / mean(w)^2 / sqrt(N)``."""
    n = len(adj)
    if n < 2:
        raise InsufficientDataError("at least two clicks are needed for a rate")
    w = adj.waits
    mean = float(np.mean(w))
    return RateEstimate(1.0 / mean, float(np.std(w, ddof=1)) / mean**2 / math.sqrt(n))


@dataclass(frozen=True)
class G2Estimate:
    curve: G2Curve
    stderr: np.ndarray
    counts: np.ndarray
    bin_edges: np.ndarray


def _bins(bin_width, tau_max):
    if not bin_width > 0:
        raise ValueError("bin width must be positive")
    n_bins = int(round(tau_max / bin_width))
    if n_bins < 1 or not math.isclose(n_bins * bin_width, tau_max, rel_tol=1e-9):
        raise ValueError("tau_max must be a positive multiple of the bin width")
    return n_bins, np.arange(n_bins + 1) * bin_width


def estimate_g2(adj: AdjustedRecord, bin_width: float, tau_max: float) -> G2Estimate:
    """Pair-correlation estimate of g2 on ``[0, tau_max)``.

    Ordered pairs with lag in ``[tau, tau + bin)`` are counted for reference
    clicks up to ``t_N - tau_max`` (so every reference sees the full lag
    window) and divided by ``T_ref * rate^2 * bin`` with ``T_ref = t_N - tau_max``.
    Errors are Poisson on the pair counts.
    """
    if len(adj) < MIN_CLICKS_G2:
        raise InsufficientDataError(f"need at least {MIN_CLICKS_G2} clicks, got {len(adj)}")
    n_bins, edges = _bins(bin_width, tau_max)
    t = adj.clock
    t_ref = float(t[-1] - tau_max)
    if t_ref <= 0.5 * t[-1]:
        raise InsufficientDataError("record is too short for the requested tau_max")
    rate = estimate_rate(adj).rate
    counts = kernels.pair_lag_counts(t, bin_width, n_bins, t_ref)
    scale = t_ref * rate**2 * bin_width
    values = counts / scale
    centres = 0.5 * (edges[:-1] + edges[1:])
    return G2Estimate(G2Curve(centres, values, rate), np.sqrt(counts) / scale, counts, edges)


def estimate_g2_renewal(adj: AdjustedRecord, bin_width: float, tau_max: float) -> G2Curve:
    """Cross-check from the waiting-time histogram alone.

    For a renewal stream the pair density is ``m = f + f * m`` with ``f``
    the waiting-time density; ``g2 = m / rate``.  The convolution is done on
    the bin grid, so resolution is limited by the bin width.
    """
    if len(adj) < MIN_CLICKS_G2:
        raise InsufficientDataError(f"need at least {MIN_CLICKS_G2} clicks, got {len(adj)}")
    n_bins, edges = _bins(bin_width, tau_max)
    hist, _ = np.histogram(adj.waits, bins=edges)
    f = hist / (len(adj) * bin_width)
    # bin averages of a convolution of two step functions:
    # (f*m)_k = bin * sum_j f_j (m_{k-j} + m_{k-j-1}) / 2, with m_{-1} = 0
    m = np.zeros(n_bins)
    padded = np.zeros(n_bins + 1)  # padded[i + 1] = m_i
    for k in range(n_bins):
        j = np.arange(1, k + 1)
        rest = f[j] @ (padded[k - j + 1] + padded[k - j]) if k else 0.0
        m[k] = (f[k] + bin_width * (0.5 * f[0] * padded[k] + 0.5 * rest)) / (1.0 - 0.5 * bin_width * f[0])
        padded[k + 1] = m[k]
    rate = estimate_rate(adj).rate
    return G2Curve(0.5 * (edges[:-1] + edges[1:]), m / rate, rate)
