"""Photon-current noise spectrum and Fano factor of the time-adjusted emission.

The photon spectrum has no self-correlation term, so its Fano factor
measures only the correlated part ``<I> int_0^inf (g2 - 1) dtau`` and can be
negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from countstats import linalg, models
from countstats.errors import NonConvergentTailError, ZeroIntensityError
from countstats.models import RestrictedParams, SplittingConvention
from countstats.stats.correlation import CorrelationEvaluator
from countstats.stats.transport import FanoKind, FanoResult

CUTOFF_KAPPA_UNITS = 40.0
QUAD_ABS_DENSITY = 1e-12  # absolute tolerance per unit integration length
QUAD_EPSREL = 1e-10
QUAD_LIMIT = 2000
TAIL_TOL = 1e-11


def fano_photon_analytic(g, kappa, delta) -> FanoResult:
    """``-8 g^2 (3 kappa^2 - delta^2) / (8 g^2 + kappa^2 + delta^2)^2``."""
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    val = -8 * g**2 * (3 * kappa**2 - delta**2) / (8 * g**2 + kappa**2 + delta**2) ** 2
    return FanoResult(val, FanoKind.PHOTON)


@dataclass(frozen=True)
class _Integrand:
    """``f(tau) = g2(tau) - 1`` of the stationary restricted model."""

    ev: CorrelationEvaluator
    intensity: float
    gap: float
    spectral_radius: float

    def __call__(self, tau):
        return self.ev.correlator(tau)[0] / self.intensity**2 - 1.0

    def many(self, taus):
        return self.ev.correlator(taus) / self.intensity**2 - 1.0


def _stationary_integrand(p: RestrictedParams) -> _Integrand:
    if not p.kappa > 0:
        raise ValueError(f"kappa must be positive, got {p.kappa}")
    bundle = models.restricted_liouvillian(p)
    rho = linalg.steady_state(bundle.generator)
    ev = CorrelationEvaluator(bundle, rho, method="auto")
    if ev.intensity <= 0:
        raise ZeroIntensityError("no stationary emission (g = 0?)")
    w = np.linalg.eigvals(bundle.generator)
    nonzero = w[np.abs(w) > 1e-9 * max(1.0, np.abs(w).max())]
    gap = float(np.min(-nonzero.real)) if nonzero.size else math.inf
    return _Integrand(ev, ev.intensity, gap, float(np.abs(w).max()))


def _tail_bound(f: _Integrand, cutoff: float) -> float:
    """Bound on ``int_cutoff^inf |f|`` from the envelope decay rate of the generator."""
    if not f.gap > 0:
        raise NonConvergentTailError("generator has no decay gap; correlations do not relax")
    window = np.linspace(max(cutoff - 1.0 / f.gap, 0.0), cutoff, 64)
    return float(np.max(np.abs(f.many(window)))) / f.gap


def _integrate(f: _Integrand, kappa: float, omega: float = 0.0) -> float:
    """``int_0^inf cos(omega tau) f(tau) dtau`` with a certified tail."""
    cutoff = CUTOFF_KAPPA_UNITS / kappa
    for _ in range(6):
        if _tail_bound(f, cutoff) <= TAIL_TOL * max(1.0 / kappa, 1e-300):
            break
        cutoff *= 2
    else:
        raise NonConvergentTailError(f"correlation tail beyond tau={cutoff:g} does not meet tolerance")
    # panels of a few oscillation periods keep the adaptive rule well resolved
    n_panels = max(1, int(math.ceil(cutoff * max(f.spectral_radius, kappa) / 4.0)))
    edges = np.linspace(0.0, cutoff, n_panels + 1)
    epsabs = QUAD_ABS_DENSITY * cutoff / n_panels
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if omega == 0.0:
            val, _ = integrate.quad(f, lo, hi, epsabs=epsabs, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT)
        else:
            val, _ = integrate.quad(
                f, lo, hi, weight="cos", wvar=omega, epsabs=epsabs, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT
            )
        total += val
    return total


def correlation_integral(p: RestrictedParams, method: str = "quadrature") -> float:
    """``int_0^inf (g2(tau) - 1) dtau`` for the stationary restricted model.

    ``method="quadrature"`` integrates the regression correlator
    numerically; ``method="resolvent"`` solves the equivalent linear system
    ``L x = -(J rho - <I> rho)`` restricted to traceless operators.
    """
    f = _stationary_integrand(p)
    if method == "quadrature":
        return _integrate(f, p.kappa)
    if method == "resolvent":
        ev = f.ev
        d = ev.bundle.dim
        rho = linalg.steady_state(ev.bundle.generator)
        src = ev.right - ev.intensity * linalg.vec(rho)
        # append the trace constraint so the singular generator becomes solvable
        a = np.vstack([ev.generator, linalg.trace_functional(d)[None, :]])
        b = np.concatenate([-src, [0.0]])
        x, *_ = np.linalg.lstsq(a, b, rcond=None)
        return float(np.real(ev.left @ x)) / ev.intensity**2
    raise ValueError(f"unknown method {method!r}")


def fano_photon_numeric(p: RestrictedParams, method: str = "quadrature") -> FanoResult:
    """``S_ph(0) / (2 <I_ph>) = <I_ph> int_0^inf (g2 - 1) dtau`` with ``<I_ph> = kappa <a^+a>``."""
    f = _stationary_integrand(p)
    return FanoResult(f.intensity * correlation_integral(p, method), FanoKind.PHOTON)


def photon_noise_spectrum(p: RestrictedParams, omega) -> np.ndarray | float:
    """``S_ph(omega) = 2 Re int_0^inf e^{i omega tau} <I>^2 (g2 - 1) dtau``.

    The integrand is real, so the real part is the cosine transform.
    """
    f = _stationary_integrand(p)
    omegas = np.atleast_1d(np.asarray(omega, dtype=float))
    out = np.array([2.0 * f.intensity**2 * _integrate(f, p.kappa, float(abs(w))) for w in omegas])
    return out if np.ndim(omega) else float(out[0])


def fano_zero_crossing(g: float, kappa: float, convention: SplittingConvention, method: str = "resolvent") -> float:
    """Positive detuning at which the numeric photon Fano factor changes sign."""

    def fano(delta):
        return fano_photon_numeric(RestrictedParams(delta, g, kappa, convention), method).value

    hi = kappa
    while fano(hi) < 0:
        hi *= 2
        if hi > 1e4 * kappa:
            raise ValueError("photon Fano factor never becomes positive")
    return optimize.brentq(fano, 0.0, hi, xtol=1e-12 * kappa, rtol=1e-14)


@dataclass(frozen=True)
class ConventionCheck:
    convention: SplittingConvention
    generator_mismatch: float
    zero_crossing: float
    crossing_error: float

    @property
    def consistent(self) -> bool:
        return self.generator_mismatch < 1e-12 and self.crossing_error < 1e-3


def check_splitting_conventions(
    epsilon: float = 0.7, t_coh: float = 1.3, gamma_right: float = 0.9
) -> list[ConventionCheck]:
    """Test each detuning convention against the DQD correspondence.

    A convention passes if (a) the restricted generator at ``delta = 2 epsilon``
    equals the reduced DQD generator element-wise, and (b) the numeric photon
    Fano factor changes sign at ``|delta| = sqrt(3) kappa``.
    """
    dqd = models.DQDParams.from_detuning(epsilon, t_coh, math.inf, gamma_right)
    reduced = models.reduced_dqd_liouvillian(dqd).generator
    out = []
    for conv in SplittingConvention:
        rp = RestrictedParams(2.0 * epsilon, t_coh, gamma_right, conv)
        mismatch = float(np.max(np.abs(models.restricted_liouvillian(rp).generator - reduced)))
        crossing = fano_zero_crossing(t_coh, gamma_right, conv)
        out.append(ConventionCheck(conv, mismatch, crossing, abs(crossing - math.sqrt(3) * gamma_right) / gamma_right))
    return out


def resolve_splitting_convention(**kwargs) -> SplittingConvention:
    """The unique convention passing :func:`check_splitting_conventions`."""
    passing = [c.convention for c in check_splitting_conventions(**kwargs) if c.consistent]
    if len(passing) != 1:
        raise ValueError(f"expected exactly one consistent convention, found {passing}")
    return passing[0]
