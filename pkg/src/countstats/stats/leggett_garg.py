"""Extended Leggett-Garg test on intensity correlations.

For counted jumps ``J`` with rate constant ``k`` and initial state ``rho0``
the inequality reads

    |2 C(tau) - C(2 tau)| <= k <I>,      C(tau) = Tr[J e^{L tau} J rho0]

or, normalised by ``<I>^2`` with ``<I> = k <a^+a>``,

    |2 g2(tau) - g2(2 tau)| <= 1 / <a^+a>.

Every result carries ``ratio = lhs * <a^+a>`` so violation means ``ratio > 1``.
Rate-equation dynamics over three states never exceed 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from countstats import linalg, models
from countstats.errors import ZeroIntensityError
from countstats.models import CavityParams, ModelBundle, RestrictedParams
from countstats.stats.correlation import CorrelationEvaluator


@dataclass(frozen=True)
class LGResult:
    lhs: np.ndarray | float
    bound: float
    ratio: np.ndarray | float

    @property
    def violated(self) -> bool:
        return bool(np.max(self.ratio) > 1.0)


def _lg_from_evaluator(ev: CorrelationEvaluator, rate: float, tau) -> LGResult:
    tau = np.asarray(tau, dtype=float)
    if np.any(tau <= 0):
        raise ValueError("tau must be positive")
    if ev.intensity <= 0:
        # no emission, nothing to correlate: the inequality holds trivially
        zeros = np.zeros(tau.shape)
        return LGResult(zeros if zeros.ndim else 0.0, np.inf, zeros if zeros.ndim else 0.0)
    flat = tau.ravel()
    c = ev.correlator(np.concatenate([flat, 2 * flat]))
    g2 = c / ev.intensity**2
    lhs = np.abs(2 * g2[: flat.size] - g2[flat.size :]).reshape(tau.shape)
    occupation = ev.intensity / rate
    ratio = lhs * occupation
    if lhs.ndim == 0:
        lhs, ratio = float(lhs), float(ratio)
    return LGResult(lhs, 1.0 / occupation, ratio)


def lg_adjusted(p: RestrictedParams, tau) -> LGResult:
    """Inequality for the time-adjusted (stationary restricted-model) statistics.

    When ``g = 0`` nothing is ever emitted; the result is then ``lhs = 0``,
    ``bound = inf`` and ``ratio = 0``.
    """
    bundle = models.restricted_liouvillian(p)
    rho = linalg.steady_state(bundle.generator)
    return _lg_from_evaluator(CorrelationEvaluator(bundle, rho, method="auto"), p.kappa, tau)


def raw_correlation_bundle(p: CavityParams) -> ModelBundle:
    """Full cavity dynamics whose counted jump is emission plus re-excitation.

    The jump ``kappa (s+ a) X (a^+ s-)`` marks the pulse that restarts the
    atom; the generator itself only decays, so after the restart there is
    no further excitation.
    """
    base = models.cavity_liouvillian(p)
    return ModelBundle(
        generator=base.generator,
        jump=models.cavity_feedback_jump(p),
        intensity_op=base.intensity_op,
        basis_labels=base.basis_labels,
        jump_rate=p.kappa,
        name="cavity-raw",
    )


def lg_raw(p: CavityParams, rho0, tau) -> LGResult:
    """Inequality for the non-adjusted statistics referenced to ``rho0``.

    Normalisation and bound use ``<a^+a>`` of ``rho0`` itself; for
    ``rho0 = |g,1><g,1|`` the bound is 1.
    """
    rho0 = linalg.check_density_matrix(rho0)
    bundle = raw_correlation_bundle(p)
    n0 = float(np.real(linalg.expectation(bundle.intensity_op, rho0)))
    if n0 <= 0:
        raise ZeroIntensityError("<a^+a> of the initial state vanishes")
    ev = CorrelationEvaluator(bundle, rho0, method="auto")
    tau = np.asarray(tau, dtype=float)
    if np.any(tau <= 0):
        raise ValueError("tau must be positive")
    flat = tau.ravel()
    c = ev.correlator(np.concatenate([flat, 2 * flat]))
    g2 = c / (p.kappa * n0) ** 2
    lhs = np.abs(2 * g2[: flat.size] - g2[flat.size :]).reshape(tau.shape)
    ratio = lhs * n0
    if lhs.ndim == 0:
        lhs, ratio = float(lhs), float(ratio)
    return LGResult(lhs, 1.0 / n0, ratio)


def max_ratio(ratio_of_tau, tau_grid) -> tuple[float, float]:
    """Maximise a ratio curve over ``tau``: grid search, then bounded refinement.

    Returns ``(max_ratio, tau_at_max)``.
    """
    tau_grid = np.asarray(tau_grid, dtype=float)
    vals = np.asarray(ratio_of_tau(tau_grid), dtype=float)
    k = int(np.argmax(vals))
    lo = tau_grid[max(k - 1, 0)]
    hi = tau_grid[min(k + 1, tau_grid.size - 1)]
    best, tbest = float(vals[k]), float(tau_grid[k])
    if hi > lo:
        res = optimize.minimize_scalar(
            lambda t: -float(np.asarray(ratio_of_tau(np.array([t])))[0]),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-10 * hi},
        )
        if -res.fun > best:
            best, tbest = float(-res.fun), float(res.x)
    return best, tbest


# --- classical rate models -------------------------------------------------

CLASSICAL_LABELS = ("0", "P", "A")  # |g,0>, |g,1> (photon), |e,0> (atom)


def classical_rate_bundle(kappa: float, rates: dict[tuple[str, str], float]) -> ModelBundle:
    """Three-state rate equation with counted emission ``P -> 0`` at ``kappa``.

    ``rates[(src, dst)]`` are the remaining incoherent transition rates.
    Re-absorption ``0 -> P`` is excluded, as the test requires.  Each
    transition is a Lindblad channel ``|dst><src|`` and there is no
    Hamiltonian, so populations follow the rate equation exactly.
    """
    if ("0", "P") in rates and rates[("0", "P")] != 0:
        raise ValueError("the 0 -> P transition (photon re-absorption) is not allowed")
    idx = {s: i for i, s in enumerate(CLASSICAL_LABELS)}
    channels = [(linalg.projector(3, idx["0"], idx["P"]), kappa)]
    for (src, dst), r in rates.items():
        if src == dst:
            raise ValueError("self transitions are meaningless")
        channels.append((linalg.projector(3, idx[dst], idx[src]), r))
    gen = linalg.liouvillian(np.zeros((3, 3)), channels)
    return ModelBundle(
        generator=gen,
        jump=linalg.jump_super(linalg.projector(3, idx["0"], idx["P"]), kappa),
        intensity_op=linalg.projector(3, idx["P"]),
        basis_labels=CLASSICAL_LABELS,
        jump_rate=kappa,
        name="classical",
    )


@dataclass(frozen=True)
class BoundReport:
    max_ratio: float
    tau_at_max: float
    classical: bool

    @property
    def within_bound(self) -> bool:
        return self.max_ratio <= 1.0 + 1e-9


def _is_classical(bundle: ModelBundle) -> bool:
    """Populations evolve independently of coherences under the generator."""
    d = bundle.dim
    diag = np.array([i * d + i for i in range(d)])
    off = np.setdiff1d(np.arange(d * d), diag)
    return bool(np.max(np.abs(bundle.generator[np.ix_(diag, off)]), initial=0.0) < 1e-14)


def lg_bound_check(bundle: ModelBundle, rho0=None, taus=None) -> BoundReport:
    """Largest ``|2C(tau) - C(2tau)| / (k <I>)`` of a bundle over ``tau``.

    ``rho0`` defaults to the stationary state.  For a classical three-state
    rate model the result never exceeds 1; coherent models may.
    """
    if rho0 is None:
        rho0 = linalg.steady_state(bundle.generator)
    ev = CorrelationEvaluator(bundle, rho0, method="auto")
    if ev.intensity <= 0:
        raise ZeroIntensityError("initial state does not emit")
    if taus is None:
        w = np.abs(np.linalg.eigvals(bundle.generator))
        scale = max(float(w.max()), bundle.jump_rate)
        taus = np.logspace(-3, 3, 400) / scale

    def ratio(t):
        return _lg_from_evaluator(ev, bundle.jump_rate, t).ratio

    best, tbest = max_ratio(ratio, taus)
    return BoundReport(best, tbest, _is_classical(bundle))


def classical_rate_scan(kappa: float = 1.0, values=(0.0, 0.03, 0.3, 1.0, 3.0, 30.0)) -> BoundReport:
    """Worst-case bound check over a dense grid of three-state rate models.

    Each of the four free transitions ``A->P``, ``P->A``, ``A->0`` and
    ``0->A`` takes every value in ``values`` (units of ``kappa``).  The
    initial state holds the photon, ``rho0 = |P><P|``; the ratio does not
    depend on its weight.
    """
    worst = BoundReport(-np.inf, np.nan, True)
    for ap, pa, a0, r0 in itertools.product(values, repeat=4):
        rates = {("A", "P"): ap * kappa, ("P", "A"): pa * kappa, ("A", "0"): a0 * kappa, ("0", "A"): r0 * kappa}
        bundle = classical_rate_bundle(kappa, rates)
        rho0 = linalg.projector(3, 1)  # start with the photon present
        rep = lg_bound_check(bundle, rho0=rho0)
        if rep.max_ratio > worst.max_ratio:
            worst = rep
    return worst
