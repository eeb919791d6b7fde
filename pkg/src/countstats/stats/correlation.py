"""Second-order intensity correlations.

``g2_analytic`` is the closed form for the resonant restricted model;
``g2_numeric`` evaluates the quantum-regression expression
``Tr[J exp(L tau) J rho] / Tr[J rho]^2`` for any :class:`ModelBundle`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from countstats import linalg
from countstats.errors import ZeroIntensityError
from countstats.models import ModelBundle

# Within this distance of the exceptional point kappa^2 = 64 g^2 the closed
# form is evaluated by its series in Theta^2.
EXCEPTIONAL_POINT_RTOL = 1e-6
ZERO_INTENSITY_ATOL = 1e-300


@dataclass(frozen=True)
class G2Curve:
    taus: np.ndarray
    values: np.ndarray
    normalization: float


def g2_analytic(g, kappa, tau):
    """Closed-form g2(tau) of the restricted model at zero detuning.

    ``1 - exp(-3 kappa tau / 4) [cosh(Theta tau) + (3 kappa / 4 Theta) sinh(Theta tau)]``
    with ``Theta = sqrt(kappa^2/16 - 4 g^2)``, evaluated in complex
    arithmetic so one expression covers both damping regimes.
    """
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau must be non-negative")
    theta2 = kappa**2 / 16.0 - 4.0 * g**2
    a = 0.75 * kappa
    theta = np.sqrt(complex(theta2))
    if abs(theta) < EXCEPTIONAL_POINT_RTOL * kappa:
        x2 = theta2 * tau**2
        # cosh(x) and sinh(x)/x as series in x^2; |x^2| is tiny unless tau is huge
        cosh = 1 + x2 / 2 + x2**2 / 24 + x2**3 / 720
        sinhc = 1 + x2 / 6 + x2**2 / 120 + x2**3 / 5040
        out = 1.0 - np.exp(-a * tau) * (cosh + a * tau * sinhc)
        return out if out.ndim else float(out)
    alpha = a + theta
    # expanded form of exp(-alpha t)/(8 Theta) [3k - 4 Theta + 8 Theta e^{alpha t} - 4 alpha e^{2 Theta t}]
    val = 1.0 + (3 * kappa - 4 * theta) / (8 * theta) * np.exp(-alpha * tau) - alpha / (2 * theta) * np.exp(
        -(alpha - 2 * theta) * tau
    )
    out = np.real(val)
    return out if out.ndim else float(out)


# Spectral evaluation is used only when the eigenvector basis is this well conditioned.
SPECTRAL_COND_MAX = 1e5


class CorrelationEvaluator:
    """Reusable pieces of ``C(tau) = Tr[J exp(L tau) J rho0]``.

    ``J rho0`` and the row vector ``Tr[J .]`` are computed once.  With
    ``method="expm"`` every evaluation builds the propagator; with
    ``"spectral"`` the correlator is summed as ``sum_k c_k exp(lambda_k tau)``
    from one eigendecomposition.  ``"auto"`` picks the spectral route unless
    the generator is close to an exceptional point.
    """

    def __init__(self, bundle: ModelBundle, rho0, generator=None, method: str = "expm"):
        self.bundle = bundle
        self.generator = bundle.generator if generator is None else generator
        d = bundle.dim
        self.left = linalg.trace_functional(d) @ bundle.jump
        self.right = bundle.jump @ linalg.vec(rho0)
        self.intensity = float(np.real(linalg.trace_functional(d) @ self.right))
        if method not in ("expm", "spectral", "auto"):
            raise ValueError(f"unknown method {method!r}")
        self._modes = None
        if method != "expm":
            w, v = np.linalg.eig(self.generator)
            cond = np.linalg.cond(v)
            if cond <= SPECTRAL_COND_MAX:
                coeffs = (self.left @ v) * np.linalg.solve(v, self.right)
                self._modes = (w, coeffs)
            elif method == "spectral":
                raise ValueError(f"eigenvector basis too ill-conditioned ({cond:.3g}) for spectral evaluation")

    def correlator(self, tau):
        """Unnormalised ``<I(tau) I(0)>``."""
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        if self._modes is not None:
            w, coeffs = self._modes
            return np.real(np.exp(np.multiply.outer(tau, w)) @ coeffs)
        u = linalg.propagators(self.generator, tau)
        return np.real(np.einsum("i,nij,j->n", self.left, u, self.right))

    def g2(self, tau):
        if self.intensity <= ZERO_INTENSITY_ATOL:
            raise ZeroIntensityError("Tr[J rho0] vanishes; g2 is undefined")
        return self.correlator(tau) / self.intensity**2


def g2_numeric(bundle: ModelBundle, rho0, tau):
    """Normalised intensity correlation by quantum regression.

    With ``rho0`` the steady state this is the stationary g2(tau); with any
    other state it is the two-time function referenced to that state.
    """
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr < 0):
        raise ValueError("tau must be non-negative")
    out = CorrelationEvaluator(bundle, rho0).g2(tau_arr.ravel()).reshape(tau_arr.shape)
    return out if out.ndim else float(out)


def g2_curve(bundle: ModelBundle, taus, rho0=None) -> G2Curve:
    """Stationary g2 on a grid, normalised by the steady ``<intensity_op>``."""
    rho0 = linalg.steady_state(bundle.generator) if rho0 is None else rho0
    taus = np.asarray(taus, dtype=float)
    vals = np.atleast_1d(g2_numeric(bundle, rho0, taus))
    norm = float(np.real(linalg.expectation(bundle.intensity_op, rho0)))
    return G2Curve(taus=taus, values=vals, normalization=norm)
