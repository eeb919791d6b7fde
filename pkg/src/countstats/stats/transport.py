"""Currents, Fano factors and counting-field cumulants."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from countstats import linalg
from countstats.errors import EigenvalueCrossingError
from countstats.models import DQDParams, ModelBundle


class FanoKind(enum.Enum):
    ELECTRON = "electron"
    PHOTON = "photon"


@dataclass(frozen=True)
class FanoResult:
    value: float
    kind: FanoKind

    def __float__(self):
        return float(self.value)


def dqd_current_analytic(p: DQDParams) -> float:
    """Stationary right-junction current of the three-state double dot."""
    gl, gr, t, eps = p.gamma_left, p.gamma_right, p.t_coh, p.epsilon
    if not (gl > 0 and gr > 0):
        raise ValueError("tunnelling rates must be positive")
    return gr * t**2 / (gr**2 / 4 + eps**2 + t**2 * (2 + gr / gl))


def fano_electron_analytic(p: DQDParams) -> FanoResult:
    """Zero-frequency Fano factor of the right-junction current (Schottky baseline 1)."""
    gl, gr, t, eps = p.gamma_left, p.gamma_right, p.t_coh, p.epsilon
    if not (gl > 0 and gr > 0):
        raise ValueError("tunnelling rates must be positive")
    num = 4 * eps**2 * (gr - gl) + 3 * gl * gr**2 + gr**3 + 8 * gr * t**2
    den = (gl * gr**2 + 4 * gl * eps**2 + 4 * t**2 * (gr + 2 * gl)) ** 2
    return FanoResult(1.0 - 8 * t**2 * gl * num / den, FanoKind.ELECTRON)


# central-difference stencils: (offsets, weights, power of h)
_STENCILS = {
    1: ((-1, 1), (-0.5, 0.5), 1),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0), 2),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5), 3),
}
DEFAULT_STEPS = {1: 1e-3, 2: 1e-3, 3: 1e-2}


class _TrackedEigenvalue:
    """Eigenvalue of ``L + (e^s - 1) J`` continued from the stationary one at ``s = 0``."""

    def __init__(self, bundle: ModelBundle):
        self.gen = bundle.generator
        self.jump = bundle.jump
        rho = linalg.steady_state(bundle.generator)
        self.ref = linalg.vec(rho)
        self.ref /= np.linalg.norm(self.ref)
        self.cache: dict[float, float] = {0.0: 0.0}

    def __call__(self, s: float) -> float:
        if s in self.cache:
            return self.cache[s]
        w, v = np.linalg.eig(self.gen + np.expm1(s) * self.jump)
        v = v / np.linalg.norm(v, axis=0)
        overlap = np.abs(self.ref.conj() @ v)
        k = int(np.argmax(overlap))
        lead = int(np.argmax(w.real))
        if k != lead and not np.isclose(w[k].real, w[lead].real, rtol=1e-9, atol=1e-12):
            raise EigenvalueCrossingError(
                f"at counting field {s:g} the tracked eigenvalue {w[k]:.6g} is not the leading one {w[lead]:.6g}"
            )
        val = float(w[k].real)
        self.cache[s] = val
        return val


def fcs_cumulants(bundle: ModelBundle, order: int = 2, steps: dict | None = None) -> list[float]:
    """Zero-frequency cumulant rates ``c_1 .. c_order`` of the counted jumps.

    The jump term is dressed with a counting factor ``e^s`` (``s = i chi``)
    and ``c_n = d^n lambda / ds^n`` at ``s = 0`` is taken by central
    differences at steps ``h`` and ``h/2`` combined by Richardson
    extrapolation.  ``c_2 / c_1`` is the Fano factor including the
    self-correlation baseline.
    """
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    steps = {**DEFAULT_STEPS, **(steps or {})}
    lam = _TrackedEigenvalue(bundle)
    out = []
    for n in range(1, order + 1):
        offsets, weights, power = _STENCILS[n]

        def diff(h):
            return sum(w * lam(k * h) for k, w in zip(offsets, weights)) / h**power

        h = steps[n]
        coarse, fine = diff(h), diff(h / 2)
        out.append(fine + (fine - coarse) / 3.0)
    return out


def fano_fcs(bundle: ModelBundle) -> FanoResult:
    c1, c2 = fcs_cumulants(bundle, 2)
    return FanoResult(c2 / c1, FanoKind.ELECTRON)
