"""Generators for the cavity-QED and double-quantum-dot models.

All frequencies and rates are angular, in rad/us.  Use :func:`angular` to
convert a quoted ``f = x / 2pi`` value in MHz.

Basis orderings
---------------
cavity      ``|g,0>, .., |g,N>, |e,0>, .., |e,N>`` (atom index is the slow one)
restricted  ``|e,0>, |g,1>``
DQD         ``|0>, |L>, |R>``
reduced DQD ``|L>, |R>``

The restricted model and the reduced DQD share the ordering
``(excited, ground) <-> (L, R)`` so that their generators can be compared
element by element.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from countstats import linalg
from countstats.errors import ConfigError


def angular(f_mhz: float) -> float:
    """``2 pi f``: MHz (cycles per us) to rad/us."""
    return 2.0 * math.pi * f_mhz


def cyclic(w: float) -> float:
    """Inverse of :func:`angular`."""
    return w / (2.0 * math.pi)


class SplittingConvention(enum.Enum):
    """Coefficient ``c`` of the detuning term ``c * delta * sz`` in the restricted model.

    HALF_DELTA and FULL_DELTA are the two forms in which the two-state
    equation of motion is commonly written.  QUARTER_DELTA gives the two
    states an energy difference of ``delta / 2``; it is the only choice for
    which the restricted model coincides with the reduced DQD under the
    ``E_L - E_R <-> delta / 2`` correspondence and for which the photon Fano
    factor changes sign at ``delta^2 = 3 kappa^2`` (see
    :func:`countstats.stats.photon_noise.resolve_splitting_convention`).

    HALF_DELTA is what the full cavity model reduces to when ``delta`` is the
    bare atom-cavity detuning ``omega - nu``.
    """

    HALF_DELTA = "half"
    FULL_DELTA = "full"
    QUARTER_DELTA = "quarter"

    @property
    def coefficient(self) -> float:
        return {"half": 0.5, "full": 1.0, "quarter": 0.25}[self.value]


# Winner of the empirical convention resolution; asserted by the test suite.
MAPPING_CONVENTION = SplittingConvention.QUARTER_DELTA


def _nonneg(name, value):
    if not (value >= 0) or not math.isfinite(value):
        raise ConfigError(f"{name} must be finite and non-negative, got {value}")


@dataclass(frozen=True)
class CavityParams:
    omega: float
    nu: float
    g: float
    kappa: float
    gamma: float = 0.0
    fock_cutoff: int = 1

    def __post_init__(self):
        for name in ("g", "kappa", "gamma"):
            _nonneg(name, getattr(self, name))
        if int(self.fock_cutoff) != self.fock_cutoff or self.fock_cutoff < 1:
            raise ConfigError(f"fock_cutoff must be an integer >= 1, got {self.fock_cutoff}")

    @property
    def delta(self) -> float:
        return self.omega - self.nu

    @classmethod
    def from_detuning(cls, delta, g, kappa, gamma=0.0, fock_cutoff=1) -> "CavityParams":
        """Frame rotating at the cavity frequency (``nu = 0``, ``omega = delta``)."""
        return cls(omega=delta, nu=0.0, g=g, kappa=kappa, gamma=gamma, fock_cutoff=fock_cutoff)


@dataclass(frozen=True)
class RestrictedParams:
    delta: float
    g: float
    kappa: float
    splitting_convention: SplittingConvention

    def __post_init__(self):
        _nonneg("g", self.g)
        _nonneg("kappa", self.kappa)
        if not isinstance(self.splitting_convention, SplittingConvention):
            raise ConfigError("splitting_convention must be a SplittingConvention member")

    @property
    def splitting(self) -> float:
        """Energy difference between ``|e,0>`` and ``|g,1>``."""
        return 2.0 * self.splitting_convention.coefficient * self.delta


@dataclass(frozen=True)
class DQDParams:
    e_left: float
    e_right: float
    t_coh: float
    gamma_left: float
    gamma_right: float

    def __post_init__(self):
        _nonneg("gamma_right", self.gamma_right)
        if not self.gamma_left >= 0:
            raise ConfigError(f"gamma_left must be non-negative, got {self.gamma_left}")

    @property
    def epsilon(self) -> float:
        return self.e_left - self.e_right

    @classmethod
    def from_detuning(cls, epsilon, t_coh, gamma_left, gamma_right) -> "DQDParams":
        return cls(epsilon / 2, -epsilon / 2, t_coh, gamma_left, gamma_right)


@dataclass(frozen=True, eq=False)
class ModelBundle:
    """A generator together with its counted jump term.

    ``jump_rate`` is the rate constant multiplying the jump (kappa or
    Gamma_R); it sets the scale of the extended Leggett-Garg bound.
    """

    generator: np.ndarray
    jump: np.ndarray
    intensity_op: np.ndarray
    basis_labels: tuple[str, ...]
    jump_rate: float
    name: str = field(default="model")

    @property
    def dim(self) -> int:
        return len(self.basis_labels)

    @property
    def no_jump(self) -> np.ndarray:
        return self.generator - self.jump

    def basis_index(self, label: str) -> int:
        return self.basis_labels.index(label)

    def state(self, label: str) -> np.ndarray:
        """Pure density matrix of a basis state."""
        return linalg.projector(self.dim, self.basis_index(label))

    def flux(self, rho) -> float:
        """``Tr(jump[rho])``: emission or tunnelling rate in state ``rho``."""
        return float(np.real(np.trace(linalg.apply_super(self.jump, rho))))


def _cavity_ops(n_fock: int):
    nf = n_fock + 1
    a = np.kron(np.eye(2), linalg.destroy(nf))
    sm = np.kron(np.array([[0, 1], [0, 0]], dtype=complex), np.eye(nf))
    sz = np.kron(np.diag([-1.0, 1.0]).astype(complex), np.eye(nf))
    return a, sm, sz


def cavity_labels(fock_cutoff: int) -> tuple[str, ...]:
    return tuple(f"{s},{n}" for s in "ge" for n in range(fock_cutoff + 1))


def cavity_operators(p: CavityParams) -> dict[str, np.ndarray]:
    a, sm, sz = _cavity_ops(p.fock_cutoff)
    h = p.nu * linalg.dag(a) @ a + 0.5 * p.omega * sz + p.g * (sm @ linalg.dag(a) + linalg.dag(sm) @ a)
    return {"a": a, "sm": sm, "sz": sz, "H": h, "n": linalg.dag(a) @ a, "pe": linalg.dag(sm) @ sm}


def cavity_liouvillian(p: CavityParams) -> ModelBundle:
    """Atom-cavity master equation with cavity loss and optional atomic emission."""
    ops = cavity_operators(p)
    a, sm = ops["a"], ops["sm"]
    gen = linalg.liouvillian(ops["H"], [(a, p.kappa), (sm, p.gamma)])
    return ModelBundle(
        generator=gen,
        jump=linalg.jump_super(a, p.kappa),
        intensity_op=ops["n"],
        basis_labels=cavity_labels(p.fock_cutoff),
        jump_rate=p.kappa,
        name="cavity",
    )


def cavity_feedback_jump(p: CavityParams) -> np.ndarray:
    """Photon emission followed by instantaneous incoherent re-excitation.

    ``kappa * O[a X a^+]`` with ``O[Y] = |e><g| Y |g><e|``, i.e. the
    superoperator of ``X -> kappa (s+ a) X (a^+ s-)``.
    """
    a, sm, _ = _cavity_ops(p.fock_cutoff)
    return linalg.jump_super(linalg.dag(sm) @ a, p.kappa)


def cavity_feedback_liouvillian(p: CavityParams) -> ModelBundle:
    """Cavity model whose photon-emission jump is replaced by the feedback jump."""
    base = cavity_liouvillian(p)
    fb = cavity_feedback_jump(p)
    return ModelBundle(
        generator=base.generator - base.jump + fb,
        jump=fb,
        intensity_op=base.intensity_op,
        basis_labels=base.basis_labels,
        jump_rate=p.kappa,
        name="cavity-feedback",
    )


RESTRICTED_LABELS = ("e,0", "g,1")


def restricted_liouvillian(p: RestrictedParams) -> ModelBundle:
    """Two-state model of the time-adjusted emission process.

    ``H = c delta sz + g sx`` on ``{|e,0>, |g,1>}``; the constant term of the
    Hamiltonian is dropped since it commutes with everything.  The single
    channel ``kappa s+ X s-`` re-excites ``|e,0>`` whenever the photon of
    ``|g,1>`` is emitted.
    """
    c = p.splitting_convention.coefficient
    sz = np.diag([1.0, -1.0]).astype(complex)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sp = linalg.projector(2, 0, 1)
    h = c * p.delta * sz + p.g * sx
    return ModelBundle(
        generator=linalg.liouvillian(h, [(sp, p.kappa)]),
        jump=linalg.jump_super(sp, p.kappa),
        intensity_op=linalg.projector(2, 1),
        basis_labels=RESTRICTED_LABELS,
        jump_rate=p.kappa,
        name="restricted",
    )


def dqd_hamiltonian(p: DQDParams) -> np.ndarray:
    h = np.zeros((3, 3), dtype=complex)
    h[1, 1], h[2, 2] = p.e_left, p.e_right
    h[1, 2] = h[2, 1] = p.t_coh
    return h


def dqd_liouvillian(p: DQDParams) -> ModelBundle:
    """Three-state double dot in the large-bias Coulomb-blockade regime."""
    if not math.isfinite(p.gamma_left):
        raise ConfigError("dqd_liouvillian needs a finite gamma_left; use reduced_dqd_liouvillian")
    s_l = linalg.projector(3, 0, 1)  # |0><L|
    s_r = linalg.projector(3, 0, 2)  # |0><R|
    gen = linalg.liouvillian(dqd_hamiltonian(p), [(linalg.dag(s_l), p.gamma_left), (s_r, p.gamma_right)])
    return ModelBundle(
        generator=gen,
        jump=linalg.jump_super(s_r, p.gamma_right),
        intensity_op=p.gamma_right * linalg.projector(3, 2),
        basis_labels=("0", "L", "R"),
        jump_rate=p.gamma_right,
        name="dqd",
    )


def reduced_dqd_liouvillian(p: DQDParams) -> ModelBundle:
    """Double dot with the empty state eliminated (``gamma_left -> infinity``).

    ``gamma_left`` is ignored.  An electron leaving the right dot is
    immediately replaced in the left dot.
    """
    sz = np.diag([1.0, -1.0]).astype(complex)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    lr = linalg.projector(2, 0, 1)  # |L><R|
    h = 0.5 * p.epsilon * sz + p.t_coh * sx
    return ModelBundle(
        generator=linalg.liouvillian(h, [(lr, p.gamma_right)]),
        jump=linalg.jump_super(lr, p.gamma_right),
        intensity_op=p.gamma_right * linalg.projector(2, 1),
        basis_labels=("L", "R"),
        jump_rate=p.gamma_right,
        name="reduced-dqd",
    )


def map_parameters(d: DQDParams, convention: SplittingConvention = MAPPING_CONVENTION) -> RestrictedParams:
    """DQD parameters to the equivalent restricted cavity model.

    ``T -> g``, ``Gamma_R -> kappa`` and the level splitting is preserved:
    ``epsilon = 2 c delta``.  For the default convention this is
    ``E_L - E_R = delta / 2``.
    """
    c = convention.coefficient
    return RestrictedParams(
        delta=d.epsilon / (2.0 * c),
        g=d.t_coh,
        kappa=d.gamma_right,
        splitting_convention=convention,
    )


def unmap_parameters(r: RestrictedParams, gamma_left: float = math.inf) -> DQDParams:
    """Inverse of :func:`map_parameters`; the reduced model ignores ``gamma_left``."""
    return DQDParams.from_detuning(r.splitting, r.g, gamma_left, r.kappa)


def excited_probability(g, t):
    """Vacuum Rabi oscillation ``(1 + cos 2 g t) / 2`` of the atom starting in ``|e,0>``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("time must be non-negative")
    return 0.5 * (1.0 + np.cos(2.0 * g * t))
