"""Quantum-jump simulation of a pulsed single-photon source.

Every pulse resets the atom-cavity system to ``|e,0>``.  Until the first
jump the state follows the non-Hermitian Hamiltonian
``H - (i/2)(kappa a^+a + gamma s+ s-)``; the waiting time is drawn by
inverting the decaying norm, and the jump channel (cavity output or other
modes) is chosen in proportion to the two fluxes at that instant.  After
one jump the system is in ``|g,0>`` and stays dark until the next pulse.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from countstats import kernels, linalg, models
from countstats.errors import ConfigError
from countstats.models import CavityParams

log = logging.getLogger(__name__)

# norm-grid step in units of the fastest rate of the effective Hamiltonian
NORM_STEP_FACTOR = 1e-3
# pre-reset excitation probability above which the period is flagged too short
UNDECAYED_WARN = 1e-3
DEFAULT_PERIOD_KAPPA_UNITS = 20.0
BLOCK_CYCLES = 1 << 16
_UNIFORMS_PER_CYCLE = 4  # one Philox counter yields four 64-bit words


class Channel(enum.IntEnum):
    CAVITY = 0
    OTHER_MODES = 1


@dataclass(frozen=True)
class PulseProtocol:
    period: float
    n_pulses: int
    efficiency: float = 1.0

    def __post_init__(self):
        if not (self.period > 0 and math.isfinite(self.period)):
            raise ConfigError(f"period must be positive, got {self.period}")
        if int(self.n_pulses) != self.n_pulses or self.n_pulses < 0:
            raise ConfigError(f"n_pulses must be a non-negative integer, got {self.n_pulses}")
        if not 0.0 <= self.efficiency <= 1.0:
            raise ConfigError(f"efficiency must lie in [0, 1], got {self.efficiency}")

    @classmethod
    def default_for(cls, p: CavityParams, n_pulses: int, efficiency: float = 1.0) -> "PulseProtocol":
        """Protocol with period ``20 / kappa``."""
        if not p.kappa > 0:
            raise ConfigError("a default period needs kappa > 0")
        return cls(DEFAULT_PERIOD_KAPPA_UNITS / p.kappa, n_pulses, efficiency)


@dataclass(frozen=True)
class ClickEvent:
    cycle: int
    offset: float
    channel: Channel
    detected: bool


@dataclass(frozen=True, eq=False)
class ClickRecord:
    """Events of a pulsed run stored column-wise, sorted by cycle.

    ``undecayed_cycles`` counts pulses after which the system was still
    excited when the next pulse arrived (those cycles have no event).
    """

    protocol: PulseProtocol
    params: CavityParams
    seed: int
    cycle: np.ndarray
    offset: np.ndarray
    channel: np.ndarray
    detected: np.ndarray
    undecayed_cycles: int = 0

    def __post_init__(self):
        n = self.cycle.size
        if not (self.offset.size == self.channel.size == self.detected.size == n):
            raise ValueError("event columns differ in length")
        if n and np.any(np.diff(self.cycle) <= 0):
            raise ValueError("events must be strictly ordered by cycle (one per cycle)")
        if n and (np.any(self.offset < 0) or np.any(self.offset >= self.protocol.period)):
            raise ValueError("offsets must lie in [0, period)")
        if np.any(self.detected & (self.channel != Channel.CAVITY)):
            raise ValueError("only cavity photons can be detected")

    def __len__(self):
        return self.cycle.size

    @property
    def events(self) -> list[ClickEvent]:
        return [
            ClickEvent(int(c), float(o), Channel(int(ch)), bool(d))
            for c, o, ch, d in zip(self.cycle, self.offset, self.channel, self.detected)
        ]

    @property
    def n_detected(self) -> int:
        return int(np.count_nonzero(self.detected))

    def __eq__(self, other):
        if not isinstance(other, ClickRecord):
            return NotImplemented
        return (
            self.protocol == other.protocol
            and self.params == other.params
            and self.seed == other.seed
            and self.undecayed_cycles == other.undecayed_cycles
            and all(
                np.array_equal(getattr(self, k), getattr(other, k)) for k in ("cycle", "offset", "channel", "detected")
            )
        )


@dataclass(frozen=True)
class NormRecord:
    """Survival probability of the first jump on a uniform grid ``t = k h``."""

    h: float
    norm: np.ndarray
    dnorm: np.ndarray
    cavity_flux: np.ndarray  # kappa <a^+a> on the unnormalised no-jump state
    other_flux: np.ndarray  # gamma <s+ s->


def _effective_hamiltonian(p: CavityParams):
    ops = models.cavity_operators(p)
    h_eff = ops["H"] - 0.5j * (p.kappa * ops["n"] + p.gamma * ops["pe"])
    return h_eff, ops


def norm_record(p: CavityParams, period: float) -> NormRecord:
    """No-jump evolution from ``|e,0>`` sampled densely up to ``period``.

    The step is ``1e-3`` of the fastest time scale; the state advances by
    repeated multiplication with one step propagator.
    """
    h_eff, ops = _effective_hamiltonian(p)
    rate = max(float(np.abs(np.linalg.eigvals(h_eff)).max()), p.kappa, p.gamma)
    if not rate > 0:
        raise ConfigError("the model has no dynamics (all rates vanish)")
    n_steps = int(math.ceil(period * rate / NORM_STEP_FACTOR))
    h = period / n_steps
    step = sla.expm(-1j * h * h_eff)
    psi = np.zeros((n_steps + 1, h_eff.shape[0]), dtype=complex)
    psi[0, models.cavity_labels(p.fock_cutoff).index("e,0")] = 1.0
    for k in range(n_steps):
        psi[k + 1] = step @ psi[k]
    norm = np.sum(np.abs(psi) ** 2, axis=1)
    cav = p.kappa * np.real(np.einsum("ki,ij,kj->k", psi.conj(), ops["n"], psi))
    oth = p.gamma * np.real(np.einsum("ki,ij,kj->k", psi.conj(), ops["pe"], psi))
    # d|psi|^2/dt = -<psi|(kappa a^+a + gamma s+s-)|psi>; force monotone storage
    norm = np.minimum.accumulate(norm)
    return NormRecord(h, norm, -(cav + oth), cav, oth)


def cycle_uniforms(seed: int, first_cycle: int, n_cycles: int) -> np.ndarray:
    """Uniforms for cycles ``first_cycle .. first_cycle + n_cycles - 1``.

    Row ``k`` depends only on ``(seed, first_cycle + k)``: the Philox counter
    is set to the cycle index and each cycle consumes exactly one counter
    block, so any partition into blocks yields the same numbers.
    """
    bitgen = np.random.Philox(key=int(seed) & ((1 << 128) - 1), counter=int(first_cycle))
    return np.random.Generator(bitgen).random((n_cycles, _UNIFORMS_PER_CYCLE))


def _simulate_block(nr: NormRecord, proto: PulseProtocol, seed: int, start: int, n: int):
    u = cycle_uniforms(seed, start, n)
    waits = kernels.invert_survival(0.0, nr.h, nr.norm, nr.dnorm, u[:, 0])
    fired = np.isfinite(waits) & (waits < proto.period)
    idx = np.nonzero(fired)[0]
    t = waits[idx]
    # linear interpolation of both fluxes at the jump time
    pos = np.minimum(t / nr.h, nr.norm.size - 1.0)
    k = np.minimum(np.floor(pos).astype(np.int64), nr.norm.size - 2)
    frac = pos - k
    cav = nr.cavity_flux[k] * (1 - frac) + nr.cavity_flux[k + 1] * frac
    oth = nr.other_flux[k] * (1 - frac) + nr.other_flux[k + 1] * frac
    total = cav + oth
    p_cav = np.where(total > 0, cav / np.where(total > 0, total, 1.0), 1.0)
    channel = np.where(u[idx, 1] < p_cav, Channel.CAVITY, Channel.OTHER_MODES).astype(np.int8)
    detected = (channel == Channel.CAVITY) & (u[idx, 2] < proto.efficiency)
    return idx + start, t, channel, detected, n - idx.size


def simulate_pulsed(p: CavityParams, proto: PulseProtocol, seed: int) -> ClickRecord:
    """Simulate ``proto.n_pulses`` independent excitation cycles.

    Output is bit-reproducible from ``seed`` and independent of the block
    size used internally.
    """
    if not 0 <= int(seed) < 1 << 64:
        raise ConfigError("seed must be a 64-bit unsigned integer")
    if proto.period * max(p.kappa, p.gamma) < 10:
        log.warning("pulse period %.3g is short compared with the decay time; cycles may overlap", proto.period)
    nr = norm_record(p, proto.period)
    leftover = float(nr.norm[-1])
    if leftover > UNDECAYED_WARN:
        log.warning("excitation probability %.3g remains at the next pulse and is discarded", leftover)
    cols = ([], [], [], [])
    undecayed = 0
    for start in range(0, proto.n_pulses, BLOCK_CYCLES):
        n = min(BLOCK_CYCLES, proto.n_pulses - start)
        *block, missed = _simulate_block(nr, proto, seed, start, n)
        for col, vals in zip(cols, block):
            col.append(vals)
        undecayed += missed
    cycle, offset, channel, detected = (
        np.concatenate(c) if c else np.empty(0, dt)
        for c, dt in zip(cols, (np.int64, float, np.int8, bool))
    )
    return ClickRecord(proto, p, int(seed), cycle, offset, channel, detected, undecayed)


# --- master-equation references ---------------------------------------------


def _excited_start(p: CavityParams, rho0):
    bundle = models.cavity_liouvillian(p)
    rho0 = bundle.state("e,0") if rho0 is None else linalg.check_density_matrix(rho0)
    return bundle, rho0


def first_emission_density(p: CavityParams, t, rho0=None):
    """Cavity emission rate ``kappa <a^+a>(t)`` without any reset.

    From ``|e,0>`` at most one photon is ever emitted, so this is the
    density of the emission time.
    """
    bundle, rho0 = _excited_start(p, rho0)
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("t must be non-negative")
    rhos = linalg.propagators(bundle.generator, t_arr.ravel()) @ linalg.vec(rho0)
    n_row = linalg.trace_functional(bundle.dim) @ linalg.spre(bundle.intensity_op)
    out = (p.kappa * np.real(rhos @ n_row)).reshape(t_arr.shape)
    return out if out.ndim else float(out)


def cumulative_emission(p: CavityParams, t, rho0=None):
    """Probabilities ``(cavity, other modes)`` of an emission within ``[0, t]``.

    Uses ``int_0^t e^{L s} ds`` from the exponential of an augmented matrix.
    """
    bundle, rho0 = _excited_start(p, rho0)
    ops = models.cavity_operators(p)
    tr = linalg.trace_functional(bundle.dim)
    rows = np.vstack([p.kappa * tr @ linalg.spre(ops["n"]), p.gamma * tr @ linalg.spre(ops["pe"])])
    d2 = bundle.generator.shape[0]
    aug = np.zeros((d2 + 1, d2 + 1), dtype=complex)
    aug[:d2, :d2] = bundle.generator
    aug[:d2, d2] = linalg.vec(rho0)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0):
        raise ValueError("t must be non-negative")
    out = np.empty((t_arr.size, 2))
    for i, ti in enumerate(t_arr):
        integral = sla.expm(aug * ti)[:d2, d2]
        out[i] = np.real(rows @ integral)
    return out if np.ndim(t) else out[0]


def emission_probabilities(p: CavityParams, period: float) -> dict[str, float]:
    """Branching of one cycle: cavity photon, other modes, or still excited."""
    cav, oth = cumulative_emission(p, period)
    return {"cavity": float(cav), "other": float(oth), "none": float(1.0 - cav - oth)}


# --- histograms --------------------------------------------------------------


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    normalized: bool


def detection_histogram(rec: ClickRecord, bins, normalized: bool = False) -> Histogram:
    """Offsets of detected cavity clicks, with Poisson errors.

    ``bins`` is a bin count over ``[0, period)`` or an explicit edge array.
    Normalisation divides by the number of detected clicks times the bin
    width, giving a density of the conditional detection time.
    """
    if len(rec) == 0:
        raise ValueError("empty click record")
    if np.ndim(bins) == 0:
        if int(bins) < 1:
            raise ValueError("bins must be >= 1")
        edges = np.linspace(0.0, rec.protocol.period, int(bins) + 1)
    else:
        edges = np.asarray(bins, dtype=float)
    counts, _ = np.histogram(rec.offset[rec.detected], bins=edges)
    values = counts.astype(float)
    err = np.sqrt(values)
    if normalized:
        scale = rec.n_detected * np.diff(edges)
        scale = np.where(scale > 0, scale, 1.0)
        values, err = values / scale, err / scale
    return Histogram(edges, counts, values, err, normalized)
