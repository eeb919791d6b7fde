"""Dense operator and superoperator algebra.

Operators are plain square complex ``numpy`` arrays.  Density matrices are
vectorised by column stacking, so that ``vec(A X B) = (B^T kron A) vec(X)``
and the commutator ``-i[H, .]`` becomes ``-i (I kron H - H^T kron I)``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from countstats.errors import (
    DegenerateSteadyStateError,
    DimensionError,
    NumericalError,
    PropagationError,
)

# Module tolerances; every routine that uses one accepts a per-call override.
HERMITIAN_ATOL = 1e-12
TRACE_ATOL = 1e-12
EIGENVALUE_FLOOR = -1e-10
NULL_SPACE_TOL = 1e-8
STEADY_RESIDUAL_TOL = 1e-10


def _square(m, name="operator") -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionError(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NumericalError(f"{name} has non-finite entries")
    return m


def hilbert_dim(s) -> int:
    """Hilbert-space dimension ``d`` of a ``d^2 x d^2`` superoperator."""
    n = np.shape(s)[0]
    d = int(round(np.sqrt(n)))
    if d * d != n:
        raise DimensionError(f"superoperator size {n} is not a perfect square")
    return d


def basis(dim: int, index: int) -> np.ndarray:
    ket = np.zeros(dim, dtype=complex)
    ket[index] = 1.0
    return ket


def projector(dim: int, i: int, j: int | None = None) -> np.ndarray:
    """``|i><j|`` (``|i><i|`` when ``j`` is omitted)."""
    op = np.zeros((dim, dim), dtype=complex)
    op[i, i if j is None else j] = 1.0
    return op


def ket2dm(ket) -> np.ndarray:
    ket = np.asarray(ket, dtype=complex)
    return np.outer(ket, ket.conj())


def destroy(n: int) -> np.ndarray:
    """Annihilation operator on Fock states ``|0>..|n-1>``."""
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1).astype(complex)


def dag(m) -> np.ndarray:
    return np.conj(np.transpose(m))


def kron(a, b) -> np.ndarray:
    return np.kron(_square(a), _square(b))


def vec(m) -> np.ndarray:
    return np.asarray(m, dtype=complex).reshape(-1, order="F")


def unvec(v, dim: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    if dim * dim != v.size:
        raise DimensionError(f"vector of length {v.size} is not a vectorised {dim}x{dim} operator")
    return v.reshape(dim, dim, order="F")


def spre(a) -> np.ndarray:
    """Superoperator of ``X -> a X``."""
    a = _square(a)
    return np.kron(np.eye(a.shape[0]), a)


def spost(b) -> np.ndarray:
    """Superoperator of ``X -> X b``."""
    b = _square(b)
    return np.kron(b.T, np.eye(b.shape[0]))


def sprepost(a, b) -> np.ndarray:
    """Superoperator of ``X -> a X b``."""
    return np.kron(_square(b).T, _square(a))


def identity_super(dim: int) -> np.ndarray:
    return np.eye(dim * dim, dtype=complex)


def jump_super(collapse, rate: float) -> np.ndarray:
    """Sandwich term ``rate * c X c^dagger`` of a dissipator."""
    c = _square(collapse, "collapse operator")
    return rate * sprepost(c, dag(c))


def liouvillian(h, channels: Iterable[tuple[np.ndarray, float]] = ()) -> np.ndarray:
    """Lindblad generator for Hamiltonian ``h`` and ``(collapse, rate)`` channels.

    Parameters
    ----------
    h : (d, d) array_like
        Hamiltonian (hbar = 1).
    channels : iterable of (collapse, rate)
        Each channel contributes ``rate * (c X c^+ - {c^+ c, X}/2)``.

    Returns
    -------
    (d^2, d^2) ndarray
        Generator acting on column-stacked density matrices.
    """
    h = _square(h, "Hamiltonian")
    d = h.shape[0]
    eye = np.eye(d)
    lv = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for c, rate in channels:
        c = _square(c, "collapse operator")
        if c.shape != h.shape:
            raise DimensionError(f"collapse operator shape {c.shape} does not match Hamiltonian {h.shape}")
        if not np.isfinite(rate) or rate < 0:
            raise ValueError(f"channel rate must be finite and non-negative, got {rate}")
        if rate == 0:
            continue
        cdc = dag(c) @ c
        lv = lv + rate * (np.kron(c.conj(), c) - 0.5 * np.kron(eye, cdc) - 0.5 * np.kron(cdc.T, eye))
    return lv


def trace_functional(dim: int) -> np.ndarray:
    """Row vector ``t`` with ``t @ vec(X) == Tr X``."""
    return vec(np.eye(dim)).conj()


def propagator(l, t: float) -> np.ndarray:
    """``exp(l t)`` by scaling and squaring (scipy's Pade implementation)."""
    l = _square(l, "generator")
    if t < 0:
        raise ValueError(f"propagation time must be non-negative, got {t}")
    if t == 0:
        return np.eye(l.shape[0], dtype=complex)
    u = scipy.linalg.expm(l * t)
    if not np.all(np.isfinite(u)):
        raise PropagationError(f"exp(L t) is not finite at t={t}")
    return u


def propagators(l, times: Sequence[float]) -> np.ndarray:
    """Stack of ``exp(l t)`` for every ``t`` in ``times``; shape ``(n, D, D)``."""
    l = _square(l, "generator")
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError("propagation times must be non-negative")
    u = scipy.linalg.expm(times[:, None, None] * l[None, :, :])
    if not np.all(np.isfinite(u)):
        raise PropagationError("exp(L t) is not finite on the requested grid")
    return u


def propagate(l, rho0, t: float) -> np.ndarray:
    """Density matrix ``unvec(exp(l t) vec(rho0))``."""
    rho0 = _square(rho0, "density matrix")
    d = rho0.shape[0]
    if np.shape(l) != (d * d, d * d):
        raise DimensionError(f"generator shape {np.shape(l)} incompatible with state dim {d}")
    if t == 0:
        return rho0.copy()
    return unvec(propagator(l, t) @ vec(rho0), d)


def apply_super(s, m) -> np.ndarray:
    m = _square(m)
    d = m.shape[0]
    if np.shape(s) != (d * d, d * d):
        raise DimensionError(f"superoperator shape {np.shape(s)} incompatible with operator dim {d}")
    return unvec(np.asarray(s) @ vec(m), d)


def expectation(a, rho) -> complex:
    a, rho = _square(a), _square(rho, "density matrix")
    if a.shape != rho.shape:
        raise DimensionError(f"operator shape {a.shape} does not match state shape {rho.shape}")
    return complex(np.trace(a @ rho))


def check_density_matrix(
    rho,
    hermitian_atol: float = HERMITIAN_ATOL,
    trace_atol: float = TRACE_ATOL,
    eigenvalue_floor: float = EIGENVALUE_FLOOR,
) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity; return the array."""
    rho = _square(rho, "density matrix")
    herm = np.max(np.abs(rho - dag(rho)))
    if herm > hermitian_atol:
        raise ValueError(f"density matrix not Hermitian (deviation {herm:.3g})")
    tr = np.trace(rho)
    if abs(tr - 1) > trace_atol:
        raise ValueError(f"density matrix trace {tr.real:.15g} differs from 1")
    lo = np.linalg.eigvalsh(0.5 * (rho + dag(rho)))[0]
    if lo < eigenvalue_floor:
        raise ValueError(f"density matrix has negative eigenvalue {lo:.3g}")
    return rho


def steady_state(
    l,
    null_tol: float = NULL_SPACE_TOL,
    residual_tol: float = STEADY_RESIDUAL_TOL,
) -> np.ndarray:
    """Unique stationary density matrix of a Lindblad generator.

    The null vector is the right singular vector belonging to the smallest
    singular value.  If the second smallest singular value is also below
    ``null_tol`` (relative to the largest) the stationary state is not
    unique and :class:`DegenerateSteadyStateError` is raised instead of
    picking one.
    """
    l = _square(l, "generator")
    d = hilbert_dim(l)
    if d == 1:
        return np.ones((1, 1), dtype=complex)
    _, s, vh = np.linalg.svd(l)
    scale = max(s[0], 1.0)
    if s[-2] < null_tol * scale:
        raise DegenerateSteadyStateError(
            f"generator has a degenerate null space (singular values {s[-2]:.3g}, {s[-1]:.3g})"
        )
    rho = unvec(vh[-1].conj(), d)
    tr = np.trace(rho)
    if abs(tr) < 1e-14:
        raise NumericalError("null vector is traceless; generator is not trace preserving")
    rho = rho / tr
    rho = 0.5 * (rho + dag(rho))
    resid = np.linalg.norm(l @ vec(rho))
    if resid > residual_tol * scale:
        raise NumericalError(f"steady-state residual {resid:.3g} exceeds tolerance")
    return rho
