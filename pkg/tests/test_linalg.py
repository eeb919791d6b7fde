import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import linalg as sla

from countstats import linalg
from countstats.errors import DegenerateSteadyStateError, DimensionError, NumericalError

from conftest import random_density, random_matrix

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 5)


@given(seeds, dims)
def test_vec_unvec_round_trip(seed, d):
    m = random_matrix(np.random.default_rng(seed), d)
    assert np.array_equal(linalg.unvec(linalg.vec(m)), m)


@given(seeds, dims)
def test_sandwich_identity(seed, d):
    rng = np.random.default_rng(seed)
    a, x, b = (random_matrix(rng, d) for _ in range(3))
    lhs = linalg.sprepost(a, b) @ linalg.vec(x)
    assert np.allclose(lhs, linalg.vec(a @ x @ b), atol=1e-10)
    assert np.allclose(linalg.spre(a) @ linalg.vec(x), linalg.vec(a @ x))
    assert np.allclose(linalg.spost(b) @ linalg.vec(x), linalg.vec(x @ b))


def _random_generator(rng, d, n_channels=2):
    h = random_matrix(rng, d, hermitian=True)
    channels = [(random_matrix(rng, d), float(rng.uniform(0.1, 2))) for _ in range(n_channels)]
    return linalg.liouvillian(h, channels)


@given(seeds, st.integers(2, 4))
def test_generator_preserves_trace_and_hermiticity(seed, d):
    rng = np.random.default_rng(seed)
    gen = _random_generator(rng, d)
    assert np.allclose(linalg.trace_functional(d) @ gen, 0, atol=1e-10)
    rho = random_density(rng, d)
    out = linalg.propagate(gen, rho, float(rng.uniform(0, 2)))
    assert abs(np.trace(out) - 1) < 1e-10
    assert np.allclose(out, out.conj().T, atol=1e-10)
    assert np.linalg.eigvalsh(out).min() > -1e-10


def test_propagator_semigroup(rng):
    gen = _random_generator(rng, 3)
    u = linalg.propagator(gen, 0.7)
    assert np.allclose(linalg.propagator(gen, 0.3) @ linalg.propagator(gen, 0.4), u, atol=1e-12)
    assert np.allclose(linalg.propagator(gen, 0.0), np.eye(9))
    stack = linalg.propagators(gen, [0.0, 0.3, 0.7])
    assert np.allclose(stack[2], u, atol=1e-12)


def test_propagator_rejects_negative_time(rng):
    with pytest.raises(ValueError):
        linalg.propagator(_random_generator(rng, 2), -1.0)


def test_decay_steady_state_is_ground():
    sm = np.array([[0, 1], [0, 0]], dtype=complex)
    gen = linalg.liouvillian(np.diag([0.0, 1.0]), [(sm, 1.0)])
    assert np.allclose(linalg.steady_state(gen), np.diag([1.0, 0.0]), atol=1e-12)


def test_driven_two_level_steady_state_matches_closed_form():
    # resonant Rabi drive Omega with decay gamma: p_e = Omega^2 / (gamma^2 + 2 Omega^2)
    omega, gamma = 1.3, 0.7
    sm = np.array([[0, 1], [0, 0]], dtype=complex)
    h = 0.5 * omega * (sm + sm.T)
    rho = linalg.steady_state(linalg.liouvillian(h, [(sm, gamma)]))
    assert rho[1, 1].real == pytest.approx(omega**2 / (gamma**2 + 2 * omega**2), rel=1e-12)


def test_degenerate_generator_raises():
    with pytest.raises(DegenerateSteadyStateError):
        linalg.steady_state(np.zeros((4, 4)))


def test_dimension_errors():
    with pytest.raises(DimensionError):
        linalg.unvec(np.zeros(5))
    with pytest.raises(DimensionError):
        linalg.liouvillian(np.eye(2), [(np.eye(3), 1.0)])
    with pytest.raises(ValueError):
        linalg.liouvillian(np.eye(2), [(np.eye(2), -1.0)])
    with pytest.raises(NumericalError):
        linalg.liouvillian(np.array([[np.nan]]))


def test_propagator_agrees_with_direct_expm(rng):
    gen = _random_generator(rng, 3)
    assert np.allclose(linalg.propagator(gen, 1.1), sla.expm(1.1 * gen), atol=1e-12)


def test_density_matrix_checks():
    with pytest.raises(ValueError):
        linalg.check_density_matrix(np.diag([0.5, 0.6]))
    with pytest.raises(ValueError):
        linalg.check_density_matrix(np.diag([1.5, -0.5]))
    with pytest.raises(ValueError):
        linalg.check_density_matrix(np.array([[0.5, 0.1], [0.2, 0.5]]))


def test_destroy_commutator():
    a = linalg.destroy(4)
    comm = a @ linalg.dag(a) - linalg.dag(a) @ a
    assert np.allclose(np.diag(comm)[:-1], 1.0)
