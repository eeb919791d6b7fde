import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from countstats import linalg, models
from countstats.errors import ConfigError
from countstats.models import CavityParams, DQDParams, RestrictedParams, SplittingConvention

pos = st.floats(0.05, 20.0)
real = st.floats(-20.0, 20.0)


def _block(gen, dim, idx):
    """Rows/columns of a vectorised generator acting on the operators spanned by ``idx``."""
    sel = [i + j * dim for j in idx for i in idx]
    return gen[np.ix_(sel, sel)]


def test_unit_conversion_round_trip():
    assert models.angular(2.7) == pytest.approx(2 * math.pi * 2.7)
    assert models.cyclic(models.angular(2.7)) == pytest.approx(2.7)


def test_cavity_labels_and_hamiltonian():
    p = CavityParams.from_detuning(0.4, 1.3, 0.7, 0.2, fock_cutoff=2)
    b = models.cavity_liouvillian(p)
    assert b.basis_labels == ("g,0", "g,1", "g,2", "e,0", "e,1", "e,2")
    h = models.cavity_operators(p)["H"]
    assert np.allclose(h, h.conj().T)
    assert np.allclose(linalg.trace_functional(b.dim) @ b.generator, 0, atol=1e-12)


@given(real, pos, pos)
def test_restricted_model_is_the_single_excitation_block(delta, g, kappa):
    """With the plain detuning splitting, {|e,0>, |g,1>} of the feedback model is closed."""
    cav = models.cavity_feedback_liouvillian(CavityParams.from_detuning(delta, g, kappa))
    idx = [cav.basis_index("e,0"), cav.basis_index("g,1")]
    red = models.restricted_liouvillian(RestrictedParams(delta, g, kappa, SplittingConvention.HALF_DELTA))
    assert np.allclose(_block(cav.generator, cav.dim, idx), red.generator, atol=1e-12)


@given(real, pos, pos)
def test_table_map_equates_generators(eps, t, gr):
    d = DQDParams.from_detuning(eps, t, math.inf, gr)
    r = models.map_parameters(d)
    assert r.splitting_convention is models.MAPPING_CONVENTION
    diff = models.restricted_liouvillian(r).generator - models.reduced_dqd_liouvillian(d).generator
    assert np.max(np.abs(diff)) < 1e-12


@given(real, pos, pos, st.sampled_from(list(SplittingConvention)))
def test_map_round_trip(eps, t, gr, conv):
    d = DQDParams.from_detuning(eps, t, math.inf, gr)
    back = models.unmap_parameters(models.map_parameters(d, conv))
    assert back.epsilon == pytest.approx(d.epsilon, rel=1e-12, abs=1e-12)
    assert (back.t_coh, back.gamma_right) == (d.t_coh, d.gamma_right)


def test_table_convention_halves_the_level_splitting():
    r = RestrictedParams(2.0, 1.0, 1.0, models.MAPPING_CONVENTION)
    assert r.splitting == pytest.approx(1.0)


def test_dqd_reduces_to_two_states_at_large_gamma_left():
    d = DQDParams.from_detuning(0.8, 1.1, 1e7, 0.9)
    full = linalg.steady_state(models.dqd_liouvillian(d).generator)
    red = linalg.steady_state(models.reduced_dqd_liouvillian(d).generator)
    assert full[0, 0].real < 1e-6
    assert np.allclose(full[1:, 1:], red, atol=1e-6)


def test_infinite_gamma_left_rejected_by_three_state_model():
    with pytest.raises(ConfigError):
        models.dqd_liouvillian(DQDParams.from_detuning(0.0, 1.0, math.inf, 1.0))


@pytest.mark.parametrize(
    "build",
    [
        lambda: CavityParams(0, 0, -1.0, 1.0),
        lambda: CavityParams(0, 0, 1.0, float("nan")),
        lambda: CavityParams(0, 0, 1.0, 1.0, fock_cutoff=0),
        lambda: RestrictedParams(0.0, 1.0, -1.0, models.MAPPING_CONVENTION),
        lambda: RestrictedParams(0.0, 1.0, 1.0, "quarter"),
        lambda: DQDParams(0, 0, 1.0, -1.0, 1.0),
    ],
)
def test_invalid_parameters(build):
    with pytest.raises(ConfigError):
        build()


def test_vacuum_rabi_oscillation_without_loss():
    p = CavityParams.from_detuning(0.0, 1.7, 0.0)
    b = models.cavity_liouvillian(p)
    pe = models.cavity_operators(p)["pe"]
    for t in (0.0, 0.3, 1.1):
        rho = linalg.propagate(b.generator, b.state("e,0"), t)
        assert linalg.expectation(pe, rho).real == pytest.approx(float(models.excited_probability(1.7, t)), abs=1e-12)


def test_steady_photon_number_of_restricted_model():
    g, k = 1.3, 0.9
    b = models.restricted_liouvillian(RestrictedParams(0.0, g, k, models.MAPPING_CONVENTION))
    rho = linalg.steady_state(b.generator)
    assert linalg.expectation(b.intensity_op, rho).real == pytest.approx(4 * g**2 / (k**2 + 8 * g**2), rel=1e-12)
