import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from countstats import models
from countstats.models import DQDParams, RestrictedParams, SplittingConvention
from countstats.stats.photon_noise import (
    check_splitting_conventions,
    correlation_integral,
    fano_photon_analytic,
    fano_photon_numeric,
    fano_zero_crossing,
    photon_noise_spectrum,
    resolve_splitting_convention,
)
from countstats.stats.transport import fano_electron_analytic

from conftest import G, KAPPA

# numeric photon Fano factor divided by the closed form; measured, then frozen
CLOSED_FORM_CONSTANT = 0.5


def _rp(delta, g, k=1.0):
    return RestrictedParams(delta, g, k, models.MAPPING_CONVENTION)


@settings(max_examples=15)
@given(st.floats(-5, 5), st.floats(0.05, 10))
def test_quadrature_and_resolvent_agree(delta, g):
    p = _rp(delta, g)
    assert correlation_integral(p, "quadrature") == pytest.approx(correlation_integral(p, "resolvent"), rel=1e-7, abs=1e-10)


@settings(max_examples=15)
@given(st.floats(-5, 5).filter(lambda d: abs(abs(d) - math.sqrt(3)) > 1e-2), st.floats(0.05, 10))
def test_ratio_to_closed_form_is_constant(delta, g):
    num = fano_photon_numeric(_rp(delta, g), "resolvent").value
    assert num / fano_photon_analytic(g, 1.0, delta).value == pytest.approx(CLOSED_FORM_CONSTANT, rel=1e-8)


def test_fano_vanishes_at_root_three_kappa():
    for g in (0.2, 1.0, 5.0):
        assert fano_zero_crossing(g, 1.0, models.MAPPING_CONVENTION) == pytest.approx(math.sqrt(3), abs=1e-9)


def test_sign_structure():
    assert fano_photon_numeric(_rp(0.0, 1.0)).value < 0
    assert fano_photon_numeric(_rp(2.5, 1.0)).value > 0


def test_convention_resolution():
    checks = {c.convention: c for c in check_splitting_conventions()}
    assert resolve_splitting_convention() is SplittingConvention.QUARTER_DELTA
    assert checks[SplittingConvention.HALF_DELTA].zero_crossing == pytest.approx(math.sqrt(3) * 0.9 / 2, rel=1e-8)
    assert not checks[SplittingConvention.FULL_DELTA].consistent


def test_spectrum_at_zero_frequency_is_twice_intensity_times_fano():
    p = _rp(0.5, 1.0)
    from countstats import linalg

    b = models.restricted_liouvillian(p)
    intensity = b.flux(linalg.steady_state(b.generator))
    assert photon_noise_spectrum(p, 0.0) == pytest.approx(2 * intensity * fano_photon_numeric(p).value, rel=1e-8)


def test_spectrum_decays_at_high_frequency():
    p = _rp(0.0, G, KAPPA)
    s0 = photon_noise_spectrum(p, 0.0)
    assert abs(photon_noise_spectrum(p, 100 * G)) < 1e-6 * abs(s0)


def test_electron_fano_minus_one_equals_rescaled_photon_fano():
    d = DQDParams.from_detuning(0.7, 1.3, 1e6 * 0.9, 0.9)
    fe = fano_electron_analytic(d).value - 1
    fph = fano_photon_numeric(models.map_parameters(d)).value / CLOSED_FORM_CONSTANT
    assert fph == pytest.approx(fe, rel=1e-4)
