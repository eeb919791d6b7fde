import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from countstats import linalg, models
from countstats.errors import ZeroIntensityError
from countstats.models import RestrictedParams
from countstats.stats.correlation import CorrelationEvaluator, g2_analytic, g2_curve, g2_numeric

from conftest import G, KAPPA


def _stationary(g, k, delta=0.0):
    b = models.restricted_liouvillian(RestrictedParams(delta, g, k, models.MAPPING_CONVENTION))
    return b, linalg.steady_state(b.generator)


@given(st.floats(0.01, 30.0), st.floats(0.1, 10.0))
def test_closed_form_matches_regression(g, k):
    b, rho = _stationary(g, k)
    taus = np.linspace(0, 15 / k, 40)
    assert np.allclose(g2_analytic(g, k, taus), g2_numeric(b, rho, taus), atol=1e-9)


def test_antibunching_and_decorrelation():
    assert g2_analytic(G, KAPPA, 0.0) == 0.0
    assert abs(g2_analytic(G, KAPPA, 40 / KAPPA) - 1) < 1e-6


def test_exceptional_point_is_continuous():
    k = 1.0
    g_ep = k / 8
    taus = np.linspace(0.01, 20, 50)
    at = g2_analytic(g_ep, k, taus)
    near = g2_analytic(g_ep * (1 + 1e-5), k, taus)
    assert np.allclose(at, near, atol=1e-4)
    b, rho = _stationary(g_ep, k)
    assert np.allclose(at, g2_numeric(b, rho, taus), atol=1e-9)


def test_weak_coupling_is_monotone():
    taus = np.linspace(0, 20, 400)
    assert np.all(np.diff(g2_analytic(0.05, 1.0, taus)) >= -1e-15)


def test_strong_coupling_oscillates_at_vacuum_rabi_period():
    taus = np.linspace(0, 3 / KAPPA, 20000)
    v = g2_analytic(G, KAPPA, taus)
    peaks = taus[1:-1][(v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])]
    theta = np.sqrt(complex(KAPPA**2 / 16 - 4 * G**2))
    assert np.mean(np.diff(peaks)) == pytest.approx(2 * np.pi / abs(theta.imag), rel=1e-3)
    assert np.mean(np.diff(peaks)) == pytest.approx(np.pi / G, rel=1e-2)


def test_spectral_and_expm_routes_agree():
    b, rho = _stationary(G, KAPPA, 3.0)
    taus = np.linspace(0, 1, 30)
    a = CorrelationEvaluator(b, rho, method="expm").g2(taus)
    s = CorrelationEvaluator(b, rho, method="spectral").g2(taus)
    assert np.allclose(a, s, atol=1e-10)


def test_zero_intensity_raises():
    b, _ = _stationary(1.0, 1.0)
    with pytest.raises(ZeroIntensityError):
        g2_numeric(b, b.state("e,0"), 0.5)


def test_curve_normalization_is_photon_number():
    b, _ = _stationary(1.0, 2.0)
    c = g2_curve(b, [0.0, 1.0])
    assert c.normalization == pytest.approx(4 / (4 + 8), rel=1e-12)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        g2_analytic(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        g2_analytic(1.0, 1.0, -1.0)
