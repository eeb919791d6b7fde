import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from countstats import linalg, models
from countstats.errors import EigenvalueCrossingError
from countstats.models import DQDParams
from countstats.stats.transport import (
    dqd_current_analytic,
    fano_electron_analytic,
    fano_fcs,
    fcs_cumulants,
)

rates = st.floats(0.1, 5.0)


def test_symmetric_oracle_values():
    p = DQDParams.from_detuning(0.0, 1.0, 1.0, 1.0)
    assert dqd_current_analytic(p) == pytest.approx(1 / 3.25, rel=1e-15)
    assert fano_electron_analytic(p).value == pytest.approx(73 / 169, rel=1e-15)


@given(st.floats(-3, 3), rates, rates, rates)
def test_current_matches_steady_state(eps, t, gl, gr):
    p = DQDParams.from_detuning(eps, t, gl, gr)
    b = models.dqd_liouvillian(p)
    assert b.flux(linalg.steady_state(b.generator)) == pytest.approx(dqd_current_analytic(p), rel=1e-10)


@given(st.floats(-3, 3), rates, rates, rates)
def test_counting_field_fano_matches_closed_form(eps, t, gl, gr):
    p = DQDParams.from_detuning(eps, t, gl, gr)
    assert fano_fcs(models.dqd_liouvillian(p)).value == pytest.approx(fano_electron_analytic(p).value, rel=1e-4)


def test_large_coherent_coupling_limit():
    p = DQDParams.from_detuning(0.0, 100.0, 1.0, 1.0)
    assert fano_fcs(models.dqd_liouvillian(p)).value == pytest.approx(5 / 9, abs=1e-3)


def test_first_cumulant_is_current():
    p = DQDParams.from_detuning(0.4, 0.8, 1.5, 0.7)
    c1 = fcs_cumulants(models.dqd_liouvillian(p), 1)[0]
    assert c1 == pytest.approx(dqd_current_analytic(p), rel=1e-9)


def test_poisson_process_has_equal_cumulants():
    # a single incoherent hop 0 -> 1 -> 0 counted on the return leg, with the
    # second rate much faster, approaches a Poisson process of rate r
    r = 0.3
    up = linalg.projector(2, 1, 0)
    down = linalg.projector(2, 0, 1)
    gen = linalg.liouvillian(np.zeros((2, 2)), [(up, r), (down, 1e5)])
    b = models.ModelBundle(gen, linalg.jump_super(down, 1e5), linalg.projector(2, 1), ("0", "1"), 1e5)
    c1, c2, c3 = fcs_cumulants(b, 3)
    assert c1 == pytest.approx(r, rel=1e-4)
    assert c2 == pytest.approx(c1, rel=1e-4)
    assert c3 == pytest.approx(c1, rel=1e-3)


def test_third_cumulant_against_high_precision_difference():
    p = DQDParams.from_detuning(0.3, 0.9, 1.2, 0.8)
    b = models.dqd_liouvillian(p)
    c3 = fcs_cumulants(b, 3)[2]
    coarse = fcs_cumulants(b, 3, steps={3: 2e-2})[2]
    assert c3 == pytest.approx(coarse, rel=1e-5)


def test_order_validation():
    with pytest.raises(ValueError):
        fcs_cumulants(models.dqd_liouvillian(DQDParams.from_detuning(0, 1, 1, 1)), 4)


def test_closed_form_rejects_zero_rates():
    with pytest.raises(ValueError):
        dqd_current_analytic(DQDParams.from_detuning(0, 1, 0.0, 1))


def test_eigenvalue_crossing_error_is_numerical():
    assert issubclass(EigenvalueCrossingError, ArithmeticError)
    assert math.isfinite(fano_electron_analytic(DQDParams.from_detuning(1, 1, 1, 1)).value)
