import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from countstats.models import angular

settings.register_profile("ci", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))

KAPPA = angular(2.7)
G = angular(10.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def random_matrix(rng, d, hermitian=False):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (m + m.conj().T) / 2 if hermitian else m


def random_density(rng, d):
    m = random_matrix(rng, d)
    rho = m @ m.conj().T
    return rho / np.trace(rho)
