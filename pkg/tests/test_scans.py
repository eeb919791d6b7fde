import math

import numpy as np
import pytest

from countstats.errors import ConfigError
from countstats.models import angular
from countstats.stats import scans

from conftest import G, KAPPA


def test_fano_map_sign_lines():
    d = KAPPA * np.array([-3.0, -1.0, 0.0, 1.0, 3.0])
    spec = scans.ScanSpec(scans.Axis("delta", d), scans.Axis("g", [0.0, 0.5 * KAPPA, 2 * KAPPA]), {"kappa": KAPPA})
    grid = scans.violation_map(scans.ScanKind.FANO, spec)
    assert grid.values.shape == (3, 5)
    assert np.all(grid.values[0] == 0)
    inside = np.abs(d) < math.sqrt(3) * KAPPA
    assert np.all((grid.values[1:] < 0) == inside)


def test_adjusted_map_orientation_and_determinism():
    spec = scans.ScanSpec(
        scans.Axis("tau", np.linspace(0.005, 0.2, 40)), scans.Axis("delta", angular(np.array([-20.0, 0.0, 20.0]))), {"g": G, "kappa": KAPPA}
    )
    a = scans.violation_map(scans.ScanKind.ADJUSTED, spec)
    b = scans.violation_map("adjusted", spec)
    assert a.values.shape == (3, 40)
    assert np.array_equal(a.values, b.values)
    assert a.values[1].max() > 1


def test_max_over_tau_when_tau_is_not_an_axis():
    taus = np.linspace(0.001, 0.5, 200)
    spec = scans.ScanSpec(
        scans.Axis("kappa", [KAPPA, 2 * KAPPA]), scans.Axis("gamma", [0.0, KAPPA]), {"g": G, "delta": 0.0}, tau_grid=taus
    )
    grid = scans.violation_map(scans.ScanKind.RAW, spec)
    assert grid.values[0, 0] > grid.values[1, 1]


def test_invalid_axes():
    with pytest.raises(ConfigError):
        scans.Axis("mass", [1, 2])
    with pytest.raises(ConfigError):
        scans.Axis("g", [1.0])
    spec = scans.ScanSpec(scans.Axis("tau", [0.1, 0.2]), scans.Axis("gamma", [0, 1]), {"g": 1, "kappa": 1})
    with pytest.raises(ConfigError):
        scans.violation_map(scans.ScanKind.FANO, spec)
    spec = scans.ScanSpec(scans.Axis("g", [0.1, 0.2]), scans.Axis("delta", [0, 1]), {"kappa": 1})
    with pytest.raises(ConfigError):
        scans.violation_map(scans.ScanKind.ADJUSTED, spec)


def test_vrs_boundary_close_to_four():
    rates = angular(np.linspace(2.0, 10.0, 5))
    grid, boundary = scans.vrs_threshold_scan(G, rates, rates, np.linspace(0.001, 1.0, 400))
    assert grid.values.shape == (5, 5)
    assert abs(boundary.relative_deviation) < 0.2
    assert boundary.contour
    with pytest.raises(ConfigError):
        scans.vrs_threshold_scan(G, rates, rates + 0.1, [0.1, 0.2])
