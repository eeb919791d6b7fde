"""Two-dimensional parameter scans (Fano maps, violation maps, VRS threshold)."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from countstats import models
from countstats.errors import ConfigError
from countstats.models import CavityParams, RestrictedParams, SplittingConvention
from countstats.stats import leggett_garg as lg
from countstats.stats.photon_noise import fano_photon_numeric

AXIS_UNITS = {"g": "rad/us", "kappa": "rad/us", "gamma": "rad/us", "delta": "rad/us", "tau": "us"}


class ScanKind(enum.Enum):
    FANO = "fano"
    ADJUSTED = "adjusted"
    RAW = "raw"


_ALLOWED_AXES = {
    ScanKind.FANO: {"g", "delta", "kappa"},
    ScanKind.ADJUSTED: {"g", "delta", "kappa", "tau"},
    ScanKind.RAW: {"g", "delta", "kappa", "gamma", "tau"},
}


@dataclass(frozen=True)
class Axis:
    name: str
    values: np.ndarray

    def __post_init__(self):
        if self.name not in AXIS_UNITS:
            raise ConfigError(f"unknown scan axis {self.name!r}")
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise ConfigError(f"axis {self.name!r} needs at least two points")
        object.__setattr__(self, "values", vals)

    @property
    def unit(self) -> str:
        return AXIS_UNITS[self.name]

    @classmethod
    def linspace(cls, name, lo, hi, points) -> "Axis":
        return cls(name, np.linspace(lo, hi, int(points)))


@dataclass(frozen=True)
class ScanSpec:
    """Axes plus the fixed parameters of every cell.

    ``base`` holds ``g``, ``kappa``, ``gamma`` and ``delta`` (rad/us).  When
    ``tau`` is not an axis, each cell is maximised over ``tau_grid``.
    ``fano_method`` selects the photon-Fano evaluation for FANO maps.
    """

    x: Axis
    y: Axis
    base: dict
    tau_grid: np.ndarray | None = None
    convention: SplittingConvention = models.MAPPING_CONVENTION
    fano_method: str = "resolvent"


@dataclass(frozen=True)
class ScanGrid:
    x_axis: Axis
    y_axis: Axis
    values: np.ndarray  # shape (len(y), len(x))
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.values.shape != (self.y_axis.values.size, self.x_axis.values.size):
            raise ValueError("grid values do not match axis lengths")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("scan grid has undefined cells")


def _fano_cell(params, conv, method):
    if params["g"] == 0:
        return 0.0  # no emission; the Fano factor vanishes in the g -> 0 limit
    rp = RestrictedParams(params["delta"], params["g"], params["kappa"], conv)
    return fano_photon_numeric(rp, method).value


def _ratio_curve(kind, params, conv, taus):
    if kind is ScanKind.ADJUSTED:
        rp = RestrictedParams(params["delta"], params["g"], params["kappa"], conv)
        return np.asarray(lg.lg_adjusted(rp, taus).ratio)
    cp = CavityParams.from_detuning(params["delta"], params["g"], params["kappa"], params.get("gamma", 0.0))
    rho0 = models.cavity_liouvillian(cp).state("g,1")
    return np.asarray(lg.lg_raw(cp, rho0, taus).ratio)


def violation_map(kind: ScanKind, spec: ScanSpec) -> ScanGrid:
    """Evaluate a scalar on every cell of ``spec``'s grid.

    FANO gives the numeric photon Fano factor; ADJUSTED and RAW give the
    Leggett-Garg ratio, either at the cell's ``tau`` or maximised over
    ``spec.tau_grid``.
    """
    kind = ScanKind(kind)
    names = {spec.x.name, spec.y.name}
    if len(names) != 2 or not names <= _ALLOWED_AXES[kind]:
        raise ConfigError(f"axes {sorted(names)} are not valid for a {kind.value} scan")
    tau_axis = "tau" in names
    if kind is not ScanKind.FANO and not tau_axis and spec.tau_grid is None:
        raise ConfigError("a tau_grid is required when tau is not a scan axis")
    xs, ys = spec.x.values, spec.y.values
    values = np.empty((ys.size, xs.size))
    if kind is ScanKind.FANO:
        for i, y in enumerate(ys):
            for j, x in enumerate(xs):
                params = {**spec.base, spec.x.name: x, spec.y.name: y}
                values[i, j] = _fano_cell(params, spec.convention, spec.fano_method)
    elif tau_axis:
        other = spec.y if spec.x.name == "tau" else spec.x
        taus = spec.x.values if spec.x.name == "tau" else spec.y.values
        if np.any(taus <= 0):
            raise ConfigError("tau axis must be strictly positive")
        for k, v in enumerate(other.values):
            curve = _ratio_curve(kind, {**spec.base, other.name: v}, spec.convention, taus)
            if spec.x.name == "tau":
                values[k, :] = curve
            else:
                values[:, k] = curve
    else:
        for i, y in enumerate(ys):
            for j, x in enumerate(xs):
                params = {**spec.base, spec.x.name: x, spec.y.name: y}
                values[i, j], _ = lg.max_ratio(
                    lambda t: _ratio_curve(kind, params, spec.convention, t), spec.tau_grid
                )
    meta = {
        "kind": kind.value,
        "convention": spec.convention.value,
        **{f"base.{k}": v for k, v in sorted(spec.base.items())},
    }
    if kind is ScanKind.FANO:
        meta["fano_method"] = spec.fano_method
    return ScanGrid(spec.x, spec.y, values, meta)


@dataclass(frozen=True)
class VRSBoundary:
    diagonal_rate: float  # kappa = gamma at which the maximal ratio crosses 1
    diagonal_vrs: float  # 4 g / (kappa + gamma) there
    contour: list  # (kappa, gamma) points on the ratio = 1 line, one per gamma row

    @property
    def relative_deviation(self) -> float:
        """Deviation of the diagonal crossing from the ``VRS = 4`` criterion."""
        return self.diagonal_vrs / 4.0 - 1.0


def _max_raw_ratio(g, kappa, gamma, tau_grid, delta=0.0):
    params = {"g": g, "kappa": kappa, "gamma": gamma, "delta": delta}
    return lg.max_ratio(lambda t: _ratio_curve(ScanKind.RAW, params, None, t), tau_grid)[0]


def vrs_threshold_scan(g, kappa_values, gamma_values, tau_grid, delta=0.0) -> tuple[ScanGrid, VRSBoundary]:
    """Maximal non-adjusted Leggett-Garg ratio over a (kappa, gamma) grid.

    The ``ratio = 1`` contour is located per gamma row by linear
    interpolation and, on the diagonal ``kappa = gamma``, by root finding.
    """
    kappa_values = np.asarray(kappa_values, dtype=float)
    gamma_values = np.asarray(gamma_values, dtype=float)
    if np.intersect1d(kappa_values, gamma_values).size < 2:
        raise ConfigError("kappa and gamma axes must share values so the kappa = gamma line is sampled")
    spec = ScanSpec(
        Axis("kappa", kappa_values),
        Axis("gamma", gamma_values),
        {"g": g, "delta": delta},
        tau_grid=np.asarray(tau_grid, dtype=float),
    )
    grid = violation_map(ScanKind.RAW, spec)

    contour = []
    for i, gam in enumerate(gamma_values):
        row = grid.values[i] - 1.0
        for j in range(row.size - 1):
            if row[j] == 0 or row[j] * row[j + 1] < 0:
                k0, k1 = kappa_values[j], kappa_values[j + 1]
                frac = row[j] / (row[j] - row[j + 1]) if row[j] != row[j + 1] else 0.0
                contour.append((float(k0 + frac * (k1 - k0)), float(gam)))
                break

    diag = np.intersect1d(kappa_values, gamma_values)
    diag_ratio = np.array([_max_raw_ratio(g, x, x, tau_grid, delta) for x in diag]) - 1.0
    sign_change = np.nonzero(np.diff(np.sign(diag_ratio)))[0]
    if sign_change.size == 0:
        rate, vrs = math.nan, math.nan
    else:
        j = int(sign_change[0])
        rate = optimize.brentq(
            lambda x: _max_raw_ratio(g, x, x, tau_grid, delta) - 1.0, diag[j], diag[j + 1], xtol=1e-10 * diag[j + 1]
        )
        vrs = 4 * g / (2 * rate)
    grid.meta.update({"g": g, "boundary.diagonal_rate": rate, "boundary.diagonal_vrs": vrs})
    return grid, VRSBoundary(rate, vrs, contour)
