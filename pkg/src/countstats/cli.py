"""Command-line front end.

Frequencies are given as f = omega / 2 pi in MHz and times in microseconds;
``--angular`` switches every frequency flag to raw rad/us.  Settings come
from built-in defaults, then an INI file (``--config``), then flags.
"""

from __future__ import annotations

import argparse
import configparser
import logging
import math
import sys
from pathlib import Path

import numpy as np

from countstats import __version__, acceptance, counting, io, linalg, models, trajectory
from countstats.errors import ConfigError, CountstatsError, NumericalError
from countstats.models import MAPPING_CONVENTION, CavityParams, DQDParams, RestrictedParams
from countstats.stats import scans
from countstats.stats.correlation import g2_analytic, g2_numeric
from countstats.stats.photon_noise import fano_photon_analytic
from countstats.stats.transport import dqd_current_analytic, fano_electron_analytic, fcs_cumulants

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2

# name -> (default, type, help); frequencies carry the suffix _mhz
GLOBAL_OPTIONS = {
    "seed": (12345, int, "random seed (64-bit unsigned)"),
    "out": (".", str, "output directory"),
}
COMMAND_OPTIONS = {
    "g2": {
        "g_mhz": (10.0, float, "coupling g/2pi"),
        "kappa_mhz": (2.7, float, "cavity loss kappa/2pi"),
        "tau_max_us": (1.0, float, "largest delay"),
        "points": (201, int, "number of delays"),
    },
    "fano-map": {
        "kappa_mhz": (2.7, float, "cavity loss kappa/2pi"),
        "g_min_mhz": (0.0, float, "smallest coupling"),
        "g_max_mhz": (20.0, float, "largest coupling"),
        "g_points": (41, int, "coupling points"),
        "delta_min_mhz": (-20.0, float, "smallest detuning"),
        "delta_max_mhz": (20.0, float, "largest detuning"),
        "delta_points": (81, int, "detuning points"),
    },
    "lg-map": {
        "kind": ("adjusted", str, "adjusted or raw statistics"),
        "g_mhz": (10.0, float, "coupling g/2pi"),
        "kappa_mhz": (2.7, float, "cavity loss kappa/2pi"),
        "gamma_mhz": (3.0, float, "atomic loss gamma/2pi (raw only)"),
        "tau_max_us": (0.2, float, "largest delay"),
        "tau_points": (200, int, "delay points"),
        "delta_min_mhz": (-20.0, float, "smallest detuning"),
        "delta_max_mhz": (20.0, float, "largest detuning"),
        "delta_points": (81, int, "detuning points"),
    },
    "vrs-scan": {
        "g_mhz": (10.0, float, "coupling g/2pi"),
        "rate_min_mhz": (1.0, float, "smallest kappa/2pi and gamma/2pi"),
        "rate_max_mhz": (12.0, float, "largest kappa/2pi and gamma/2pi"),
        "rate_points": (12, int, "points per rate axis"),
        "tau_max_us": (1.0, float, "largest delay searched"),
        "tau_points": (1000, int, "delay grid points"),
    },
    "dqd": {
        "epsilon_mhz": (0.0, float, "level detuning epsilon/2pi"),
        "t_mhz": (1.0, float, "tunnel coupling T/2pi"),
        "gamma_left_mhz": (1.0, float, "left tunnelling rate / 2pi"),
        "gamma_right_mhz": (1.0, float, "right tunnelling rate / 2pi"),
    },
    "simulate": {
        "g_mhz": (10.0, float, "coupling g/2pi"),
        "kappa_mhz": (2.7, float, "cavity loss kappa/2pi"),
        "gamma_mhz": (0.0, float, "atomic loss gamma/2pi"),
        "delta_mhz": (0.0, float, "atom-cavity detuning / 2pi"),
        "period_us": (math.nan, float, "pulse period (default 20/kappa)"),
        "pulses": (100_000, int, "number of pulses"),
        "efficiency": (1.0, float, "detection efficiency"),
    },
    "adjust": {
        "input": ("", str, "click record (default OUT/clicks.tsv)"),
    },
    "estimate": {
        "input": ("", str, "adjusted record (default OUT/adjusted.tsv)"),
        "bin_us": (0.005, float, "lag bin width"),
        "tau_max_us": (0.5, float, "largest lag"),
    },
    "verify": {
        "skip": ("", str, "comma-separated check numbers to skip"),
    },
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="INI file with [run] and per-command sections")
    common.add_argument("--angular", action="store_true", default=None, help="frequencies in rad/us instead of MHz/2pi")
    for name, (_, typ, text) in GLOBAL_OPTIONS.items():
        common.add_argument(f"--{name}", type=typ, default=None, help=text)
    parser = _Parser(prog="countstats", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for cmd, opts in COMMAND_OPTIONS.items():
        sp = sub.add_parser(cmd, parents=[common])
        for name, (default, typ, text) in opts.items():
            sp.add_argument(f"--{name.replace('_', '-')}", dest=name, type=typ, default=None, help=f"{text} [{default}]")
    return parser


def _cast(typ, key, raw):
    try:
        if typ is bool:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return typ(raw)
    except ValueError as exc:
        raise ConfigError(f"config value {key}={raw!r} is not a valid {typ.__name__}") from exc


def resolve_settings(args) -> dict:
    """Merge defaults, the config file and flags (flags win)."""
    options = {**GLOBAL_OPTIONS, **COMMAND_OPTIONS[args.command], "angular": (False, bool, "")}
    settings = {k: v[0] for k, v in options.items()}
    if args.config:
        cp = configparser.ConfigParser(interpolation=None)
        try:
            with open(args.config, encoding="utf-8") as fh:
                cp.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc.strerror}") from exc
        except configparser.Error as exc:
            raise ConfigError(f"malformed config {args.config}: {exc}") from exc
        for section in cp.sections():
            if section not in ("run", *COMMAND_OPTIONS):
                raise ConfigError(f"unknown config section [{section}]")
            if section not in ("run", args.command):
                continue
            for key, raw in cp.items(section):
                if key not in options:
                    raise ConfigError(f"unknown config key {key!r} in [{section}]")
                settings[key] = _cast(options[key][1], key, raw)
    for key in options:
        val = getattr(args, key, None)
        if val is not None:
            settings[key] = val
    return settings


def _freq(settings, key) -> float:
    """Frequency setting in rad/us."""
    v = float(settings[key])
    return v if settings["angular"] else models.angular(v)


def _points(settings, key, minimum=2):
    n = int(settings[key])
    if n < minimum:
        raise ConfigError(f"{key.replace('_', '-')} must be at least {minimum}")
    return n


def _meta(command, settings, **extra):
    meta = {"command": command, "seed": settings["seed"], "units": "rad/us" if settings["angular"] else "MHz/2pi, us"}
    meta.update({f"param.{k}": v for k, v in sorted(settings.items()) if k not in ("seed", "out")})
    meta.update(extra)
    return meta


def _to_unit(settings, w):
    return w if settings["angular"] else models.cyclic(w)


# --- commands ------------------------------------------------------------------


def cmd_g2(s, out: Path):
    g, k = _freq(s, "g_mhz"), _freq(s, "kappa_mhz")
    if not k > 0:
        raise ConfigError("kappa must be positive")
    if not s["tau_max_us"] > 0:
        raise ConfigError("tau-max-us must be positive")
    taus = np.linspace(0.0, s["tau_max_us"], _points(s, "points"))
    b = models.restricted_liouvillian(RestrictedParams(0.0, g, k, MAPPING_CONVENTION))
    rho = linalg.steady_state(b.generator)
    a, n = g2_analytic(g, k, taus), g2_numeric(b, rho, taus)
    dev = float(np.max(np.abs(a - n)))
    io.write_csv(out / "g2.csv", ["tau", "g2_analytic", "g2_numeric"], zip(taus, a, n), _meta("g2", s, max_abs_difference=dev))
    return dev < 1e-8


def cmd_fano_map(s, out: Path):
    k = _freq(s, "kappa_mhz")
    g_vals = np.linspace(_freq(s, "g_min_mhz"), _freq(s, "g_max_mhz"), _points(s, "g_points"))
    d_vals = np.linspace(_freq(s, "delta_min_mhz"), _freq(s, "delta_max_mhz"), _points(s, "delta_points"))
    spec = scans.ScanSpec(scans.Axis("delta", d_vals), scans.Axis("g", g_vals), {"kappa": k})
    grid = scans.violation_map(scans.ScanKind.FANO, spec)
    closed = np.array([[fano_photon_analytic(g, k, d).value for d in d_vals] for g in g_vals])
    mask = np.abs(closed) > 1e-12
    ratio = float(np.mean(grid.values[mask] / closed[mask])) if mask.any() else math.nan
    rows = (
        (_to_unit(s, d), _to_unit(s, g), grid.values[i, j]) for i, g in enumerate(g_vals) for j, d in enumerate(d_vals)
    )
    meta = _meta(
        "fano-map", s, x="delta", y="g", value="photon Fano factor", zero_line=_to_unit(s, math.sqrt(3) * k),
        ratio_to_closed_form=ratio, convention=MAPPING_CONVENTION.value,
    )
    io.write_csv(out / "fano_map.csv", ["x", "y", "value"], rows, meta)
    return True


def cmd_lg_map(s, out: Path):
    kind = s["kind"]
    if kind not in ("adjusted", "raw"):
        raise ConfigError("kind must be 'adjusted' or 'raw'")
    if not s["tau_max_us"] > 0:
        raise ConfigError("tau-max-us must be positive")
    n_tau = _points(s, "tau_points")
    taus = np.arange(1, n_tau + 1) * (s["tau_max_us"] / n_tau)
    d_vals = np.linspace(_freq(s, "delta_min_mhz"), _freq(s, "delta_max_mhz"), _points(s, "delta_points"))
    base = {"g": _freq(s, "g_mhz"), "kappa": _freq(s, "kappa_mhz"), "gamma": _freq(s, "gamma_mhz") if kind == "raw" else 0.0}
    spec = scans.ScanSpec(scans.Axis("tau", taus), scans.Axis("delta", d_vals), base)
    grid = scans.violation_map(scans.ScanKind(kind), spec)
    rows = ((t, _to_unit(s, d), grid.values[i, j]) for i, d in enumerate(d_vals) for j, t in enumerate(taus))
    meta = _meta("lg-map", s, x="tau", y="delta", value="Leggett-Garg ratio", max_ratio=float(grid.values.max()))
    io.write_csv(out / "lg_map.csv", ["x", "y", "value"], rows, meta)
    return True


def cmd_vrs_scan(s, out: Path):
    g = _freq(s, "g_mhz")
    rates = np.linspace(_freq(s, "rate_min_mhz"), _freq(s, "rate_max_mhz"), _points(s, "rate_points"))
    if not rates[0] > 0:
        raise ConfigError("rates must be positive")
    n_tau = _points(s, "tau_points")
    taus = np.arange(1, n_tau + 1) * (s["tau_max_us"] / n_tau)
    grid, boundary = scans.vrs_threshold_scan(g, rates, rates, taus)
    rows = ((_to_unit(s, kk), _to_unit(s, gg), grid.values[i, j]) for i, gg in enumerate(rates) for j, kk in enumerate(rates))
    meta = _meta(
        "vrs-scan", s, x="kappa", y="gamma", value="max Leggett-Garg ratio",
        diagonal_crossing=_to_unit(s, boundary.diagonal_rate), diagonal_vrs=boundary.diagonal_vrs,
        relative_deviation_from_4=boundary.relative_deviation,
    )
    io.write_csv(out / "vrs_scan.csv", ["x", "y", "value"], rows, meta)
    return True


def cmd_dqd(s, out: Path):
    p = DQDParams.from_detuning(
        _freq(s, "epsilon_mhz"), _freq(s, "t_mhz"), _freq(s, "gamma_left_mhz"), _freq(s, "gamma_right_mhz")
    )
    b = models.dqd_liouvillian(p)
    current = b.flux(linalg.steady_state(b.generator))
    c1, c2, c3 = fcs_cumulants(b, 3)
    rows = [
        ("current_per_us", dqd_current_analytic(p), current),
        ("fcs_c1_per_us", dqd_current_analytic(p), c1),
        ("fano", fano_electron_analytic(p).value, c2 / c1),
        ("c3_over_c1", math.nan, c3 / c1),
    ]
    io.write_csv(out / "dqd_stats.csv", ["quantity", "analytic", "numeric"], rows, _meta("dqd", s))
    return abs(current / dqd_current_analytic(p) - 1) < 1e-8


def cmd_simulate(s, out: Path):
    p = CavityParams.from_detuning(_freq(s, "delta_mhz"), _freq(s, "g_mhz"), _freq(s, "kappa_mhz"), _freq(s, "gamma_mhz"))
    period = s["period_us"]
    if math.isnan(period):
        proto = trajectory.PulseProtocol.default_for(p, s["pulses"], s["efficiency"])
    else:
        proto = trajectory.PulseProtocol(period, s["pulses"], s["efficiency"])
    rec = trajectory.simulate_pulsed(p, proto, s["seed"])
    io.write_click_record(out / "clicks.tsv", rec, _meta("simulate", s))
    return True


def cmd_adjust(s, out: Path):
    src = Path(s["input"]) if s["input"] else out / "clicks.tsv"
    rec = io.read_click_record(src)
    adj = counting.time_adjust(rec)
    io.write_adjusted_record(out / "adjusted.tsv", adj, {"command": "adjust", "clicks": len(adj)})
    return True


def cmd_estimate(s, out: Path):
    src = Path(s["input"]) if s["input"] else out / "adjusted.tsv"
    adj, meta_in = io.read_adjusted_record(src)
    try:
        est = counting.estimate_g2(adj, s["bin_us"], s["tau_max_us"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rate = counting.estimate_rate(adj)
    meta = _meta("estimate", s, source=meta_in.get("source", ""), clicks=len(adj), rate=rate.rate, rate_stderr=rate.stderr)
    rows = zip(est.curve.taus, est.curve.values, est.stderr)
    io.write_csv(out / "g2_estimate.csv", ["tau", "g2", "stderr"], rows, meta)
    return True


def cmd_verify(s, out: Path):
    try:
        skip = {int(x) for x in s["skip"].split(",") if x.strip()}
    except ValueError as exc:
        raise ConfigError("skip must be a comma-separated list of integers") from exc
    results = []
    for check in acceptance.CHECKS:
        if check.number in skip:
            continue
        res = check()
        print(res.line(), flush=True)
        results.append(res)
    lines = [f"countstats {__version__} self-verification", *[r.line(with_time=False) for r in results]]
    if skip:
        lines.append(f"skipped: {','.join(str(n) for n in sorted(skip))}")
    failed = [r.number for r in results if not r.passed]
    lines.append("result: " + ("all checks passed" if not failed else f"FAILED {failed}"))
    (out / "verify_report.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(lines[-1])
    return not failed


COMMANDS = {
    "g2": cmd_g2,
    "fano-map": cmd_fano_map,
    "lg-map": cmd_lg_map,
    "vrs-scan": cmd_vrs_scan,
    "dqd": cmd_dqd,
    "simulate": cmd_simulate,
    "adjust": cmd_adjust,
    "estimate": cmd_estimate,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        settings = resolve_settings(args)
        out = io.ensure_dir(settings["out"])
        ok = COMMANDS[args.command](settings, out)
    except ConfigError as exc:
        print(f"countstats: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, CountstatsError) as exc:
        print(f"countstats: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"countstats: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    if not ok:
        print(f"countstats: {args.command}: tolerance breach", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
