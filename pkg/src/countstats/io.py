"""Text formats for records and result tables.

All files start with ``# key=value`` header lines.  Floats are written with
``repr`` so reading a file back reproduces every value bit for bit.
"""

from __future__ import annotations

import io as _io
import os
from pathlib import Path

import numpy as np

from countstats import __version__
from countstats.counting import AdjustedRecord
from countstats.errors import ConfigError
from countstats.models import CavityParams
from countstats.trajectory import Channel, ClickRecord, PulseProtocol

CLICK_FORMAT = "countstats-clicks/1"
ADJUSTED_FORMAT = "countstats-adjusted/1"


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def header_lines(meta: dict) -> list[str]:
    """``# key=value`` lines with the tool version first."""
    items = {"version": __version__, **meta}
    for k, v in items.items():
        if "=" in str(k) or "\n" in _fmt(v):
            raise ValueError(f"header entry {k!r} cannot be written")
    return [f"# {k}={_fmt(v)}" for k, v in items.items()]


def _split_header(lines):
    meta, body = {}, []
    for line in lines:
        if line.startswith("#"):
            key, sep, value = line[1:].strip().partition("=")
            if not sep:
                raise ConfigError(f"malformed header line {line!r}")
            meta[key] = value
        elif line.strip():
            body.append(line)
    return meta, body


def _write_text(path, lines) -> Path:
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc.strerror}") from exc
    return path


def _read_text(path) -> list[str]:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc


# --- click records -------------------------------------------------------------

_PARAM_FIELDS = ("omega", "nu", "g", "kappa", "gamma")


def click_record_lines(rec: ClickRecord, extra: dict | None = None) -> list[str]:
    meta = {"format": CLICK_FORMAT, "seed": rec.seed}
    meta.update({f"params.{k}": getattr(rec.params, k) for k in _PARAM_FIELDS})
    meta["params.fock_cutoff"] = rec.params.fock_cutoff
    meta.update(
        {
            "protocol.period": rec.protocol.period,
            "protocol.n_pulses": rec.protocol.n_pulses,
            "protocol.efficiency": rec.protocol.efficiency,
            "undecayed_cycles": rec.undecayed_cycles,
        }
    )
    meta.update(extra or {})
    lines = header_lines(meta)
    lines.append("cycle\toffset_us\tchannel\tdetected")
    for c, o, ch, d in zip(rec.cycle, rec.offset, rec.channel, rec.detected):
        lines.append(f"{int(c)}\t{float(o)!r}\t{Channel(int(ch)).name}\t{int(bool(d))}")
    return lines


def write_click_record(path, rec: ClickRecord, extra: dict | None = None) -> Path:
    return _write_text(path, click_record_lines(rec, extra))


def read_click_record(path) -> ClickRecord:
    meta, body = _split_header(_read_text(path))
    if meta.get("format") != CLICK_FORMAT:
        raise ConfigError(f"{path} is not a click record")
    try:
        params = CavityParams(
            **{k: float(meta[f"params.{k}"]) for k in _PARAM_FIELDS},
            fock_cutoff=int(meta["params.fock_cutoff"]),
        )
        proto = PulseProtocol(
            float(meta["protocol.period"]), int(meta["protocol.n_pulses"]), float(meta["protocol.efficiency"])
        )
        rows = [line.split("\t") for line in body[1:]]
        cycle = np.array([int(r[0]) for r in rows], dtype=np.int64)
        offset = np.array([float(r[1]) for r in rows], dtype=float)
        channel = np.array([Channel[r[2]] for r in rows], dtype=np.int8)
        detected = np.array([r[3] == "1" for r in rows], dtype=bool)
        return ClickRecord(proto, params, int(meta["seed"]), cycle, offset, channel, detected, int(meta["undecayed_cycles"]))
    except (KeyError, IndexError, ValueError) as exc:
        raise ConfigError(f"malformed click record {path}: {exc}") from exc


# --- adjusted records ----------------------------------------------------------


def write_adjusted_record(path, adj: AdjustedRecord, extra: dict | None = None) -> Path:
    lines = header_lines({"format": ADJUSTED_FORMAT, "source": adj.source, **(extra or {})})
    lines.append("k\twait_us")
    lines.extend(f"{k}\t{float(w)!r}" for k, w in enumerate(adj.waits))
    return _write_text(path, lines)


def read_adjusted_record(path) -> tuple[AdjustedRecord, dict]:
    meta, body = _split_header(_read_text(path))
    if meta.get("format") != ADJUSTED_FORMAT:
        raise ConfigError(f"{path} is not an adjusted record")
    try:
        waits = np.array([float(line.split("\t")[1]) for line in body[1:]], dtype=float)
        return AdjustedRecord(waits, source=meta.get("source", "")), meta
    except (IndexError, ValueError) as exc:
        raise ConfigError(f"malformed adjusted record {path}: {exc}") from exc


# --- tables ---------------------------------------------------------------------


def write_csv(path, columns: list[str], rows, meta: dict) -> Path:
    """CSV with a ``#`` header block; numbers are written with ``repr``."""
    buf = _io.StringIO()
    for line in header_lines(meta):
        buf.write(line + "\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return _write_text(path, buf.getvalue().rstrip("\n").split("\n"))


def read_csv(path) -> tuple[dict, list[str], np.ndarray]:
    meta, body = _split_header(_read_text(path))
    if not body:
        raise ConfigError(f"{path} has no column line")
    columns = body[0].split(",")
    data = np.array([[float(v) for v in line.split(",")] for line in body[1:]], dtype=float)
    return meta, columns, data.reshape(-1, len(columns))


def ensure_dir(path) -> Path:
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {path}: {exc.strerror}") from exc
    if not os.access(path, os.W_OK):
        raise ConfigError(f"output directory {path} is not writable")
    return path
