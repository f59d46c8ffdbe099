"""TOML configuration: parsing, validation and unit conversion.

Frequencies are entered as ordinary frequencies ``f = omega / 2 pi``.  A bare
number means MHz; a string may carry its own unit (``"10 GHz"``,
``"500 kHz"``, ``"50 nHz"``).  Temperatures are in mK, drive power in mW,
the resonator radius in m, the spin rate in rad/s and the drive phase in rad.

Example::

    omega_a = "10 GHz"
    delta_a = 10.0
    delta_m = [-10.0, 10.0]
    kappa_a = 1.0
    kappa_m = [1.0, 1.0]
    g = [2.0, 2.0]
    temperature = 10.0

    [kerr]
    shift = [1.0, 1.0]

    [sagnac]
    shift = 1.0
"""

from __future__ import annotations

import hashlib
import math
import re
import sys
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError, ParameterError
from .params import (Direction, KerrCoefficient, KerrShift, SagnacRotation, SagnacShift,
                     SystemParams, mhz, to_mhz)

FREQ_UNITS = {"nhz": 1e-15, "uhz": 1e-12, "mhz_milli": 1e-9, "hz": 1e-6, "khz": 1e-3,
              "mhz": 1.0, "ghz": 1e3}
_QUANTITY = re.compile(r"^\s*([-+0-9.eE]+)\s*([a-zA-Zµ]+)\s*$")

TOP_KEYS = {"omega_a", "delta_a", "delta_m", "kappa_a", "kappa_m", "g", "temperature",
            "drive_phase", "kerr", "sagnac"}
REQUIRED = ("omega_a", "delta_a", "delta_m", "kappa_a", "kappa_m", "g", "kerr", "sagnac")
KERR_KEYS = {"shift", "coefficient", "drive_power"}
SAGNAC_KEYS = {"shift", "spin_rate", "refractive_index", "radius", "dn_dlambda",
               "wavelength", "direction"}


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(path, "must be finite")
    return float(value)


def parse_frequency(value, path="value"):
    """Frequency entry -> MHz.  Numbers are MHz; strings carry a unit."""
    if isinstance(value, str):
        m = _QUANTITY.match(value)
        if not m:
            raise ConfigError(path, f"cannot parse frequency {value!r}")
        num, unit = m.groups()
        # case matters only to tell mHz from MHz
        if unit == "mHz":
            key = "mhz_milli"
        else:
            key = unit.lower().replace("µ", "u")
        if key not in FREQ_UNITS:
            raise ConfigError(path, f"unknown frequency unit {unit!r}")
        try:
            return float(num) * FREQ_UNITS[key]
        except ValueError:
            raise ConfigError(path, f"cannot parse frequency {value!r}") from None
    return _number(value, path)


def _freq_pair(value, path):
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigError(path, "expected a list of two frequencies")
    return tuple(mhz(parse_frequency(v, f"{path}[{i}]")) for i, v in enumerate(value))


def _check_keys(table, allowed, prefix):
    if not isinstance(table, dict):
        raise ConfigError(prefix, "expected a table")
    for key in table:
        if key not in allowed:
            where = f"{prefix}.{key}" if prefix else key
            raise ConfigError(where, "unknown key")


def _kerr(table):
    _check_keys(table, KERR_KEYS, "kerr")
    has_shift = "shift" in table
    has_coeff = "coefficient" in table
    if has_shift and has_coeff:
        raise ConfigError("kerr", "give either 'shift' or 'coefficient', not both")
    if has_shift:
        if "drive_power" in table:
            raise ConfigError("kerr.drive_power", "only valid together with 'coefficient'")
        return KerrShift(_freq_pair(table["shift"], "kerr.shift"))
    if has_coeff:
        if "drive_power" not in table:
            raise ConfigError("kerr.drive_power", "missing field (mW)")
        power = _number(table["drive_power"], "kerr.drive_power") * 1e-3
        return KerrCoefficient(_freq_pair(table["coefficient"], "kerr.coefficient"), power)
    raise ConfigError("kerr", "missing 'shift' or 'coefficient'")


def _sagnac(table):
    _check_keys(table, SAGNAC_KEYS, "sagnac")
    geometric = SAGNAC_KEYS - {"shift"}
    if "shift" in table:
        extra = sorted(set(table) & geometric)
        if extra:
            raise ConfigError(f"sagnac.{extra[0]}", "not allowed together with 'shift'")
        return SagnacShift(mhz(parse_frequency(table["shift"], "sagnac.shift")))
    for key in ("spin_rate", "refractive_index", "radius"):
        if key not in table:
            raise ConfigError(f"sagnac.{key}", "missing field (or give 'shift')")
    try:
        direction = Direction(str(table.get("direction", "CW")).upper())
    except ValueError:
        raise ConfigError("sagnac.direction", "expected 'CW' or 'CCW'") from None
    wl = table.get("wavelength")
    return SagnacRotation(
        spin_rate=_number(table["spin_rate"], "sagnac.spin_rate"),
        refractive_index=_number(table["refractive_index"], "sagnac.refractive_index"),
        radius=_number(table["radius"], "sagnac.radius"),
        dn_dlambda=_number(table.get("dn_dlambda", 0.0), "sagnac.dn_dlambda"),
        direction=direction,
        wavelength=None if wl is None else _number(wl, "sagnac.wavelength"),
    )


def params_from_dict(doc) -> SystemParams:
    """Validate a parsed document and build :class:`SystemParams`."""
    _check_keys(doc, TOP_KEYS, "")
    for key in REQUIRED:
        if key not in doc:
            raise ConfigError(key, "missing field")
    try:
        return SystemParams(
            omega_a=mhz(parse_frequency(doc["omega_a"], "omega_a")),
            delta_a=mhz(parse_frequency(doc["delta_a"], "delta_a")),
            delta_m=_freq_pair(doc["delta_m"], "delta_m"),
            kappa_a=mhz(parse_frequency(doc["kappa_a"], "kappa_a")),
            kappa_m=_freq_pair(doc["kappa_m"], "kappa_m"),
            g=_freq_pair(doc["g"], "g"),
            kerr=_kerr(doc["kerr"]),
            sagnac=_sagnac(doc["sagnac"]),
            temperature=_number(doc.get("temperature", 0.0), "temperature") * 1e-3,
            drive_phase=_number(doc.get("drive_phase", 0.0), "drive_phase"),
        )
    except ParameterError as exc:
        raise ConfigError(exc.field, str(exc).split(": ", 1)[-1]) from None


def loads_document(raw: bytes, label="<config>"):
    """Parse TOML bytes; returns ``(document, sha256 hex digest)``."""
    try:
        doc = tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError("", f"{label}: {exc}") from None
    return doc, hashlib.sha256(raw).hexdigest()


def load_document(path):
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError("", f"cannot read {path}: {exc.strerror}") from None
    return loads_document(raw, str(path))


def parse_config(path) -> SystemParams:
    doc, _ = load_document(path)
    return params_from_dict(doc)


def params_to_dict(params: SystemParams):
    """Inverse of :func:`params_from_dict`, in the entry units (MHz, mK, mW)."""
    pair = lambda p: [to_mhz(p[0]), to_mhz(p[1])]  # noqa: E731
    doc = {
        "omega_a": to_mhz(params.omega_a),
        "delta_a": to_mhz(params.delta_a),
        "delta_m": pair(params.delta_m),
        "kappa_a": to_mhz(params.kappa_a),
        "kappa_m": pair(params.kappa_m),
        "g": pair(params.g),
        "temperature": params.temperature * 1e3,
        "drive_phase": params.drive_phase,
    }
    k = params.kerr
    if isinstance(k, KerrShift):
        doc["kerr"] = {"shift": pair(k.shift)}
    else:
        doc["kerr"] = {"coefficient": pair(k.coefficient), "drive_power": k.drive_power * 1e3}
    s = params.sagnac
    if isinstance(s, SagnacShift):
        doc["sagnac"] = {"shift": to_mhz(s.shift)}
    else:
        doc["sagnac"] = {"spin_rate": s.spin_rate, "refractive_index": s.refractive_index,
                         "radius": s.radius, "dn_dlambda": s.dn_dlambda,
                         "direction": s.direction.value}
        if s.wavelength is not None:
            doc["sagnac"]["wavelength"] = s.wavelength
    return doc


def params_to_si(params: SystemParams):
    """Converted values (rad/s, K, W) for run manifests."""
    doc = {
        "omega_a": params.omega_a, "delta_a": params.delta_a,
        "delta_m": list(params.delta_m), "kappa_a": params.kappa_a,
        "kappa_m": list(params.kappa_m), "g": list(params.g),
        "temperature": params.temperature, "drive_phase": params.drive_phase,
        "delta_F": params.delta_F,
    }
    k = params.kerr
    if isinstance(k, KerrShift):
        doc["kerr"] = {"shift": list(k.shift)}
    else:
        doc["kerr"] = {"coefficient": list(k.coefficient), "drive_power": k.drive_power}
    return doc


def _fmt(v):
    return repr(float(v))


def dumps_toml(doc):
    """Serialize a document produced by :func:`params_to_dict`."""
    def value(v):
        if isinstance(v, list):
            return "[" + ", ".join(value(x) for x in v) + "]"
        if isinstance(v, str):
            return f'"{v}"'
        return _fmt(v)

    lines = [f"{k} = {value(v)}" for k, v in doc.items() if not isinstance(v, dict)]
    for k, v in doc.items():
        if isinstance(v, dict):
            lines.append("")
            lines.append(f"[{k}]")
            lines.extend(f"{kk} = {value(vv)}" for kk, vv in v.items())
    return "\n".join(lines) + "\n"
