"""One- and two-dimensional parameter sweeps of the entanglement pipeline.

Axis values are given in display units: MHz (``f = omega/2pi``) for every
frequency-like parameter and mK for the temperature.  Grid points are
independent and are evaluated by a process pool; the output is assembled
row-major (first axis outermost) so the data section never depends on
scheduling or worker count.
"""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import math
import os
import subprocess
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from . import __version__
from .config import params_to_dict
from .entanglement import DEFAULT_PAIR, _pair, covariance_of, log_negativity, physicality
from .errors import ParameterError, SpinmagError
from .params import KerrShift, ModeIndex, SystemParams, baseline_params, mhz

WORKERS_ENV = "SPINMAG_MAX_WORKERS"
CSV_HEADER = ("axis1", "axis2", "E_N", "eta_minus", "stable", "error_code")


def _set_pair(field_name, j):
    def setter(p, v):
        pair = list(getattr(p, field_name))
        pair[j] = v
        return replace(p, **{field_name: tuple(pair)})
    return setter


def _set_both(field_name):
    return lambda p, v: replace(p, **{field_name: (v, v)})


def _set_kerr(j):
    def setter(p, v):
        if not isinstance(p.kerr, KerrShift):
            raise ParameterError("kerr", "sweeping a Kerr shift needs a shift-mode base")
        if j is None:
            return p.with_kerr_shift((v, v))
        shift = list(p.kerr.shift)
        shift[j] = v
        return p.with_kerr_shift(shift)
    return setter


# path -> (unit, display->internal factor, setter)
_MHZ = mhz(1.0)
SWEEPABLE: Dict[str, Tuple[str, float, Callable]] = {
    "delta_a": ("MHz", _MHZ, lambda p, v: replace(p, delta_a=v)),
    "delta_m1": ("MHz", _MHZ, _set_pair("delta_m", 0)),
    "delta_m2": ("MHz", _MHZ, _set_pair("delta_m", 1)),
    "kappa_a": ("MHz", _MHZ, lambda p, v: replace(p, kappa_a=v)),
    "kappa_m1": ("MHz", _MHZ, _set_pair("kappa_m", 0)),
    "kappa_m2": ("MHz", _MHZ, _set_pair("kappa_m", 1)),
    "kappa_m": ("MHz", _MHZ, _set_both("kappa_m")),
    "g1": ("MHz", _MHZ, _set_pair("g", 0)),
    "g2": ("MHz", _MHZ, _set_pair("g", 1)),
    "g": ("MHz", _MHZ, _set_both("g")),
    "delta_K1": ("MHz", _MHZ, _set_kerr(0)),
    "delta_K2": ("MHz", _MHZ, _set_kerr(1)),
    "delta_K": ("MHz", _MHZ, _set_kerr(None)),
    "delta_F": ("MHz", _MHZ, lambda p, v: p.with_sagnac_shift(v)),
    "temperature": ("mK", 1e-3, lambda p, v: replace(p, temperature=v)),
}


@dataclass(frozen=True)
class Axis:
    path: str
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if self.path not in SWEEPABLE:
            raise ParameterError("axis", f"{self.path!r} is not sweepable; "
                                         f"choose from {', '.join(SWEEPABLE)}")
        if self.points < 2:
            raise ParameterError("axis", "need at least 2 points per axis")
        if not self.start < self.stop:
            raise ParameterError("axis", "min must be below max")

    @property
    def unit(self):
        return SWEEPABLE[self.path][0]

    def values(self):
        return np.linspace(self.start, self.stop, self.points)

    def apply(self, params, value):
        _, factor, setter = SWEEPABLE[self.path]
        return setter(params, value * factor)

    @classmethod
    def parse(cls, text):
        """``path:min:max:points``"""
        parts = text.split(":")
        if len(parts) != 4:
            raise ValueError(f"axis must look like path:min:max:points, got {text!r}")
        return cls(parts[0], float(parts[1]), float(parts[2]), int(parts[3]))

    def to_dict(self):
        return {"path": self.path, "min": self.start, "max": self.stop,
                "points": self.points, "unit": self.unit}


@dataclass(frozen=True)
class SweepSpec:
    base: SystemParams
    axes: Tuple[Axis, ...]
    pair: Tuple[ModeIndex, ModeIndex] = DEFAULT_PAIR
    preset: Optional[str] = None

    def __post_init__(self):
        axes = tuple(self.axes)
        if not 1 <= len(axes) <= 2:
            raise ParameterError("axes", "a sweep has one or two axes")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "pair", _pair(self.pair))
        # surface setter errors (e.g. Kerr axis on a coefficient base) up front
        for ax in axes:
            ax.apply(self.base, ax.start)

    @property
    def shape(self):
        return tuple(ax.points for ax in self.axes)

    def grid(self) -> List[Tuple[Tuple[float, ...], SystemParams]]:
        """Row-major list of (display coordinates, parameters)."""
        out = []
        for idx in np.ndindex(*self.shape):
            coords = tuple(float(ax.values()[i]) for ax, i in zip(self.axes, idx))
            p = self.base
            for ax, c in zip(self.axes, coords):
                p = ax.apply(p, c)
            out.append((coords, p))
        return out


def evaluate_point(params: SystemParams, pair=DEFAULT_PAIR):
    """``(E_N, eta_minus, stable, error_code, physicality)``; never raises for physics."""
    try:
        rep, cov = covariance_of(params)
        if cov is None:
            return (None, None, False, "unstable", None)
        res = log_negativity(cov, pair)
        return (res.log_negativity, res.eta_minus, True, "", physicality(cov.V))
    except SpinmagError as exc:
        return (None, None, False, exc.code, None)
    except (ArithmeticError, ValueError, np.linalg.LinAlgError):
        return (None, None, False, "numerical", None)


def _evaluate_star(args):
    return evaluate_point(*args)


def resolve_workers(workers=None):
    n = (os.cpu_count() or 1) if workers is None else int(workers)
    cap = os.environ.get(WORKERS_ENV)
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def _git_hash():
    try:
        out = subprocess.run(["git", "rev-parse", "HEAD"], cwd=Path(__file__).parent,
                             capture_output=True, text=True, timeout=5)
    except (OSError, subprocess.SubprocessError):
        return None
    return out.stdout.strip() or None


def _clean(v):
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


@dataclass
class SweepResult:
    spec: SweepSpec
    coords: List[np.ndarray]
    E_N: np.ndarray
    eta_minus: np.ndarray
    stable: np.ndarray
    error_code: np.ndarray
    physicality: np.ndarray
    metadata: dict = field(default_factory=dict)

    def rows(self):
        for idx in np.ndindex(*self.spec.shape):
            coords = [self.coords[k][i] for k, i in enumerate(idx)]
            yield (coords, _clean(self.E_N[idx]), _clean(self.eta_minus[idx]),
                   bool(self.stable[idx]), str(self.error_code[idx]))

    def data_dict(self):
        return {
            "preset": self.spec.preset,
            "pair": f"{self.spec.pair[0].short}-{self.spec.pair[1].short}",
            "axes": [ax.to_dict() for ax in self.spec.axes],
            "coords": [c.tolist() for c in self.coords],
            "E_N": [_clean(v) for v in self.E_N.ravel()],
            "eta_minus": [_clean(v) for v in self.eta_minus.ravel()],
            "stable": [bool(v) for v in self.stable.ravel()],
            "error_code": [str(v) for v in self.error_code.ravel()],
            "physicality": [_clean(v) for v in self.physicality.ravel()],
        }

    def to_dict(self):
        return {"data": self.data_dict(), "metadata": self.metadata}

    def data_json(self):
        return json.dumps(self.data_dict(), sort_keys=True)

    def to_csv(self, manifest=None):
        buf = io.StringIO()
        if manifest is not None:
            buf.write("# manifest: " + json.dumps(manifest, sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for coords, en, eta, stable, code in self.rows():
            a1 = repr(float(coords[0]))
            a2 = repr(float(coords[1])) if len(coords) > 1 else ""
            w.writerow([a1, a2, "" if en is None else repr(en),
                        "" if eta is None else repr(eta), str(stable).lower(), code])
        return buf.getvalue()

    def peak(self, mask=None):
        """Display coordinates and value of the largest E_N (optionally within ``mask``)."""
        vals = np.where(np.isnan(self.E_N), -np.inf, self.E_N)
        if mask is not None:
            vals = np.where(mask, vals, -np.inf)
        idx = np.unravel_index(int(np.argmax(vals)), vals.shape)
        return tuple(self.coords[k][i] for k, i in enumerate(idx)), float(self.E_N[idx])


def run_sweep(spec: SweepSpec, workers=None) -> SweepResult:
    grid = spec.grid()
    n = resolve_workers(workers)
    tasks = [(p, spec.pair) for _, p in grid]
    if n <= 1 or len(tasks) < 64:
        results = [evaluate_point(*t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (4 * n))
        with ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(_evaluate_star, tasks, chunksize=chunk))
    shape = spec.shape
    nan = lambda v: np.nan if v is None else v  # noqa: E731
    E_N = np.array([nan(r[0]) for r in results], dtype=float).reshape(shape)
    eta = np.array([nan(r[1]) for r in results], dtype=float).reshape(shape)
    stable = np.array([r[2] for r in results], dtype=bool).reshape(shape)
    codes = np.array([r[3] for r in results], dtype=object).reshape(shape)
    phys = np.array([nan(r[4]) for r in results], dtype=float).reshape(shape)
    meta = {
        "tool": "spinmag",
        "version": __version__,
        "git_hash": _git_hash(),
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "config": params_to_dict(spec.base),
        "workers": n,
    }
    return SweepResult(spec, [ax.values() for ax in spec.axes], E_N, eta, stable, codes,
                       phys, meta)


@dataclass
class NonreciprocityResult:
    flip: str
    plus: SweepResult
    minus: SweepResult

    @property
    def difference(self):
        return self.plus.E_N - self.minus.E_N

    def to_dict(self):
        diff = [_clean(v) for v in self.difference.ravel()]
        return {"flip": self.flip, "plus": self.plus.to_dict(),
                "minus": self.minus.to_dict(), "difference": diff}


def nonreciprocity_map(spec: SweepSpec, flip="sagnac", workers=None) -> NonreciprocityResult:
    """Run ``spec`` with the Sagnac (or Kerr) shift set to +|x| and to -|x|."""
    base = spec.base
    if flip == "sagnac":
        mag = abs(base.delta_F)
        bases = [base.with_sagnac_shift(mag), base.with_sagnac_shift(-mag)]
    elif flip == "kerr":
        if not isinstance(base.kerr, KerrShift):
            raise ParameterError("kerr", "Kerr flip needs a shift-mode base")
        mag = tuple(abs(v) for v in base.kerr.shift)
        bases = [base.with_kerr_shift(mag), base.with_kerr_shift((-mag[0], -mag[1]))]
    else:
        raise ValueError("flip must be 'sagnac' or 'kerr'")
    plus, minus = (run_sweep(replace(spec, base=b), workers) for b in bases)
    return NonreciprocityResult(flip, plus, minus)


# ---------------------------------------------------------------- presets

_SIX = {  # panel letter -> (sign of Delta_K, sign of Delta_F)
    "a": (1, 1), "b": (1, 0), "c": (1, -1), "d": (-1, 1), "e": (-1, 0), "f": (-1, -1),
}
_TWO = {"a": 1, "b": -1}
_SERIES_F = Axis("delta_F", -1.0, 1.0, 3)


def _fig1_axes(sk, sf):
    # centred on -2 dK; roots sit at -2 dK +- sqrt((10 - dF)^2 + dK^2)
    centre = -2.0 * sk
    half = {1: 10.0, 0: 11.0, -1: 12.0}[sf]
    return (Axis("delta_m1", centre - half, centre + half, 81),
            Axis("delta_m2", centre - half, centre + half, 81))


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    delta_K: float
    delta_F: float
    axes: Tuple[Axis, ...]
    delta_m: Tuple[float, float] = (-10.0, 10.0)

    def spec(self, base: Optional[SystemParams] = None, points: Optional[int] = None) -> SweepSpec:
        base = base_for_presets() if base is None else base
        b = replace(base, delta_m=(mhz(self.delta_m[0]), mhz(self.delta_m[1])))
        b = b.with_kerr_shift((mhz(self.delta_K), mhz(self.delta_K)))
        b = b.with_sagnac_shift(mhz(self.delta_F))
        axes = self.axes
        if points is not None:
            axes = (replace(axes[0], points=points),) + tuple(
                replace(a, points=points) if a.points > 3 else a for a in axes[1:])
        return SweepSpec(b, axes, DEFAULT_PAIR, self.name)


def base_for_presets():
    return baseline_params()


def _build_presets():
    out = {}
    for k, (sk, sf) in _SIX.items():
        out[f"fig1{k}"] = Preset(f"fig1{k}", f"E_N vs (dm1, dm2); dK={sk:+d}, dF={sf:+d} MHz",
                                 sk, sf, _fig1_axes(sk, sf))
    out["fig2a"] = Preset("fig2a", "E_N vs dK (dK1=dK2); series dF in {-1,0,1} MHz",
                          1.0, 1.0, (Axis("delta_K", -3.0, 3.0, 101), _SERIES_F))
    out["fig2b"] = Preset("fig2b", "E_N vs dF; series dK in {-1,1} MHz",
                          1.0, 1.0, (Axis("delta_F", -3.0, 3.0, 101),
                                     Axis("delta_K", -1.0, 1.0, 2)))
    for k, sk in _TWO.items():
        out[f"fig3{k}"] = Preset(f"fig3{k}", f"E_N vs delta_a; dK={sk:+d} MHz; series dF",
                                 sk, 1.0, (Axis("delta_a", -20.0, 20.0, 101), _SERIES_F))
    for k, (sk, sf) in _SIX.items():
        out[f"fig4{k}"] = Preset(f"fig4{k}", f"E_N vs (g1, g2); dK={sk:+d}, dF={sf:+d} MHz",
                                 sk, sf, (Axis("g1", 0.0, 8.0, 81), Axis("g2", 0.0, 8.0, 81)))
    for k, sk in _TWO.items():
        out[f"fig5{k}"] = Preset(f"fig5{k}", f"E_N vs g (g1=g2); dK={sk:+d} MHz; series dF",
                                 sk, 1.0, (Axis("g", 0.0, 8.0, 101), _SERIES_F))
    for k, (sk, sf) in _SIX.items():
        out[f"fig6{k}"] = Preset(f"fig6{k}", f"E_N vs (km1, km2); dK={sk:+d}, dF={sf:+d} MHz",
                                 sk, sf, (Axis("kappa_m1", 0.1, 4.0, 81),
                                          Axis("kappa_m2", 0.1, 4.0, 81)))
    for k, sk in _TWO.items():
        out[f"fig7{k}"] = Preset(f"fig7{k}", f"E_N vs km (km1=km2); dK={sk:+d} MHz; series dF",
                                 sk, 1.0, (Axis("kappa_m", 0.1, 4.0, 101), _SERIES_F))
    for k, sk in _TWO.items():
        out[f"fig8{k}"] = Preset(f"fig8{k}", f"E_N vs T [mK]; dK={sk:+d} MHz; series dF",
                                 sk, 1.0, (Axis("temperature", 0.0, 200.0, 101), _SERIES_F))
    return out


PRESETS: Dict[str, Preset] = _build_presets()


def preset_spec(name, base=None, points=None) -> SweepSpec:
    try:
        preset = PRESETS[name]
    except KeyError:
        raise ParameterError("preset", f"unknown preset {name!r}") from None
    return preset.spec(base, points)


__all__ = ["Axis", "SweepSpec", "SweepResult", "NonreciprocityResult", "PRESETS",
           "SWEEPABLE", "CSV_HEADER", "run_sweep", "nonreciprocity_map", "preset_spec",
           "evaluate_point", "resolve_workers"]
