"""Physical parameters, constants and unit helpers for the spinning cavity model.

All rates and frequencies are stored as angular quantities in rad/s.  The
helpers :func:`mhz` / :func:`to_mhz` convert from and to ordinary frequency
``f = omega / 2 pi`` in MHz, which is how every figure axis is labelled.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Tuple, Union

from .errors import ModelDomainError, ParameterError

# CODATA 2018 exact / recommended values
HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J / K
C_LIGHT = 299792458.0  # m / s

TWO_PI = 2.0 * math.pi

Pair = Tuple[float, float]


def mhz(f):
    """Angular frequency in rad/s for an ordinary frequency given in MHz."""
    return TWO_PI * 1e6 * f


def to_mhz(omega):
    return omega / (TWO_PI * 1e6)


class ModeIndex(enum.IntEnum):
    """Bosonic modes, in the order their quadratures appear in the state vector."""

    CAVITY = 0
    MAGNON1 = 1
    MAGNON2 = 2

    @property
    def quadratures(self):
        return slice(2 * self.value, 2 * self.value + 2)

    @classmethod
    def parse(cls, name):
        key = str(name).strip().lower()
        aliases = {"a": cls.CAVITY, "cavity": cls.CAVITY,
                   "m1": cls.MAGNON1, "magnon1": cls.MAGNON1,
                   "m2": cls.MAGNON2, "magnon2": cls.MAGNON2}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown mode {name!r}; expected one of a, m1, m2") from None

    @property
    def short(self):
        return ("a", "m1", "m2")[self.value]


class Direction(str, enum.Enum):
    CW = "CW"
    CCW = "CCW"

    @property
    def sign(self):
        return 1.0 if self is Direction.CW else -1.0


@dataclass(frozen=True)
class KerrShift:
    """Kerr frequency shifts set directly (rad/s)."""

    shift: Pair


@dataclass(frozen=True)
class KerrCoefficient:
    """Kerr coefficients K_j (rad/s) plus the cavity drive power (W)."""

    coefficient: Pair
    drive_power: float


@dataclass(frozen=True)
class SagnacShift:
    """Sagnac-Fizeau shift set directly (rad/s)."""

    shift: float


@dataclass(frozen=True)
class SagnacRotation:
    """Geometry of the spinning resonator; the shift follows from :func:`sagnac_shift`."""

    spin_rate: float
    refractive_index: float
    radius: float
    dn_dlambda: float = 0.0
    direction: Direction = Direction.CW
    wavelength: float | None = None


KerrSpec = Union[KerrShift, KerrCoefficient]
SagnacSpec = Union[SagnacShift, SagnacRotation]


def sagnac_shift(spin_rate, n, radius, omega_a, dn_dlambda=0.0, wavelength=None,
                 direction=Direction.CW):
    """Rotation-induced shift of the cavity resonance.

    Parameters
    ----------
    spin_rate : float
        Angular velocity of the resonator (rad/s).
    n : float
        Refractive index, must exceed 1.
    radius : float
        Resonator radius (m).
    omega_a : float
        Resonance of the resting cavity (rad/s).
    dn_dlambda : float
        Material dispersion (1/m).
    wavelength : float, optional
        Vacuum wavelength (m); defaults to ``2 pi c / omega_a``.
    direction : Direction or str
        ``CW`` drive gives a positive shift, ``CCW`` a negative one.

    Returns
    -------
    float
        Shift in rad/s.
    """
    if not n > 1.0:
        raise ModelDomainError(f"refractive index must exceed 1, got {n}")
    if not radius > 0.0:
        raise ModelDomainError(f"radius must be positive, got {radius}")
    if spin_rate < 0.0:
        raise ModelDomainError(f"spin rate must be non-negative, got {spin_rate}")
    direction = Direction(direction)
    lam = TWO_PI * C_LIGHT / omega_a if wavelength is None else wavelength
    factor = 1.0 - 1.0 / n**2 - (lam / n) * dn_dlambda
    return direction.sign * spin_rate * n * radius * omega_a / C_LIGHT * factor


def thermal_occupation(omega, temperature):
    """Bose-Einstein occupation of a mode at angular frequency ``omega``."""
    if temperature <= 0.0:
        return 0.0
    x = HBAR * omega / (K_B * temperature)
    if x > 700.0:
        # expm1 overflows; the occupation is exp(-x) to double precision
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def rabi_frequency(power, kappa_a, omega_L):
    """Drive amplitude (rad/s) for input power ``power`` (W).

    The photon flux ``P / (hbar omega_L)`` carries the explicit hbar that
    the natural-unit expression leaves implicit.
    """
    return math.sqrt(2.0 * kappa_a * power / (HBAR * omega_L))


def _pair(value, name):
    try:
        a, b = value
    except (TypeError, ValueError):
        raise ParameterError(name, "expected a pair of numbers") from None
    return (float(a), float(b))


@dataclass(frozen=True)
class SystemParams:
    """Complete parameter set of the cavity / two-magnon model (rad/s, K, rad)."""

    omega_a: float
    delta_a: float
    delta_m: Pair
    kappa_a: float
    kappa_m: Pair
    g: Pair
    kerr: KerrSpec = field(default_factory=lambda: KerrShift((0.0, 0.0)))
    sagnac: SagnacSpec = field(default_factory=lambda: SagnacShift(0.0))
    temperature: float = 0.0
    drive_phase: float = 0.0

    def __post_init__(self):
        for name in ("delta_m", "kappa_m", "g"):
            object.__setattr__(self, name, _pair(getattr(self, name), name))
        for name in ("omega_a", "delta_a", "kappa_a", "temperature", "drive_phase"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ParameterError(name, "must be finite")
            object.__setattr__(self, name, float(value))
        if not self.omega_a > 0:
            raise ParameterError("omega_a", "must be positive")
        if not self.kappa_a > 0:
            raise ParameterError("kappa_a", "must be positive")
        for j in range(2):
            if not self.kappa_m[j] > 0:
                raise ParameterError(f"kappa_m[{j}]", "must be positive")
            if not self.g[j] >= 0:
                raise ParameterError(f"g[{j}]", "must be non-negative")
        if self.temperature < 0:
            raise ParameterError("temperature", "must be non-negative")
        if isinstance(self.kerr, KerrShift):
            object.__setattr__(self, "kerr", KerrShift(_pair(self.kerr.shift, "kerr.shift")))
        elif isinstance(self.kerr, KerrCoefficient):
            coeff = _pair(self.kerr.coefficient, "kerr.coefficient")
            if not all(math.isfinite(k) for k in coeff):
                raise ParameterError("kerr.coefficient", "must be finite")
            if not self.kerr.drive_power >= 0:
                raise ParameterError("kerr.drive_power", "must be non-negative")
        else:
            raise ParameterError("kerr", "expected KerrShift or KerrCoefficient")
        if isinstance(self.sagnac, SagnacRotation):
            try:
                self.delta_F
            except ModelDomainError as exc:
                raise ParameterError("sagnac", str(exc)) from None
        elif not isinstance(self.sagnac, SagnacShift):
            raise ParameterError("sagnac", "expected SagnacShift or SagnacRotation")

    @property
    def omega_L(self):
        """Drive frequency reconstructed from the cavity detuning."""
        return self.omega_a - self.delta_a

    @property
    def delta_F(self):
        s = self.sagnac
        if isinstance(s, SagnacShift):
            return s.shift
        return sagnac_shift(s.spin_rate, s.refractive_index, s.radius, self.omega_a,
                            s.dn_dlambda, s.wavelength, s.direction)

    @property
    def epsilon0(self):
        """Drive amplitude from the configured power, or None in shift mode."""
        if isinstance(self.kerr, KerrCoefficient):
            return rabi_frequency(self.kerr.drive_power, self.kappa_a, self.omega_L)
        return None

    def mode_frequencies(self):
        """Lab-frame angular frequencies of (cavity, magnon 1, magnon 2)."""
        wL = self.omega_L
        return (wL + self.delta_a - self.delta_F,
                wL + self.delta_m[0],
                wL + self.delta_m[1])

    def occupations(self):
        return tuple(thermal_occupation(w, self.temperature) for w in self.mode_frequencies())

    def with_(self, **changes):
        return replace(self, **changes)

    def with_kerr_shift(self, shift):
        return replace(self, kerr=KerrShift(_pair(shift, "kerr.shift")))

    def with_sagnac_shift(self, shift):
        return replace(self, sagnac=SagnacShift(float(shift)))

    def swapped(self):
        """Same system with the roles of the two magnons exchanged."""
        sw = lambda p: (p[1], p[0])  # noqa: E731
        if isinstance(self.kerr, KerrShift):
            kerr = KerrShift(sw(self.kerr.shift))
        else:
            kerr = KerrCoefficient(sw(self.kerr.coefficient), self.kerr.drive_power)
        return replace(self, delta_m=sw(self.delta_m), kappa_m=sw(self.kappa_m),
                       g=sw(self.g), kerr=kerr)


def baseline_params(delta_m=(-10.0, 10.0), delta_K=1.0, delta_F=1.0):
    """Reference parameter set (detunings and shifts given in MHz).

    omega_a/2pi = 10 GHz, all decay rates 1 MHz, both couplings 2 MHz,
    cavity detuning 10 MHz, bath at 10 mK.
    """
    return SystemParams(
        omega_a=mhz(10e3),
        delta_a=mhz(10.0),
        delta_m=(mhz(delta_m[0]), mhz(delta_m[1])),
        kappa_a=mhz(1.0),
        kappa_m=(mhz(1.0), mhz(1.0)),
        g=(mhz(2.0), mhz(2.0)),
        kerr=KerrShift((mhz(delta_K), mhz(delta_K))),
        sagnac=SagnacShift(mhz(delta_F)),
        temperature=10e-3,
    )
