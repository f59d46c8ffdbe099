"""Squeezed-magnon frame and the resonance condition for optimal entanglement.

In the Bogoliubov frame that diagonalizes each Kerr magnon, mode ``j`` has
frequency ``(Delta_m + 2 Delta_K) / cosh(2 r)`` with
``r = ln[(Delta_m + Delta_K) / (Delta_m + 3 Delta_K)] / 4``.  Entanglement
is strongest when the cavity detuning matches this frequency for one magnon
and its negative for the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.optimize import brentq

from .errors import ModelDomainError, NoRootError
from .params import SystemParams


def squeezing_parameter(delta_m, delta_K):
    if delta_K == 0.0:
        return 0.0
    den = delta_m + 3.0 * delta_K
    ratio = (delta_m + delta_K) / den if den != 0.0 else -1.0
    if not ratio > 0.0:
        raise ModelDomainError(
            f"squeezing frame undefined: (dm+dK)/(dm+3dK) = {ratio:.6g} is not positive")
    return 0.25 * math.log(ratio)


def squeezed_frequency(delta_m, delta_K):
    """Magnon frequency in the squeezed frame, ``(Delta_m + 2 Delta_K) / cosh 2r``."""
    r = squeezing_parameter(delta_m, delta_K)
    return (delta_m + 2.0 * delta_K) / math.cosh(2.0 * r)


@dataclass(frozen=True)
class SqueezingFrame:
    r: Tuple[float, float]
    effective_magnon_detunings: Tuple[float, float]
    effective_couplings: Tuple[float, float]

    def to_dict(self):
        return {"r": list(self.r),
                "effective_magnon_detunings": list(self.effective_magnon_detunings),
                "effective_couplings": list(self.effective_couplings)}


def squeezing_frame(params: SystemParams, delta_K) -> SqueezingFrame:
    r = tuple(squeezing_parameter(params.delta_m[j], delta_K[j]) for j in range(2))
    det = tuple((params.delta_m[j] + 2.0 * delta_K[j]) / math.cosh(2.0 * r[j]) for j in range(2))
    geff = tuple(params.g[j] * math.cosh(r[j]) for j in range(2))
    return SqueezingFrame(r, det, geff)


def _segments(delta_K, window):
    """Sub-intervals of ``[-window, window]`` on which ``r`` is defined."""
    if delta_K == 0.0:
        return [(-window, window)]
    lo, hi = sorted((-delta_K, -3.0 * delta_K))
    eps = 1e-12 * abs(delta_K)
    # at least one ulp inside the domain, also when eps underflows
    left = min(lo - eps, float(np.nextafter(lo, -np.inf)))
    right = max(hi + eps, float(np.nextafter(hi, np.inf)))
    segs = []
    if -window < left:
        segs.append((-window, left))
    if right < window:
        segs.append((right, window))
    return segs


def _roots(delta_K, target, window, samples=400):
    f = lambda x: squeezed_frequency(x, delta_K) - target  # noqa: E731
    roots = []
    for a, b in _segments(delta_K, window):
        xs = np.linspace(a, b, samples)
        fs = [f(x) for x in xs]
        for i in range(samples - 1):
            if fs[i] == 0.0:
                roots.append(float(xs[i]))
            elif fs[i] * fs[i + 1] < 0.0:
                roots.append(brentq(f, xs[i], xs[i + 1], xtol=1e-15 * window, rtol=1e-15,
                                    maxiter=200))
        if fs[-1] == 0.0:
            roots.append(float(xs[-1]))
    return roots


@dataclass(frozen=True)
class ResonanceBranch:
    """One sign branch: magnon 1 at ``sign * (Delta_a - Delta_F)``, magnon 2 opposite."""

    sign: int
    delta_m: Tuple[float, float]
    residuals: Tuple[float, float]

    def to_dict(self, unit=1.0):
        return {"sign": "+" if self.sign > 0 else "-",
                "delta_m": [v / unit for v in self.delta_m],
                "residuals": list(self.residuals)}


def optimal_detunings(delta_a, delta_F, delta_K) -> List[ResonanceBranch]:
    """Magnon detuning pairs satisfying the squeezed-frame resonance condition.

    For each sign branch ``s`` solves
    ``(Delta_mj + 2 Delta_Kj)/cosh(2 r_j) = s_j (Delta_a - Delta_F)`` with
    ``s_1 = s`` and ``s_2 = -s``, bracketing roots inside a window of ten
    times ``|Delta_a - Delta_F|`` that skips the interval where ``r_j`` is
    undefined.  Residuals are reported relative to ``|Delta_a - Delta_F|``.
    """
    t = delta_a - delta_F
    if t == 0.0:
        raise ModelDomainError("resonance condition needs Delta_a != Delta_F")
    window = 10.0 * abs(t)
    branches = []
    for sign in (1, -1):
        pair, res = [], []
        for j, s in enumerate((sign, -sign)):
            roots = _roots(delta_K[j], s * t, window)
            if not roots:
                raise NoRootError(f"no resonance root for magnon {j + 1} on branch {sign:+d}")
            # nearest root to the Kerr-free solution
            root = min(roots, key=lambda x: abs(x - s * t))
            pair.append(root)
            res.append(abs(squeezed_frequency(root, delta_K[j]) - s * t) / abs(t))
        branches.append(ResonanceBranch(sign, tuple(pair), tuple(res)))
    return branches
