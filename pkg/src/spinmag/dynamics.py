"""Linearized quadrature dynamics: drift matrix, diffusion matrix, stability.

Quadratures are ordered ``(X_a, Y_a, X_m1, Y_m1, X_m2, Y_m2)`` with
``X = (d^+ + d)/sqrt(2)`` and ``Y = i (d^+ - d)/sqrt(2)``, so the vacuum
variance is 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .params import SystemParams


@dataclass(frozen=True)
class LinearModel:
    A: np.ndarray
    D: np.ndarray
    effective_detunings: tuple  # (cavity, magnon 1, magnon 2) in rad/s


def drift_matrix(params: SystemParams, delta_K) -> np.ndarray:
    """6x6 drift matrix for Kerr shifts ``delta_K`` (rad/s).

    The Kerr shift enters each magnon block asymmetrically: the X->Y
    element is ``Delta_m + Delta_K`` and the Y->X element is
    ``-(Delta_m + 3 Delta_K)``.
    """
    ka = params.kappa_a
    dc = params.delta_a - params.delta_F
    g1, g2 = params.g
    A = np.zeros((6, 6))
    A[0] = (-ka, dc, 0.0, g1, 0.0, g2)
    A[1] = (-dc, -ka, -g1, 0.0, -g2, 0.0)
    for j, g in enumerate((g1, g2)):
        x, y = 2 + 2 * j, 3 + 2 * j
        km, dm, dk = params.kappa_m[j], params.delta_m[j], delta_K[j]
        A[x, 1] = g
        A[y, 0] = -g
        A[x, x] = -km
        A[y, y] = -km
        A[x, y] = dm + dk
        A[y, x] = -(dm + 3.0 * dk)
    return A


def diffusion_matrix(params: SystemParams) -> np.ndarray:
    n_a, n_1, n_2 = params.occupations()
    k1, k2 = params.kappa_m
    d = [params.kappa_a * (2 * n_a + 1)] * 2 + [k1 * (2 * n_1 + 1)] * 2 + [k2 * (2 * n_2 + 1)] * 2
    return np.diag(d)


def linear_model(params: SystemParams, delta_K) -> LinearModel:
    eff = (params.delta_a - params.delta_F,
           params.delta_m[0] + 2.0 * delta_K[0],
           params.delta_m[1] + 2.0 * delta_K[1])
    return LinearModel(drift_matrix(params, delta_K), diffusion_matrix(params), eff)


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    max_real_part: float
    margin: float
    eigenvalues: np.ndarray

    def to_dict(self):
        order = np.lexsort((self.eigenvalues.imag, self.eigenvalues.real))
        return {
            "stable": self.stable,
            "max_real_part": self.max_real_part,
            "margin": self.margin,
            "eigenvalues": [{"re": float(z.real), "im": float(z.imag)}
                            for z in self.eigenvalues[order]],
        }


def is_stable(A, kappa_max=None) -> StabilityReport:
    """Eigenvalue stability test of a drift matrix.

    Stable means every eigenvalue has real part below ``-margin``, where the
    margin is ``1e-6`` times the largest decay rate (read off the diagonal
    when ``kappa_max`` is not given).
    """
    A = np.asarray(A, dtype=float)
    if not np.all(np.isfinite(A)):
        raise NumericalError("drift matrix contains non-finite entries")
    if kappa_max is None:
        kappa_max = float(np.max(np.abs(np.diag(A))))
    margin = 1e-6 * kappa_max
    try:
        ev = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue computation failed: {exc}") from exc
    mx = float(np.max(ev.real))
    return StabilityReport(mx < -margin, mx, margin, ev)
