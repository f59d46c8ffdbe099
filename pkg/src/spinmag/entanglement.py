"""Steady-state covariance matrix and bipartite logarithmic negativity."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Tuple

import numpy as np

from .dynamics import diffusion_matrix, drift_matrix, is_stable
from .errors import InstabilityError, ModelDomainError, NumericalError, ParameterError
from .params import KerrShift, ModeIndex, SystemParams

DEFAULT_PAIR = (ModeIndex.MAGNON1, ModeIndex.MAGNON2)


@dataclass(frozen=True)
class CovarianceMatrix:
    V: np.ndarray
    residual: float


@dataclass(frozen=True)
class EntanglementResult:
    pair: Tuple[ModeIndex, ModeIndex]
    stable: bool
    eta_minus: Optional[float] = None
    log_negativity: Optional[float] = None
    max_real_part: Optional[float] = None
    extras: dict = field(default_factory=dict, compare=False)

    @property
    def label(self):
        return f"{self.pair[0].short}-{self.pair[1].short}"

    def to_dict(self):
        d = {
            "pair": self.label,
            "stable": self.stable,
            "eta_minus": self.eta_minus,
            "E_N": self.log_negativity,
            "max_real_part": self.max_real_part,
        }
        d.update(self.extras)
        return d


def symplectic_form(n_modes=3):
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def solve_lyapunov(A, D, check_stability=True) -> CovarianceMatrix:
    """Solve ``A V + V A^T + D = 0`` by a dense Kronecker-product solve.

    The result is symmetrized before the residual ``max|A V + V A^T + D|``
    is recorded.
    """
    A = np.asarray(A, dtype=float)
    D = np.asarray(D, dtype=float)
    n = A.shape[0]
    if check_stability:
        rep = is_stable(A)
        if not rep.stable:
            raise InstabilityError(
                f"drift matrix is not stable (max real part {rep.max_real_part:.6g})")
    eye = np.eye(n)
    L = np.kron(A, eye) + np.kron(eye, A)
    try:
        v = np.linalg.solve(L, -D.reshape(-1))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Lyapunov solve failed: {exc}") from exc
    V = v.reshape(n, n)
    V = 0.5 * (V + V.T)
    residual = float(np.max(np.abs(A @ V + V @ A.T + D)))
    return CovarianceMatrix(V, residual)


def physicality(V):
    """Smallest eigenvalue of ``V + (i/2) J``; non-negative for a physical state."""
    V = np.asarray(V, dtype=float)
    J = symplectic_form(V.shape[0] // 2)
    return float(np.min(np.linalg.eigvalsh(V + 0.5j * J)))


def _pair(pair):
    a, b = (ModeIndex.parse(p) if isinstance(p, str) else ModeIndex(p) for p in pair)
    if a == b:
        raise ValueError("entanglement needs two distinct modes")
    return a, b


def _eta_minus_hermitian(V4):
    """eta_minus as the smallest |eigenvalue| of Vt^(1/2) (iJ) Vt^(1/2), Vt = partial transpose.

    Hermitian eigenvalues stay accurate when the two symplectic eigenvalues
    coincide, where the closed form loses half the digits to the square root.
    """
    P = np.diag([1.0, 1.0, 1.0, -1.0])
    w, U = np.linalg.eigh(P @ V4 @ P)
    if not np.all(w > 0):
        return None
    root = (U * np.sqrt(w)) @ U.T
    ev = np.linalg.eigvalsh(root @ (1j * symplectic_form(2)) @ root)
    return float(np.min(np.abs(ev)))


def eta_minus(V4):
    """Smallest symplectic eigenvalue of the partial transpose of a two-mode block."""
    V4 = np.asarray(V4, dtype=float)
    det2 = lambda m: m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]  # noqa: E731
    det_a = det2(V4[:2, :2])
    det_b = det2(V4[2:, 2:])
    det_c = det2(V4[:2, 2:])
    sigma = det_a + det_b - 2.0 * det_c
    disc = sigma * sigma - 4.0 * np.linalg.det(V4)
    if disc < -1e-9:
        raise ModelDomainError(f"unphysical covariance block (discriminant {disc:.3g})")
    if disc <= 1e-6 * sigma * sigma:
        eta = _eta_minus_hermitian(V4)
        if eta is not None:
            return eta
    inner = sigma - math.sqrt(max(disc, 0.0))
    return math.sqrt(max(inner, 0.0) / 2.0)


def log_negativity(cov, pair=DEFAULT_PAIR, stable=True) -> EntanglementResult:
    """Logarithmic negativity of modes ``pair`` from a 6x6 covariance."""
    V = cov.V if isinstance(cov, CovarianceMatrix) else np.asarray(cov, dtype=float)
    mu, nu = _pair(pair)
    # E_N is symmetric in the pair; a fixed block order makes it bitwise so
    lo, hi = sorted((mu, nu))
    idx = np.r_[lo.quadratures, hi.quadratures]
    eta = eta_minus(V[np.ix_(idx, idx)])
    if abs(2.0 * eta - 1.0) <= 1e-12 or 2.0 * eta >= 1.0:
        en = 0.0
    else:
        en = -math.log(2.0 * eta)
    return EntanglementResult((mu, nu), stable, eta, en)


def resolve_kerr_shift(params: SystemParams, epsilon0=None, branch=0):
    """Kerr shifts to linearize around: stored shifts, or a self-consistent branch."""
    if isinstance(params.kerr, KerrShift):
        return params.kerr.shift
    from .steady_state import solve_steady_state_selfconsistent

    states = solve_steady_state_selfconsistent(params, epsilon0)
    if branch >= len(states):
        raise ParameterError("branch", f"only {len(states)} steady-state branch(es) found")
    return states[branch].delta_K


def covariance_of(params: SystemParams, delta_K=None):
    """Return ``(stability report, covariance or None)`` for a parameter point."""
    if delta_K is None:
        delta_K = resolve_kerr_shift(params)
    A = drift_matrix(params, delta_K)
    rep = is_stable(A, max(params.kappa_a, *params.kappa_m))
    if not rep.stable:
        return rep, None
    return rep, solve_lyapunov(A, diffusion_matrix(params), check_stability=False)


def entanglement_of(params: SystemParams, pairs: Iterable = (DEFAULT_PAIR,),
                    delta_K=None, epsilon0=None, branch=0):
    """Full pipeline for each requested mode pair.

    Unstable points give results with ``stable=False`` and no negativity.
    """
    if delta_K is None:
        delta_K = resolve_kerr_shift(params, epsilon0, branch)
    rep, cov = covariance_of(params, delta_K)
    out = []
    for pair in pairs:
        mu, nu = _pair(pair)
        if cov is None:
            out.append(EntanglementResult((mu, nu), False, max_real_part=rep.max_real_part))
            continue
        res = log_negativity(cov, (mu, nu))
        out.append(EntanglementResult((mu, nu), True, res.eta_minus, res.log_negativity,
                                      rep.max_real_part,
                                      {"lyapunov_residual": cov.residual}))
    return out
