"""Mean-field steady state of the driven cavity and the two Kerr magnons.

With the Kerr shifts held fixed the mean-field equations are a 3x3 complex
linear system.  When the shifts are generated self-consistently from the
Kerr coefficients, ``Delta_K_j = 2 K_j |m_j|^2`` closes a cubic problem
which is solved by damped Newton iteration on the two real shifts from a
grid of starting guesses; several converged roots signal multistability.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import List

import numpy as np

from .errors import ConvergenceError, ParameterError, SingularSystemError
from .params import KerrCoefficient, KerrShift, SystemParams

COND_LIMIT = 1e12


@dataclass(frozen=True)
class SteadyState:
    a_s: complex
    m_s: tuple
    delta_K: tuple
    residual: float

    @property
    def photon_number(self):
        return abs(self.a_s) ** 2

    @property
    def magnon_numbers(self):
        return (abs(self.m_s[0]) ** 2, abs(self.m_s[1]) ** 2)

    def real_magnon_gauge(self, j=0):
        """Copy rotated by a global phase so that ``m_s[j]`` is real and non-negative.

        Only the reporting changes; all occupations and shifts are untouched.
        """
        m = self.m_s[j]
        if m == 0:
            return self
        ph = cmath.exp(-1j * cmath.phase(m))
        ms = [self.m_s[0] * ph, self.m_s[1] * ph]
        ms[j] = complex(abs(m), 0.0)
        return SteadyState(self.a_s * ph, tuple(ms), self.delta_K, self.residual)

    def to_dict(self):
        cplx = lambda z: {"re": z.real, "im": z.imag}  # noqa: E731
        return {
            "a_s": cplx(self.a_s),
            "m_s": [cplx(self.m_s[0]), cplx(self.m_s[1])],
            "delta_K": list(self.delta_K),
            "photon_number": self.photon_number,
            "magnon_numbers": list(self.magnon_numbers),
            "residual": self.residual,
        }


def mean_field_matrix(params: SystemParams, delta_K):
    """Coefficient matrix M of ``M x = (eps, 0, 0)`` for ``x = (a_s, m1_s, m2_s)``."""
    g1, g2 = params.g
    M = np.zeros((3, 3), dtype=complex)
    M[0, 0] = params.kappa_a + 1j * (params.delta_a - params.delta_F)
    M[0, 1] = 1j * g1
    M[0, 2] = 1j * g2
    M[1, 0] = 1j * g1
    M[2, 0] = 1j * g2
    for j in range(2):
        M[j + 1, j + 1] = params.kappa_m[j] + 1j * (params.delta_m[j] + delta_K[j])
    return M


def _drive(params, epsilon0):
    return epsilon0 * cmath.exp(1j * params.drive_phase)


def _linear_amplitudes(params, eps, delta_K):
    M = mean_field_matrix(params, delta_K)
    cond = np.linalg.cond(M)
    if not cond < COND_LIMIT:
        raise SingularSystemError(f"mean-field matrix is singular (cond={cond:.3g})")
    b = np.array([eps, 0.0, 0.0], dtype=complex)
    return M, np.linalg.solve(M, b)


def mean_field_residual(params, epsilon0, a_s, m_s, delta_K):
    """Max-norm residual of the stationary equations.

    Amplitudes are measured in units of ``epsilon0 / kappa_a`` so the value
    is dimensionless; for zero drive the raw residual over ``kappa_a`` is used.
    """
    M = mean_field_matrix(params, delta_K)
    eps = _drive(params, epsilon0)
    r = M @ np.array([a_s, m_s[0], m_s[1]]) - np.array([eps, 0.0, 0.0])
    scale = abs(epsilon0) if epsilon0 != 0 else params.kappa_a
    return float(np.max(np.abs(r)) / scale)


def solve_steady_state_shift_mode(params: SystemParams, epsilon0, delta_K=None):
    """Steady state for fixed Kerr shifts.

    ``delta_K`` defaults to the shifts stored in ``params.kerr``, which must
    then be a :class:`KerrShift`.
    """
    if delta_K is None:
        if not isinstance(params.kerr, KerrShift):
            raise ParameterError("kerr", "shift mode needs Kerr shifts, not coefficients")
        delta_K = params.kerr.shift
    delta_K = (float(delta_K[0]), float(delta_K[1]))
    eps = _drive(params, epsilon0)
    _, x = _linear_amplitudes(params, eps, delta_K)
    a_s, m1, m2 = (complex(v) for v in x)
    res = mean_field_residual(params, epsilon0, a_s, (m1, m2), delta_K)
    return SteadyState(a_s, (m1, m2), delta_K, res)


def _kerr_map(params, eps, K, shifts):
    """Return F(shifts) = shifts - 2K|m|^2 and its Jacobian."""
    M, x = _linear_amplitudes(params, eps, shifts)
    m = x[1:]
    F = np.asarray(shifts) - 2.0 * K * np.abs(m) ** 2
    # dx/dshift_j = -M^{-1} e_{j+1} (i x_{j+1})
    Minv = np.linalg.inv(M)
    J = np.eye(2)
    for j in range(2):
        dx = -Minv[:, j + 1] * (1j * x[j + 1])
        dm = dx[1:]
        J[:, j] -= 2.0 * K * 2.0 * np.real(np.conj(m) * dm)
    return F, J, x


def _newton(params, eps, K, start, scale, max_iter, ftol):
    s = np.array(start, dtype=float)
    F, J, _ = _kerr_map(params, eps, K, s)
    for _ in range(max_iter):
        fn = np.max(np.abs(F))
        if fn <= ftol:
            return s
        try:
            step = -np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            raise ConvergenceError("singular Jacobian in Kerr iteration") from None
        lam = 1.0
        for _ in range(60):
            trial = s + lam * step
            try:
                Ft, Jt, _ = _kerr_map(params, eps, K, trial)
            except SingularSystemError:
                Ft = None
            if Ft is not None and np.max(np.abs(Ft)) < fn:
                break
            lam *= 0.5
        else:
            # no descent; accept if already at round-off level
            if fn <= 1e3 * ftol + 1e-15 * np.max(np.abs(s)):
                return s
            raise ConvergenceError("line search failed in Kerr iteration")
        s, F, J = trial, Ft, Jt
        if lam == 1.0 and np.max(np.abs(lam * step)) <= 1e-15 * max(scale, np.max(np.abs(s))):
            return s
    if np.max(np.abs(F)) <= ftol:
        return s
    raise ConvergenceError(f"Kerr iteration did not converge in {max_iter} steps")


def solve_steady_state_selfconsistent(params: SystemParams, epsilon0=None, n_starts=16,
                                      max_iter=500, tol=1e-10) -> List[SteadyState]:
    """All distinct self-consistent steady states, sorted by photon number (descending).

    Parameters
    ----------
    params : SystemParams
        ``params.kerr`` must hold Kerr coefficients.
    epsilon0 : float, optional
        Drive amplitude (rad/s); defaults to the value implied by the drive power.
    n_starts : int
        Number of initial Kerr-shift guesses, spread over
        ``[-10, 10]`` times the first-order estimate.
    """
    if not isinstance(params.kerr, KerrCoefficient):
        raise ParameterError("kerr", "self-consistent mode needs Kerr coefficients")
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    if epsilon0 is None:
        epsilon0 = params.epsilon0
    K = np.array(params.kerr.coefficient, dtype=float)
    eps = _drive(params, epsilon0)

    _, x0 = _linear_amplitudes(params, eps, (0.0, 0.0))
    estimate = 2.0 * K * np.abs(x0[1:]) ** 2
    kscale = max(params.kappa_a, *params.kappa_m)
    if np.all(estimate == 0.0):
        starts = [np.zeros(2)]
    else:
        starts = [f * estimate for f in np.linspace(-10.0, 10.0, n_starts)]
    ftol = 1e-14 * max(kscale, float(np.max(np.abs(estimate))))

    amp_unit = abs(epsilon0) / params.kappa_a if epsilon0 != 0 else 1.0
    found: List[SteadyState] = []
    failures = []
    for start in starts:
        try:
            s = _newton(params, eps, K, start, kscale, max_iter, ftol)
        except (ConvergenceError, SingularSystemError) as exc:
            failures.append(exc)
            continue
        _, x = _linear_amplitudes(params, eps, (float(s[0]), float(s[1])))
        a_s, m1, m2 = (complex(v) for v in x)
        dK = (float(2.0 * K[0] * abs(m1) ** 2), float(2.0 * K[1] * abs(m2) ** 2))
        res = mean_field_residual(params, epsilon0, a_s, (m1, m2), dK)
        cand = SteadyState(a_s, (m1, m2), dK, res)
        if res > tol:
            failures.append(ConvergenceError(f"residual {res:.3g} above tolerance"))
            continue
        vec = np.array([a_s, m1, m2]) / amp_unit
        if any(np.max(np.abs(vec - np.array([f.a_s, *f.m_s]) / amp_unit)) < 1e-6 for f in found):
            continue
        found.append(cand)
    if not found:
        raise ConvergenceError(f"all {len(starts)} starts failed: {failures[-1]}")
    found.sort(key=lambda st: -st.photon_number)
    return found


def solve_steady_state(params: SystemParams, epsilon0=None):
    """Dispatch on the Kerr variant; returns a list of steady states."""
    if isinstance(params.kerr, KerrShift):
        if epsilon0 is None:
            raise ParameterError("epsilon0", "shift mode needs an explicit drive amplitude")
        return [solve_steady_state_shift_mode(params, epsilon0)]
    return solve_steady_state_selfconsistent(params, epsilon0)


@dataclass(frozen=True)
class DirectionalOccupations:
    cw: SteadyState
    ccw: SteadyState

    def to_dict(self):
        return {"cw": self.cw.to_dict(), "ccw": self.ccw.to_dict()}


def nonreciprocity_of_occupations(params: SystemParams, epsilon0=None):
    """Steady states for clockwise (+|Delta_F|) and counterclockwise (-|Delta_F|) drive.

    In self-consistent mode the highest-photon-number branch is reported.
    """
    dF = abs(params.delta_F)
    out = []
    for sign in (1.0, -1.0):
        p = params.with_sagnac_shift(sign * dF)
        out.append(solve_steady_state(p, epsilon0)[0])
    return DirectionalOccupations(*out)


def first_order_kerr_shift(params: SystemParams, epsilon0):
    """Kerr shifts ``2 K |m|^2`` evaluated on the Kerr-free amplitudes."""
    K = np.array(params.kerr.coefficient, dtype=float)
    _, x0 = _linear_amplitudes(params, _drive(params, epsilon0), (0.0, 0.0))
    return tuple(float(v) for v in 2.0 * K * np.abs(x0[1:]) ** 2)


__all__ = [
    "SteadyState", "DirectionalOccupations", "mean_field_matrix", "mean_field_residual",
    "solve_steady_state_shift_mode", "solve_steady_state_selfconsistent",
    "solve_steady_state", "nonreciprocity_of_occupations", "first_order_kerr_shift",
]
