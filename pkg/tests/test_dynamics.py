from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from spinmag import baseline_params, mhz, thermal_occupation
from spinmag.dynamics import diffusion_matrix, drift_matrix, is_stable, linear_model
from spinmag.errors import NumericalError

from oracles import charpoly_exact, params_mhz, random_draw, routh_hurwitz_stable

S = np.diag([1.0, -1.0, 1.0, -1.0, 1.0, -1.0])
# S alone also reverses the couplings; composing with the gauge m_j -> -m_j keeps them
S_GAUGED = np.diag([1.0, -1.0, -1.0, 1.0, -1.0, 1.0])
P_SWAP = np.eye(6)[[0, 1, 4, 5, 2, 3]]


def symbolic_drift(values):
    """Quadrature drift matrix re-derived from the linearized Heisenberg equations.

    Each bosonic fluctuation is written as (X + iY)/sqrt(2) and its equation
    of motion is split into Xdot = (d+ + d)/sqrt(2), Ydot = i(d+ - d)/sqrt(2).
    """
    ka, da, dF = sp.symbols("kappa_a Delta_a Delta_F", real=True)
    km = sp.symbols("kappa_m1 kappa_m2", real=True)
    dm = sp.symbols("Delta_m1 Delta_m2", real=True)
    dK = sp.symbols("Delta_K1 Delta_K2", real=True)
    g = sp.symbols("g1 g2", real=True)
    X = sp.symbols("X_a X_1 X_2", real=True)
    Y = sp.symbols("Y_a Y_1 Y_2", real=True)
    ops = [(X[k] + sp.I * Y[k]) / sp.sqrt(2) for k in range(3)]
    a, m1, m2 = ops
    dots = [
        -(ka + sp.I * (da - dF)) * a - sp.I * g[0] * m1 - sp.I * g[1] * m2,
    ]
    for j, m in enumerate((m1, m2)):
        dots.append(-(km[j] + sp.I * (dm[j] + 2 * dK[j])) * m - sp.I * g[j] * a
                    - sp.I * dK[j] * sp.conjugate(m))
    rows = []
    for d in dots:
        dd = sp.conjugate(d)
        rows.append(sp.expand((dd + d) / sp.sqrt(2)))
        rows.append(sp.expand(sp.I * (dd - d) / sp.sqrt(2)))
    u = [X[0], Y[0], X[1], Y[1], X[2], Y[2]]
    M = sp.Matrix([[sp.simplify(sp.diff(r, v)) for v in u] for r in rows])
    subs = {ka: values["ka"], da: values["da"], dF: values["dF"]}
    for j in range(2):
        subs.update({km[j]: values["km"][j], dm[j]: values["dm"][j],
                     dK[j]: values["dK"][j], g[j]: values["g"][j]})
    return np.array(M.subs(subs).evalf(), dtype=complex)


def test_zero_couplings_give_diagonal_matrix():
    p = params_mhz(da=0.0, dm=(0.0, 0.0), dK=(0.0, 0.0), dF=0.0, ka=1.5, km=(2.0, 3.0),
                   g=(0.0, 0.0))
    np.testing.assert_array_equal(drift_matrix(p, (0.0, 0.0)),
                                  np.diag([-1.5, -1.5, -2.0, -2.0, -3.0, -3.0]))


def test_kerr_free_blocks_are_rotations():
    p = params_mhz(dm=(-4.0, 7.0))
    A = drift_matrix(p, (0.0, 0.0))
    for j, d in enumerate((-4.0, 7.0)):
        blk = A[2 + 2 * j:4 + 2 * j, 2 + 2 * j:4 + 2 * j]
        np.testing.assert_array_equal(blk, [[-1.0, d], [-d, -1.0]])


def test_printed_matrix_matches_symbolic_derivation():
    vals = dict(ka=mhz(1.0), da=mhz(10.0), dF=mhz(1.0), km=(mhz(1.0), mhz(1.0)),
                dm=(mhz(7.06), mhz(-11.06)), dK=(mhz(1.0), mhz(1.0)), g=(mhz(2.0), mhz(2.0)))
    p = baseline_params(delta_m=(7.06, -11.06))
    A = drift_matrix(p, p.kerr.shift)
    ref = symbolic_drift(vals)
    assert np.max(np.abs(ref.imag)) == 0.0
    np.testing.assert_allclose(A, ref.real, rtol=1e-14, atol=1e-6)


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-50, 50), st.floats(-50, 50))
def test_symbolic_oracle_random_shifts(dK1, dK2, dm1, dm2):
    vals = dict(ka=0.7, da=3.0, dF=-0.4, km=(1.1, 0.9), dm=(dm1, dm2), dK=(dK1, dK2),
                g=(2.5, 1.5))
    p = params_mhz(da=3.0, dm=(dm1, dm2), dK=(dK1, dK2), dF=-0.4, ka=0.7, km=(1.1, 0.9),
                   g=(2.5, 1.5))
    np.testing.assert_allclose(drift_matrix(p, (dK1, dK2)), symbolic_drift(vals).real,
                               rtol=1e-13, atol=1e-12)




def test_diffusion_limits():
    zero = baseline_params().with_(temperature=0.0)
    k = zero.kappa_a
    np.testing.assert_array_equal(diffusion_matrix(zero), np.diag([k] * 6))
    cold = diffusion_matrix(baseline_params())
    np.testing.assert_allclose(cold, diffusion_matrix(zero), rtol=1e-15, atol=0)
    warm = diffusion_matrix(baseline_params().with_(temperature=0.1))
    p100 = baseline_params().with_(temperature=0.1)
    n_a, n_1, n_2 = p100.occupations()
    assert n_1 == pytest.approx(8.31e-3, rel=2e-2)
    assert n_1 == pytest.approx(thermal_occupation(p100.omega_L + p100.delta_m[0], 0.1),
                                rel=1e-15)
    np.testing.assert_allclose(np.diag(warm),
                               k * (2 * np.array([n_a, n_a, n_1, n_1, n_2, n_2]) + 1),
                               rtol=1e-15)


def test_linear_model_effective_detunings():
    p = baseline_params()
    lm = linear_model(p, p.kerr.shift)
    assert lm.effective_detunings == (p.delta_a - p.delta_F, p.delta_m[0] + 2 * mhz(1.0),
                                      p.delta_m[1] + 2 * mhz(1.0))


def test_decoupled_system_stable_with_slowest_decay():
    p = params_mhz(g=(0.0, 0.0), dK=(0.0, 0.0), km=(0.5, 3.0))
    rep = is_stable(drift_matrix(p, (0.0, 0.0)), 3.0)
    assert rep.stable
    assert rep.max_real_part == pytest.approx(-0.5, rel=1e-12)
    assert rep.margin == pytest.approx(3e-6)


def test_baseline_is_stable(base):
    rep = is_stable(drift_matrix(base, base.kerr.shift))
    assert rep.stable and rep.max_real_part < 0


def test_sign_flipped_row_is_unstable(base):
    A = drift_matrix(base, (0.0, 0.0))
    A[2, :] *= -1.0
    A[3, 3] = 1.0
    assert not is_stable(A).stable


def test_non_finite_matrix_raises():
    A = np.eye(6)
    A[0, 0] = np.nan
    with pytest.raises(NumericalError):
        is_stable(A)


def test_routh_hurwitz_tabulation_sanity():
    # (s+1)(s+2)(s+3) stable; (s-1)(s+2)(s+3) not
    assert routh_hurwitz_stable([Fraction(c) for c in (1, 6, 11, 6)])
    assert not routh_hurwitz_stable([Fraction(c) for c in (1, 4, 1, -6)])
    A = [[Fraction(v) for v in row] for row in np.diag([-1.0, -2.0, -3.0])]
    assert charpoly_exact(A) == [1, 6, 11, 6]


def test_eigenvalue_test_matches_routh_hurwitz(rng):
    verdicts = []
    for _ in range(1000):
        p = random_draw(rng)
        A = drift_matrix(p, p.kerr.shift)
        rep = is_stable(A, max(p.kappa_a, *p.kappa_m))
        exact = routh_hurwitz_stable(charpoly_exact([[Fraction(v) for v in row] for row in A]))
        assert rep.stable == exact, (p, rep.max_real_part)
        verdicts.append(exact)
    assert 0 < sum(verdicts) < len(verdicts)


@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(-5, 5), st.floats(-5, 5),
       st.floats(0.2, 5), st.floats(0.2, 5), st.floats(0, 10), st.floats(0, 10))
def test_swap_symmetry(dm1, dm2, dK1, dK2, k1, k2, g1, g2):
    p = params_mhz(dm=(dm1, dm2), dK=(dK1, dK2), km=(k1, k2), g=(g1, g2))
    A = drift_matrix(p, (dK1, dK2))
    As = drift_matrix(p.swapped(), (dK2, dK1))
    np.testing.assert_array_equal(As, P_SWAP @ A @ P_SWAP.T)


@given(st.floats(-50, 50), st.floats(-5, 5), st.floats(-50, 50), st.floats(-50, 50),
       st.floats(-5, 5), st.floats(-5, 5))
def test_conjugation_symmetry(da, dF, dm1, dm2, dK1, dK2):
    p = params_mhz(da=da, dF=dF, dm=(dm1, dm2), dK=(dK1, dK2))
    q = params_mhz(da=-da, dF=-dF, dm=(-dm1, -dm2), dK=(-dK1, -dK2))
    A = drift_matrix(p, (dK1, dK2))
    Aq = drift_matrix(q, (-dK1, -dK2))
    np.testing.assert_array_equal(Aq, S_GAUGED @ A @ S_GAUGED)
    # with the couplings reversed as well, S itself is the map
    flip_g = np.diag([1.0, 1.0, -1.0, -1.0, -1.0, -1.0])
    np.testing.assert_array_equal(flip_g @ Aq @ flip_g, S @ A @ S)
