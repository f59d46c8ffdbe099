import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spinmag import baseline_params, entanglement_of, mhz, to_mhz
from spinmag.errors import ModelDomainError, NoRootError
from spinmag.squeezing import (optimal_detunings, squeezed_frequency, squeezing_frame,
                               squeezing_parameter)

R_706 = -0.055413402038264056  # mpmath, 40 digits: ln(8.06/10.06)/4


def closed_form_root(target, dK):
    """The solution of (dm + 2dK)/cosh(2r) = target.

    cosh(2r) = (dm + 2dK) / sqrt((dm + dK)(dm + 3dK)), so the condition reads
    sign(dm + 2dK) sqrt((dm + 2dK)^2 - dK^2) = target, whose only solution is
    dm = -2dK + sign(target) sqrt(target^2 + dK^2).
    """
    return -2 * dK + math.copysign(math.sqrt(target * target + dK * dK), target)


def test_no_kerr_no_squeezing():
    assert squeezing_parameter(mhz(7.0), 0.0) == 0.0


def test_squeezing_parameter_frozen():
    assert squeezing_parameter(mhz(7.06), mhz(1.0)) == pytest.approx(R_706, rel=1e-12)
    assert squeezing_parameter(mhz(-11.06), mhz(1.0)) == pytest.approx(-R_706, rel=1e-12)


@pytest.mark.parametrize("dm", [-2.0, -1.5, -2.9, -1.0, -3.0])
def test_squeezing_domain_gap(dm):
    with pytest.raises(ModelDomainError):
        squeezing_parameter(mhz(dm), mhz(1.0))


@given(st.floats(-40, 40), st.floats(-3, 3))
def test_frame_invariant_exp4r(dm, dK):
    ratio_den = dm + 3 * dK
    if dK == 0 or ratio_den == 0 or (dm + dK) / ratio_den <= 0.05:
        return
    p = baseline_params(delta_m=(dm, dm), delta_K=dK)
    frame = squeezing_frame(p, p.kerr.shift)
    for j in range(2):
        assert math.exp(4 * frame.r[j]) == pytest.approx((dm + dK) / (dm + 3 * dK), rel=1e-12)
        assert frame.effective_couplings[j] == pytest.approx(p.g[j] * math.cosh(frame.r[j]))


def test_kerr_free_resonance_is_exact():
    branches = optimal_detunings(mhz(10.0), 0.0, (0.0, 0.0))
    assert [b.delta_m for b in branches] == [(mhz(10.0), -mhz(10.0)), (-mhz(10.0), mhz(10.0))]


@pytest.mark.parametrize("dF,expected", [(1.0, (7.06, -11.06)), (-1.0, (9.05, -13.05))])
def test_resonance_anchors(dF, expected):
    plus, minus = optimal_detunings(mhz(10.0), mhz(dF), (mhz(1.0), mhz(1.0)))
    got = tuple(to_mhz(v) for v in plus.delta_m)
    assert got == pytest.approx(expected, abs=0.02)
    assert tuple(to_mhz(v) for v in minus.delta_m) == pytest.approx(expected[::-1], abs=0.02)


@given(st.floats(-20, 20).filter(lambda t: abs(t) > 0.05), st.floats(-3, 3),
       st.floats(-3, 3))
def test_roots_match_closed_form_and_self_consistency(t, dK1, dK2):
    shifts = (mhz(dK1), mhz(dK2))
    expected = {(s, j): closed_form_root(s * (1 if j == 0 else -1) * mhz(t), shifts[j])
                for s in (1, -1) for j in range(2)}
    if any(abs(v) >= 10 * abs(mhz(t)) for v in expected.values()):
        with pytest.raises(NoRootError):
            optimal_detunings(mhz(t), 0.0, shifts)
        return
    for br in optimal_detunings(mhz(t), 0.0, shifts):
        for j, (dm, dK) in enumerate(zip(br.delta_m, shifts)):
            target = (br.sign if j == 0 else -br.sign) * mhz(t)
            assert squeezed_frequency(dm, dK) == pytest.approx(target, rel=1e-9)
            assert br.residuals[j] < 1e-9
            assert abs(dm - expected[(br.sign, j)]) <= 1e-9 * abs(mhz(t))


def test_kerr_free_reduction_is_continuous():
    prev = None
    for dK in [1.0, 0.1, 1e-2, 1e-4, 1e-8]:
        plus, _ = optimal_detunings(mhz(10.0), 0.0, (mhz(dK), mhz(dK)))
        err = max(abs(plus.delta_m[0] - mhz(10.0)), abs(plus.delta_m[1] + mhz(10.0)))
        if prev is not None:
            assert err < prev
        prev = err
    assert prev < 1e-6 * mhz(10.0)


def test_resonance_needs_detuned_cavity():
    with pytest.raises(ModelDomainError):
        optimal_detunings(mhz(1.0), mhz(1.0), (mhz(1.0), mhz(1.0)))


@pytest.mark.parametrize("dF", [1.0, -1.0])
def test_prediction_power_local_grid(dF):
    plus, minus = optimal_detunings(mhz(10.0), mhz(dF), (mhz(1.0), mhz(1.0)))
    for br in (plus, minus):
        c1, c2 = (to_mhz(v) for v in br.delta_m)
        xs = np.linspace(-1.0, 1.0, 41)
        grid = np.array([[entanglement_of(baseline_params(delta_m=(c1 + a, c2 + b),
                                                          delta_F=dF))[0].log_negativity
                          or -1.0 for b in xs] for a in xs])
        i, j = np.unravel_index(np.argmax(grid), grid.shape)
        cell = xs[1] - xs[0]
        assert abs(xs[i]) <= cell + 1e-12 and abs(xs[j]) <= cell + 1e-12, \
            (br.sign, c1 + xs[i], c2 + xs[j])


@pytest.mark.parametrize("dK", [5e-324, -5e-324, 1e-310])
def test_subnormal_kerr_shift(dK):
    plus, _ = optimal_detunings(mhz(1.0), 0.0, (0.0, dK))
    assert plus.delta_m == (mhz(1.0), -mhz(1.0))
