import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kcut.errors import InconsistentDerivatives, InvalidParameter, OutOfRange
from kcut.radial import check_symplectic, invert_moment, make_radial, moment_profile


def test_quadratic_profile_is_identity():
    mp = moment_profile(make_radial("quadratic"))
    assert mp.cap_a == math.inf
    assert invert_moment(mp, 0.25) == pytest.approx(0.25, abs=1e-14)
    assert float(mp.H1(3.0)) == 1.0


def test_log_einstein_cap_and_inverse():
    mp = moment_profile(make_radial("log_einstein", kappa=1.0))
    assert mp.cap_a == 2.0
    # H(1) = 2·1/(1+1) = 1
    assert invert_moment(mp, 1.0) == pytest.approx(1.0, abs=1e-12)
    # H = 2t/(κ(1+t)) inverts to t = κs/(2 − κs)
    mp3 = moment_profile(make_radial("log_einstein", kappa=3.0))
    s = 0.5
    assert invert_moment(mp3, s) == pytest.approx(3 * s / (2 - 3 * s), rel=1e-12)


def test_config_mapping_form():
    p = make_radial({"kind": "log_einstein", "kappa": 2})
    assert p.params == {"kappa": 2.0}
    assert p.to_dict() == {"kind": "log_einstein", "kappa": 2.0}


def test_custom_polynomial_and_estimated_cap():
    p = make_radial("custom", coeffs=[0.0, 1.0, -0.1], t_max=1.0)
    assert float(p.F1(1.0)) == pytest.approx(0.8)
    mp = moment_profile(p)
    assert mp.cap_estimated
    assert mp.cap_a == pytest.approx(0.8)


def test_custom_tail_warning():
    with pytest.warns(RuntimeWarning, match="not increasing"):
        mp = moment_profile(make_radial("custom", coeffs=[0.0, 1.0, -0.1], t_max=5.0))
    assert not mp.tail_monotone


def test_inconsistent_derivatives_are_caught():
    with pytest.raises(InconsistentDerivatives):
        make_radial("custom", coeffs=[0.0, 1.0], t_max=2.0, F1=lambda t: 2.0 + 0 * t)


@pytest.mark.parametrize("kind, params", [
    ("quadratic", {"scale": 0.0}),
    ("log_einstein", {"kappa": -1.0}),
    ("log_einstein", {}),
    ("custom", {"coeffs": [1.0], "t_max": -1.0}),
    ("hyperbolic", {}),
])
def test_invalid_parameters(kind, params):
    with pytest.raises(InvalidParameter):
        make_radial(kind, **params)


def test_out_of_range_targets():
    mp = moment_profile(make_radial("log_einstein", kappa=1.0))
    with pytest.raises(OutOfRange):
        invert_moment(mp, 2.0)
    with pytest.raises(OutOfRange):
        invert_moment(mp, -0.1)


def test_estimated_cap_bounds_the_inverse():
    # H(t) = t − 0.1t² on [0, 4]: cap estimate H(4) = 2.4
    mp = moment_profile(make_radial("custom", coeffs=[0.0, 1.0, -0.05], t_max=4.0))
    assert mp.cap_a == pytest.approx(2.4)
    assert invert_moment(mp, 2.0) == pytest.approx(5.0 - math.sqrt(5.0), rel=1e-12)
    with pytest.raises(OutOfRange):
        invert_moment(mp, 2.4)


def test_symplectic_verdicts():
    assert check_symplectic(make_radial("quadratic"), np.linspace(0, 10, 11))
    v = check_symplectic(make_radial("custom", coeffs=[0.0, 1.0, -0.1], t_max=10.0),
                         np.linspace(0, 10, 11))
    # H'(t) = 1 − 0.4t fails first at t = 3 on the integer grid
    assert not v and v.failing_t == 3.0


@settings(max_examples=80, deadline=None)
@given(st.floats(0.05, 4.0), st.floats(0.0, 0.999))
def test_inverse_round_trip(kappa, frac):
    mp = moment_profile(make_radial("log_einstein", kappa=kappa))
    s = frac * mp.cap_a
    t = invert_moment(mp, s)
    assert abs(float(mp.H(t)) - s) < 1e-12 * max(1.0, s) * 10
