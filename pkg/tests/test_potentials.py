import numpy as np
import pytest

from kcut.errors import InvalidParameter
from kcut.hermitian import ddbar, form_distance
from kcut.potentials import flat, fubini_study, make_potential, separable
from kcut.radial import make_radial


@pytest.mark.parametrize("pot", [flat(2, 1.5), fubini_study(2, 3.0),
                                 separable([make_radial("log_einstein", kappa=1.0),
                                            make_radial("quadratic")])])
def test_analytic_metric_matches_ddbar(pot):
    z = np.array([0.4 - 0.1j, 0.3 + 0.6j])
    assert form_distance(pot.metric(z), ddbar(pot.field(), z)) < 1e-9


def test_finite_difference_hessian_fallback():
    fs = fubini_study(2, 2.0)
    bare = type(fs)(2, fs.value, fs.grad, None, "fs-no-hessian")
    t = np.array([0.3, 0.7])
    np.testing.assert_allclose(bare.t_hessian(t), fs.t_hessian(t), atol=1e-8)


def test_make_potential():
    assert make_potential({"kind": "flat", "n": 3}).n == 3
    assert make_potential({"kind": "fubini_study", "n": 2, "scale": 3}).params == {"scale": 3.0}
    sep = make_potential({"kind": "separable", "radials": [{"kind": "quadratic"}]})
    assert sep.n == 1
    for bad in ({"kind": "flat"}, {"kind": "flat", "n": 0}, {"kind": "torus", "n": 1},
                {"kind": "flat", "n": 1, "scale": -1}):
        with pytest.raises(InvalidParameter):
            make_potential(bad)
