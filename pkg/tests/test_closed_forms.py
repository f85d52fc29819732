import math

import numpy as np
import pytest

from kcut.circle import ambient_moment, make_chart, reduced_form
from kcut.closed_forms import (closed_form_example, closed_form_fields, example_problem,
                               fs_level_w2)
from kcut.errors import DomainViolation, InvalidLevel, InvalidParameter
from kcut.hermitian import form_distance


def fs_level_residual(n, lam, r, u):
    # ψ = −(n+1)|z|²/(1+|z|²) + 2|w|²/(1+|w|²) with |z|² = r/|w|²
    t = r / u
    return -(n + 1) * t / (1 + t) + 2 * u / (1 + u) - lam


def test_euclidean_blowup_v_eff():
    cf = closed_form_example("euclidean_blowup", {"n": 1, "lam": 0.0}, [0.5])
    assert cf.v_eff == pytest.approx(2 * math.pi, rel=1e-15)
    assert cf.singular and cf.c == 0.0


def test_fs_blowup_level_value():
    cf = closed_form_example("fs_blowup", {"n": 2, "lam": 0.0}, [1.0, 0.0])
    assert cf.w2 == pytest.approx(1.5, rel=1e-14)
    # |z|² = 1/1.5 and ψ = −1.2 + 1.2
    assert fs_level_residual(2, 0.0, 1.0, cf.w2) == pytest.approx(0.0, abs=1e-14)
    assert cf.rho is None and cf.v_eff is None and cf.c == -1.0


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_fs_blowup_reduces_to_euclidean(n):
    lam = 1.0 - n
    for r in (1e-3, 0.2, 1.0, 7.0):
        # rescaling ζ and λ by the Fubini–Study factor n + 1 gives the flat solution
        lam_e = lam / (n + 1)
        r_e = 2 * r / (n + 1)
        u_e = (lam_e + math.sqrt(lam_e ** 2 + 4 * r_e)) / 2
        assert float(fs_level_w2(n, lam, r)) == pytest.approx(u_e, rel=1e-12)


def test_stable_branch_for_negative_a():
    n, lam = 3, -3.5
    for r in (1e-8, 1e-4, 0.3):
        u = float(fs_level_w2(n, lam, r))
        assert abs(fs_level_residual(n, lam, r, u)) < 1e-12


def test_ranges_and_domains():
    with pytest.raises(InvalidLevel):
        closed_form_example("fs_blowup", {"n": 2, "lam": 2.0}, [1.0, 0.0])
    with pytest.raises(InvalidLevel):
        closed_form_example("fs_blowup", {"n": 2, "lam": -3.0}, [1.0, 0.0])
    with pytest.raises(InvalidLevel):
        closed_form_example("euclidean_cut", {"n": 1, "lam": 0.0}, [1.0])
    with pytest.raises(DomainViolation):
        closed_form_example("euclidean_blowup", {"n": 2, "lam": -1.0}, [0.0, 0.0])
    with pytest.raises(InvalidParameter):
        closed_form_example("hopf", {"n": 1, "lam": 1.0}, [1.0])
    # λ > 0: the plain cut contains ζ = 0
    assert closed_form_example("euclidean_blowup", {"n": 1, "lam": 1.0}, [0.0]).w2 == 1.0


def test_singular_cone_potential_is_exact():
    rho = closed_form_fields("euclidean_blowup", 2, 0.0)["rho"]
    zeta = np.array([0.3 + 0.4j, 1.2])
    assert float(rho(zeta)) == 2 * np.linalg.norm(zeta)


def test_blowup_potential_up_to_a_constant():
    # numerical reduced potential agrees with S − λ log(λ + S) up to λ log 2
    lam = -1.3
    p = example_problem("euclidean_blowup", 2, lam)
    rho_num = make_chart(p).reduced_potential()
    rho_cf = closed_form_fields("euclidean_blowup", 2, lam)["rho"]
    Z = np.array([[0.2, 0.1j], [1.0, 0.0], [3.0, -2j]])
    diff = rho_num(Z) - rho_cf(Z)
    np.testing.assert_allclose(diff, lam * math.log(2), atol=1e-12)


def test_euclidean_cut_closed_form_matches_numeric():
    p = example_problem("euclidean_cut", 2, 2.0)
    chart = make_chart(p)
    zeta = np.array([0.7, -0.2 + 0.3j])
    cf = closed_form_example("euclidean_cut", {"n": 2, "lam": 2.0}, zeta)
    assert form_distance(cf.omega, reduced_form(p, chart, zeta)) < 1e-8
    z, w = chart.level_point(zeta)
    assert abs(w) ** 2 == pytest.approx(cf.w2, rel=1e-12)
    assert ambient_moment(p, z, w) == pytest.approx(2.0, abs=1e-12)
