"""Acceptance criteria 1-9.

Each test is named ``test_criterion_<k>_...``; the conftest hook prints one
pass/fail line per criterion at the end of the run.
"""

from fractions import Fraction
import itertools
import math
import time

import numpy as np
import pytest

from kcut.circle import (CutProblem, einstein_residual, make_chart, map_g, moment_map,
                         orbit_crossing, pullback_discrepancy, reduced_form, structure_constant,
                         v_eff)
from kcut.closed_forms import closed_form_fields, example_problem, fs_level_w2
from kcut.errors import NotSemistable
from kcut.hermitian import ddbar, form_distance, positivity_check
from kcut.potentials import flat, fubini_study
from kcut.radial import check_symplectic, make_radial
from kcut.toric import (PolyhedralSet, TorusCutProblem, enumerate_faces, face_of, isotropy,
                        kempf_ness_solve, smoothness_check)

QUAD = make_radial("quadratic")
LOG1 = make_radial("log_einstein", kappa=1.0)


def _fs_oracle(zeta):
    s = 1.0 + float(np.vdot(zeta, zeta).real)
    return (np.eye(len(zeta)) * s - np.outer(zeta.conj(), zeta)) / s ** 2


def _grid(n, extent=0.8, samples=5):
    offs = np.linspace(-extent, extent, samples)
    base = np.full(n, 0.1 + 0.05j)
    for x, y in itertools.product(offs, offs):
        z = base.copy()
        z[0] = complex(x, y)
        yield z


def _log_spaced_points(n, count, rng):
    radii = np.logspace(-1, 1, count)
    for r in radii:
        v = rng.normal(size=n) + 1j * rng.normal(size=n)
        yield r * v / np.linalg.norm(v)


def test_criterion_1_fubini_study_cut():
    start = time.perf_counter()
    worst = 0.0
    for lam, n in itertools.product((0.5, 1.0, 2.0), (1, 2)):
        p = example_problem("euclidean_cut", n, lam)
        chart = make_chart(p)
        for z in _grid(n):
            worst = max(worst, form_distance(reduced_form(p, chart, z), lam * _fs_oracle(z)))
    assert worst < 1e-5
    assert time.perf_counter() - start < 5.0


def test_criterion_2_blowup_metric():
    start = time.perf_counter()
    rng = np.random.default_rng(2)
    worst = 0.0
    for lam, n in itertools.product((-2.0, -1.0, 1.0), (1, 2)):
        p = example_problem("euclidean_blowup", n, lam)
        chart = make_chart(p)
        rho = closed_form_fields("euclidean_blowup", n, lam)["rho"]
        for z in _log_spaced_points(n, 8, rng):
            expected = ddbar(rho, z, 2e-3 * np.linalg.norm(z))
            worst = max(worst, form_distance(reduced_form(p, chart, z), expected))
    assert worst < 1e-5
    rho0 = closed_form_fields("euclidean_blowup", 2, 0.0)["rho"]
    z = np.array([0.6 + 0.8j, 0.0])
    assert float(rho0(z)) == 2.0
    chart0 = make_chart(example_problem("euclidean_blowup", 2, 0.0))
    assert float(chart0.reduced_potential()(z)) == pytest.approx(2.0, abs=1e-12)
    assert time.perf_counter() - start < 10.0


def test_criterion_3_v_eff_and_structure_constant():
    rng = np.random.default_rng(3)
    cases = [(lam, n) for lam in (-2.0, -1.0, 0.0, 1.0) for n in (1, 2)]
    checked = 0
    while checked < 20:
        lam, n = cases[checked % len(cases)]
        p = example_problem("euclidean_blowup", n, lam)
        z = 10 ** rng.uniform(-1, 1) * (rng.normal(size=n) + 1j * rng.normal(size=n))
        expected = 2 * math.pi * (lam * lam + 4 * float(np.vdot(z, z).real)) ** 0.25
        assert v_eff(p, make_chart(p), z) == pytest.approx(expected, rel=1e-6)
        checked += 1
    for n in (2, 3):
        p = example_problem("euclidean_blowup", n, -1.0)
        sample = rng.normal(size=(4, n + 1)) + 1j * rng.normal(size=(4, n + 1))
        assert abs(structure_constant(p, sample).c - (1 - n)) <= 1e-4


def test_criterion_4_einstein_identity():
    start = time.perf_counter()
    p = example_problem("euclidean_blowup", 2, -1.0)
    chart = make_chart(p)
    points = [[1.0, 0.0], [0.5, 0.3j], [0.2 - 0.4j, 0.7], [2.0j, 1.0], [0.3, -0.25]]
    assert max(einstein_residual(p, chart, z) for z in points) < 1e-4
    for lam in (-1.0, -0.5, 0.5):
        p = example_problem("fs_blowup", 2, lam)
        chart = make_chart(p)
        for z in ([0.5, 0.1j], [1.0, 0.0], [0.2 - 0.3j, 0.7], [1.5j, 0.4], [0.25, 0.05]):
            assert einstein_residual(p, chart, z) < 1e-4
    assert time.perf_counter() - start < 30.0


def _eq46_residual(n, lam, r, u):
    # ψ = −(n+1)|z|²/(1+|z|²) + 2|w|²/(1+|w|²) with |z|² = |ζ|²/|w|²
    t = r / u
    return -(n + 1) * t / (1 + t) + 2 * u / (1 + u) - lam


def test_criterion_5_fs_blowup_level_solve():
    rng = np.random.default_rng(5)
    for _ in range(50):
        n = int(rng.integers(1, 5))
        lam = float(rng.uniform(-n - 1 + 1e-3, 2 - 1e-3))
        zeta = 10 ** rng.uniform(-2, 1) * (rng.normal(size=n) + 1j * rng.normal(size=n))
        r = float(np.vdot(zeta, zeta).real)
        u = float(fs_level_w2(n, lam, r))
        assert abs(_eq46_residual(n, lam, r, u)) < 1e-10
        _, w = make_chart(example_problem("fs_blowup", n, lam)).level_point(zeta)
        assert abs(_eq46_residual(n, lam, r, abs(w) ** 2)) < 1e-10
    for n in (1, 2, 3, 4):
        lam = 1.0 - n
        for r in (1e-3, 0.2, 1.0, 7.0):
            lam_e, r_e = lam / (n + 1), 2 * r / (n + 1)
            u_e = (lam_e + math.sqrt(lam_e ** 2 + 4 * r_e)) / 2
            assert abs(float(fs_level_w2(n, lam, r)) - u_e) < 1e-10


def test_criterion_6_map_g_and_pullback():
    rng = np.random.default_rng(6)
    problems = [CutProblem(flat(2), (0, 1), 1.0, QUAD),
                CutProblem(fubini_study(2, 2.0), (1, 2), 1.5, LOG1),
                CutProblem(flat(3), (1, -1, 2), 0.5, QUAD)]
    checked = 0
    while checked < 200:
        p = problems[checked % len(problems)]
        q = 0.5 * (rng.normal(size=p.n) + 1j * rng.normal(size=p.n))
        phi = float(moment_map(p, q))
        if not p.level - p.profile.cap_a + 1e-6 < phi < p.level - 1e-6:
            continue
        a = map_g(p, q)
        b = map_g(p, q, path="orbit")
        assert np.max(np.abs(a - b)) < 1e-9
        checked += 1
    for p in problems[:2]:
        chart = make_chart(p)
        for dx, dy in itertools.product((-0.1, 0.0, 0.1), repeat=2):
            q = np.array([0.3 + complex(dx, dy), 0.2j])
            assert pullback_discrepancy(p, chart, q) < 1e-5


def test_criterion_7_symplectic_dichotomy():
    family = [QUAD, LOG1, make_radial("log_einstein", kappa=0.3),
              make_radial("custom", coeffs=[0.0, 1.0, -0.1], t_max=10.0)]
    ts = np.linspace(0.01, 6.0, 25)
    # keep clear of the exact sign change of H' = 1 − 0.4t
    assert np.min(np.abs(ts - 2.5)) > 1e-3
    matched = 0
    saw_negative = False
    for F in family:
        for t in ts:
            w = np.array([math.sqrt(t)])
            symp = check_symplectic(F, [t]).symplectic
            form = ddbar(lambda Z, F=F: F.F(np.abs(Z[..., 0]) ** 2), w)
            verdict = positivity_check(form) == "positive"
            assert symp == verdict
            saw_negative |= not symp
            matched += 1
    assert matched == 100 and saw_negative


SIMPLEX = PolyhedralSet(2, [([1, 0], 0), ([0, 1], 0), ([-1, -1], -1)])
SQUARE = PolyhedralSet(2, [([1, 0], 0), ([0, 1], 0), ([-1, 0], -1), ([0, -1], -1)])
HALF_LINE = PolyhedralSet(1, [([1], 0)])


def test_criterion_8_toric_stratification():
    start = time.perf_counter()
    rng = np.random.default_rng(8)
    for delta, count in ((SIMPLEX, 7), (HALF_LINE, 2), (SQUARE, 9)):
        faces = enumerate_faces(delta)
        assert len(faces) == count
        actives = [f.active for f in faces]
        assert len(set(actives)) == len(actives)
        for f in faces:
            assert face_of(delta, f.witness).active == f.active
        verts = [f.witness for f in faces if f.dim == 0]
        for _ in range(350):
            wts = [Fraction(int(rng.integers(0, 3))) for _ in verts]
            if sum(wts) == 0:
                wts[0] = Fraction(1)
            eta = [sum(a * v[i] for a, v in zip(wts, verts)) / sum(wts) for i in range(delta.k)]
            assert face_of(delta, eta).active in actives
        for E, E2 in itertools.product(faces, repeat=2):
            if set(E2.active) <= set(E.active):
                assert isotropy(delta, E2).sublattice_of(isotropy(delta, E))
    line = TorusCutProblem(flat(1), [[1]], [QUAD], [1.0], delta=HALF_LINE)
    assert smoothness_check(line, [0.0]).kind == "continuous"
    assert smoothness_check(line, [0.5])
    orbi = TorusCutProblem(flat(1), [[2]], [QUAD], [1.0],
                           delta=PolyhedralSet(1, [([-1], Fraction(-1, 2))]))
    verdict = smoothness_check(orbi, [0.5])
    assert verdict.kind == "finite" and verdict.order == 2
    radials = [QUAD, LOG1, make_radial("log_einstein", kappa=0.5)]
    agreed = 0
    while agreed < 100:
        n = int(rng.integers(1, 4))
        weights = [int(w) for w in rng.integers(-2, 3, size=n)]
        pot = flat(n) if rng.random() < 0.5 else fubini_study(n, 1 + 2 * rng.random())
        radial = radials[int(rng.integers(3))]
        level = float(rng.normal())
        m = rng.normal(size=n) + 1j * rng.normal(size=n)
        try:
            t1 = orbit_crossing(CutProblem(pot, tuple(weights), level, radial), m)
        except NotSemistable:
            continue
        out = kempf_ness_solve(TorusCutProblem(pot, [weights], [radial], [level]), m, [1.0])
        assert out.status == "stable" and abs(out.t[0] - t1) < 1e-9
        agreed += 1
    assert time.perf_counter() - start < 5.0


def test_criterion_9_moment_cap_consistency():
    # FS on ℂ with weight 1 and log_einstein κ=1 (cap a = 2): along an orbit φ
    # sweeps (0, 1) and H sweeps (0, 2); at the fixed point m = 0, φ ≡ 0
    def bracket(lam, phi_range):
        lo, hi = phi_range
        return lo < lam and lam - 2.0 < hi

    cases = [("inside range", 1.5, [0.5], (0.0, 1.0)),
             ("above cap", 3.5, [0.5], (0.0, 1.0)),
             ("at fixed point", 2.5, [0.0], (0.0, 0.0))]
    for _, lam, m, phi_range in cases:
        p = CutProblem(fubini_study(1, 1.0), (1,), lam, LOG1)
        expected = bracket(lam, phi_range)
        try:
            orbit_crossing(p, m)
            got = True
        except NotSemistable:
            got = False
        assert got == expected
    assert [bracket(lam, r) for _, lam, _, r in cases] == [True, False, False]
