import math

import numpy as np
from hypothesis import given, settings, strategies as st

from kcut.roots import bracket_increasing, find_increasing_root, solve_increasing


def test_cubic_root_with_newton():
    x, ok = find_increasing_root(lambda x: x ** 3 + x - 2.0, 0.0, fprime=lambda x: 3 * x ** 2 + 1)
    assert ok and abs(x - 1.0) < 1e-14


def test_secant_fallback_without_derivative():
    x, ok = find_increasing_root(lambda x: np.tanh(x) - 0.5, 3.0)
    assert ok and abs(x - math.atanh(0.5)) < 1e-12


def test_vectorized_targets():
    targets = np.array([-3.0, 0.0, 0.25, 7.0])
    x, ok = find_increasing_root(lambda x: np.exp(x) - np.exp(targets), np.zeros(4),
                                 fprime=np.exp)
    assert ok.all()
    np.testing.assert_allclose(x, targets, atol=1e-13)


def test_unbracketable_entries_are_flagged():
    # tanh never reaches 2: the first entry has no root
    x, ok = find_increasing_root(lambda x: np.tanh(x) - np.array([2.0, 0.0]), np.zeros(2),
                                 lower=-50, upper=50)
    assert not ok[0] and np.isnan(x[0])
    assert ok[1] and abs(x[1]) < 1e-15


def test_bracket_respects_bounds():
    lo, hi, flo, fhi, ok = bracket_increasing(lambda x: x - 100.0, 0.0, upper=10.0)
    assert not ok and hi == 10.0


def test_solve_reports_convergence():
    x, conv = solve_increasing(lambda x: x - 0.3, 0.0, 1.0)
    assert conv and abs(x - 0.3) < 1e-15


@settings(max_examples=60, deadline=None)
@given(st.floats(-30, 30), st.floats(0.1, 5.0))
def test_linear_roots_anywhere(root, slope):
    x, ok = find_increasing_root(lambda x: slope * (x - root), 0.0, fprime=lambda x: slope + 0 * x)
    assert ok
    assert abs(x - root) <= 1e-12 * (1 + abs(root))
