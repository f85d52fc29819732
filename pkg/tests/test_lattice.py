from fractions import Fraction
from math import gcd

from hypothesis import given, settings, strategies as st

from kcut import lattice

small = st.integers(-6, 6)


def matrices(max_rows=4, max_cols=5):
    return st.integers(1, max_cols).flatmap(
        lambda k: st.lists(st.lists(small, min_size=k, max_size=k), min_size=0,
                           max_size=max_rows).map(lambda rows: (rows, k)))


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_kernel_is_a_saturated_basis(data):
    A, k = data
    K = lattice.integer_kernel(A, k)
    assert len(K) == k - lattice.rank(A)
    for x in K:
        assert all(sum(a * b for a, b in zip(row, x)) == 0 for row in A)
    if K:
        # saturated: the maximal minors of the basis are coprime
        assert lattice.maximal_minor_gcd(lattice.transpose(K), len(K)) == 1


@settings(max_examples=150, deadline=None)
@given(matrices(max_rows=3, max_cols=4), st.lists(small, min_size=3, max_size=3))
def test_membership_of_combinations(data, coeffs):
    B, k = data
    B = [row for row in B if any(row)]
    if not B:
        return
    v = [sum(c * row[j] for c, row in zip(coeffs, B)) for j in range(k)]
    assert lattice.in_lattice(v, B, k)


def test_membership_rejects_non_members():
    assert not lattice.in_lattice([1, 2], [[2, 4]], 2)
    assert not lattice.in_lattice([1, 0], [[2, 0], [0, 1]], 2)
    assert lattice.in_lattice([4, 1], [[2, 0], [0, 1]], 2)
    assert lattice.in_lattice([0, 0], [], 2)
    assert not lattice.in_lattice([0, 1], [], 2)


def test_determinant_and_minors():
    assert lattice.det([[2, 1], [1, 3]]) == 5
    assert lattice.det([[0, 1], [1, 0]]) == -1
    assert lattice.det([[1, 2], [2, 4]]) == 0
    assert lattice.det([]) == 1
    assert lattice.maximal_minor_gcd([[2], [4]], 1) == 2
    assert lattice.maximal_minor_gcd([[2, 0], [0, 3], [1, 1]], 2) == 1


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3))
def test_determinant_matches_fraction_elimination(M):
    # expand by cofactors as an independent oracle
    a = M
    cof = (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
           - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
           + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))
    assert lattice.det(M) == cof


def test_rank_is_exact():
    assert lattice.rank([[Fraction(1, 3), 1], [1, 3]]) == 1
    assert lattice.rank([[1, 0], [0, 1]]) == 2
    assert lattice.rank([]) == 0


def test_echelon_basis_and_span():
    assert lattice.echelon_basis(lattice.saturated_span([[2, 4]], 2), 2) == [[1, 2]]
    assert lattice.primitive([4, -6, 0]) == [2, -3, 0]
    assert lattice.primitive([0, 0]) == [0, 0]
    assert gcd(*lattice.saturated_span([[3, 6, 9]], 3)[0]) == 1
