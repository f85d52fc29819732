"""Exact integer linear algebra for small matrices.

Matrices are lists of rows of Python ints (or anything ``int()`` accepts
losslessly).  Everything here is exact; no floating tolerance enters a rank,
kernel or index.
"""

from fractions import Fraction
from itertools import combinations
from math import gcd


def as_int_matrix(A, ncols=None):
    rows = [[int(x) for x in row] for row in A]
    for row, orig in zip(rows, A):
        if any(int(x) != x for x in orig):
            raise ValueError("matrix entries must be integers")
    if ncols is not None and any(len(r) != ncols for r in rows):
        raise ValueError(f"rows must have length {ncols}")
    return rows


def primitive(v):
    """``v / gcd(v)``; the zero vector is returned unchanged."""
    v = [int(x) for x in v]
    g = 0
    for x in v:
        g = gcd(g, x)
    return list(v) if g == 0 else [x // g for x in v]


def _ext_gcd(a, b):
    """``(g, x, y)`` with ``a x + b y = g = gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def column_echelon(A, k):
    """Unimodular column reduction ``A U = L`` with ``L`` in column echelon form.

    Returns ``L, U, pivots`` where ``pivots`` lists ``(row, col)`` of the
    leading entries; columns of ``U`` past the last pivot span the integer
    kernel of ``A``.
    """
    L = [list(r) for r in A]
    U = [[int(i == j) for j in range(k)] for i in range(k)]
    pivots = []
    p = 0
    for i, row in enumerate(L):
        if p >= k:
            break
        for j in range(p + 1, k):
            b = L[i][j]
            if b == 0:
                continue
            a = L[i][p]
            g, x, y = _ext_gcd(a, b)
            s, t = -b // g, a // g
            for M in (L, U):
                for r in M:
                    cp, cj = r[p], r[j]
                    r[p], r[j] = x * cp + y * cj, s * cp + t * cj
        if L[i][p] != 0:
            pivots.append((i, p))
            p += 1
    return L, U, pivots


def integer_kernel(A, k):
    """Rows spanning the lattice ``{x ∈ ℤᵏ : A x = 0}`` (a saturated basis)."""
    A = as_int_matrix(A, k)
    _, U, pivots = column_echelon(A, k)
    r = len(pivots)
    return [[U[i][j] for i in range(k)] for j in range(r, k)]


def rank(A):
    """Exact rank over ℚ."""
    M = [[Fraction(x) for x in row] for row in A]
    if not M:
        return 0
    rk, ncols = 0, len(M[0])
    for c in range(ncols):
        piv = next((r for r in range(rk, len(M)) if M[r][c] != 0), None)
        if piv is None:
            continue
        M[rk], M[piv] = M[piv], M[rk]
        for r in range(len(M)):
            if r != rk and M[r][c] != 0:
                f = M[r][c] / M[rk][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[rk])]
        rk += 1
    return rk


def saturated_span(B, k):
    """Integer points of the real span of the rows of ``B``."""
    return integer_kernel(integer_kernel(B, k), k)


def in_lattice(v, B, k):
    """Whether ``v`` is an integer combination of the rows of ``B``."""
    v = [int(x) for x in v]
    if not B:
        return all(x == 0 for x in v)
    cols = [list(r) for r in zip(*B)]          # k × r, columns are generators
    L, _, pivots = column_echelon(cols, len(B))
    coeffs = [0] * len(B)
    for i, p in pivots:
        acc = v[i] - sum(L[i][q] * coeffs[q] for q in range(p))
        if acc % L[i][p]:
            return False
        coeffs[p] = acc // L[i][p]
    return all(sum(L[i][q] * coeffs[q] for q in range(len(B))) == v[i] for i in range(k))


def det(M):
    """Exact determinant of a square integer matrix (Bareiss)."""
    M = [list(r) for r in M]
    n = len(M)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for c in range(n - 1):
        if M[c][c] == 0:
            swap = next((r for r in range(c + 1, n) if M[r][c] != 0), None)
            if swap is None:
                return 0
            M[c], M[swap] = M[swap], M[c]
            sign = -sign
        for r in range(c + 1, n):
            for j in range(c + 1, n):
                M[r][j] = (M[r][j] * M[c][c] - M[r][c] * M[c][j]) // prev
        prev = M[c][c]
    return sign * M[n - 1][n - 1]


def maximal_minor_gcd(C, r):
    """gcd of all ``r × r`` minors of ``C`` (rows choose r, all ``r`` columns)."""
    g = 0
    for rows in combinations(range(len(C)), r):
        g = gcd(g, det([C[i] for i in rows]))
        if g == 1:
            break
    return g


def matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def transpose(A, ncols=None):
    if not A:
        return [[] for _ in range(ncols or 0)]
    return [list(c) for c in zip(*A)]


def echelon_basis(B, k):
    """A canonical-ish basis of the lattice spanned by the rows of ``B``.

    Generators are brought to echelon form by unimodular operations and each
    leading entry is made positive.
    """
    if not B:
        return []
    L, _, pivots = column_echelon(transpose(B), len(B))
    out = []
    for i, p in pivots:
        col = [L[r][p] for r in range(k)]
        out.append([-x for x in col] if col[i] < 0 else col)
    return out
