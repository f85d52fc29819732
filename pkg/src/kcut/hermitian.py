"""Finite-difference complex calculus on coordinate charts.

Potentials are evaluated on whole batches of points at once: a field maps a
complex array of shape ``(..., n)`` to a real array of shape ``(...)``.  The
complex Hessian ``∂²f/∂z_j∂z̄_k`` is assembled from the real Hessian in the
coordinates ``(x_1..x_n, y_1..y_n)``::

    ∂_j ∂̄_k f = ¼ [(f_{x_j x_k} + f_{y_j y_k}) + i (f_{x_j y_k} − f_{y_j x_k})]

with central differences at steps ``h, h/2 (, h/4)`` combined by Richardson
extrapolation.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainViolation, MalformedForm, NotKahlerHere, NumericFailure

#: default step is ``STEP_SCALE * (1 + |z|)``
STEP_SCALE = 2e-3
#: inner step of the nested Ricci stencil, relative to ``1 + |z|``
RICCI_STEP_SCALE = 5e-3
#: ratio of the outer to the inner step in the nested Ricci stencil
RICCI_OUTER_FACTOR = 10.0

HERMITIAN_RTOL = 1e-10
POSITIVITY_RTOL = 1e-10


class PotentialField:
    """Real scalar field on a chart of ℂⁿ, vectorized over points.

    Parameters
    ----------
    func : callable
        Maps a complex array ``(..., n)`` to a real array ``(...)``.
    domain : callable, optional
        Maps a complex array ``(..., n)`` to a boolean array telling which
        points are evaluable.  Defaults to "everywhere".
    n : int, optional
        Chart dimension, used for validation only.
    """

    def __init__(self, func, domain=None, n=None, name=None):
        self.func = func
        self.domain = domain
        self.n = n
        self.name = name or getattr(func, "__name__", "field")

    def __call__(self, Z):
        return np.asarray(self.func(np.asarray(Z, dtype=complex)), dtype=float)

    def evaluable(self, Z):
        Z = np.asarray(Z, dtype=complex)
        if self.domain is None:
            return np.ones(Z.shape[:-1], dtype=bool)
        return np.asarray(self.domain(Z), dtype=bool)

    def __add__(self, other):
        return linear_combination([(1.0, self), (1.0, other)])

    def __repr__(self):
        return f"PotentialField({self.name})"


def as_field(f):
    if isinstance(f, PotentialField):
        return f
    if callable(f):
        return PotentialField(f)
    raise TypeError(f"expected a PotentialField or callable, got {type(f).__name__}")


def linear_combination(terms):
    """Field ``Σ c_i f_i`` for ``terms = [(c_i, f_i), ...]``."""
    terms = [(float(c), as_field(f)) for c, f in terms]

    def func(Z):
        return sum(c * f(Z) for c, f in terms)

    def domain(Z):
        ok = np.ones(np.shape(Z)[:-1], dtype=bool)
        for _, f in terms:
            ok &= f.evaluable(Z)
        return ok

    return PotentialField(func, domain, name="linear_combination")


def as_point(z):
    """Coerce to a 1-D complex coordinate vector with finite entries."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.ndim != 1 or z.size < 1:
        raise DimensionError(f"a point needs shape (n,), got {z.shape}")
    if not np.all(np.isfinite(z)):
        raise NumericFailure("point has non-finite coordinates")
    return z


@dataclass(frozen=True, eq=False)
class OneOneForm:
    """Coefficients ``a_{jk̄}`` of the real (1,1)-form ``i Σ a_{jk̄} dz_j ∧ dz̄_k``."""

    coeffs: np.ndarray

    @property
    def n(self):
        return self.coeffs.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coeffs, dtype=dtype)

    def __add__(self, other):
        return OneOneForm(self.coeffs + _coeffs(other))

    def __sub__(self, other):
        return OneOneForm(self.coeffs - _coeffs(other))

    def __mul__(self, scalar):
        return OneOneForm(self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return OneOneForm(-self.coeffs)

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.coeffs)

    def real_form(self):
        return real_two_form(self.coeffs)


def _coeffs(a):
    return np.asarray(a.coeffs if isinstance(a, OneOneForm) else a, dtype=complex)


def default_step(z, scale=STEP_SCALE):
    return scale * (1.0 + float(np.linalg.norm(z)))


def _unit_stencil(n):
    """Real-direction stencil offsets (unit step) as complex displacements.

    Layout: centre, then ``+e_a, -e_a`` for each real direction ``a``, then
    ``++, +-, -+, --`` for each pair ``a < b``.
    """
    d = 2 * n
    dirs = np.zeros((d, n), dtype=complex)
    for a in range(n):
        dirs[a, a] = 1.0
        dirs[n + a, a] = 1j
    offs = [np.zeros(n, dtype=complex)]
    for a in range(d):
        offs.append(dirs[a])
        offs.append(-dirs[a])
    for a in range(d):
        for b in range(a + 1, d):
            offs.extend([dirs[a] + dirs[b], dirs[a] - dirs[b],
                         -dirs[a] + dirs[b], -dirs[a] - dirs[b]])
    return np.array(offs)


_STENCILS = {}


def _stencil(n):
    if n not in _STENCILS:
        _STENCILS[n] = _unit_stencil(n)
    return _STENCILS[n]


def _real_hessian(vals, h, d):
    """Central-difference real Hessian from stencil values ``(P, S)``, steps ``(P,)``."""
    f0 = vals[:, 0]
    h2 = h * h
    H = np.empty((vals.shape[0], d, d))
    for a in range(d):
        H[:, a, a] = (vals[:, 1 + 2 * a] - 2.0 * f0 + vals[:, 2 + 2 * a]) / h2
    k = 1 + 2 * d
    for a in range(d):
        for b in range(a + 1, d):
            fpp, fpm, fmp, fmm = (vals[:, k + i] for i in range(4))
            H[:, a, b] = H[:, b, a] = (fpp - fpm - fmp + fmm) / (4.0 * h2)
            k += 4
    return H


def _richardson(levels):
    if len(levels) == 1:
        return levels[0]
    if len(levels) == 2:
        return levels[1] + (levels[1] - levels[0]) / 3.0
    r1 = levels[1] + (levels[1] - levels[0]) / 3.0
    r2 = levels[2] + (levels[2] - levels[1]) / 3.0
    return r2 + (r2 - r1) / 15.0


def _complex_from_real(H, n):
    Hxx = H[..., :n, :n]
    Hyy = H[..., n:, n:]
    Hxy = H[..., :n, n:]
    Hyx = H[..., n:, :n]
    A = 0.25 * ((Hxx + Hyy) + 1j * (Hxy - Hyx))
    return 0.5 * (A + np.conj(np.swapaxes(A, -1, -2)))


def ddbar_batch(f, Z, h, *, levels=2, operation="ddbar"):
    """Complex Hessians of ``f`` at every point of ``Z`` (shape ``(P, n)``).

    ``h`` is a scalar or a length-``P`` array of base steps.  Returns an array
    of shape ``(P, n, n)``.
    """
    f = as_field(f)
    Z = np.asarray(Z, dtype=complex)
    P, n = Z.shape
    d = 2 * n
    unit = _stencil(n)
    h = np.broadcast_to(np.asarray(h, dtype=float), (P,))
    if np.any(~(h > 0)):
        raise DomainViolation("finite-difference step must be positive", operation=operation)
    steps = [h / 2.0 ** l for l in range(levels)]
    pts = np.concatenate([Z[:, None, :] + s[:, None, None] * unit[None, :, :] for s in steps],
                         axis=1)
    flat = pts.reshape(-1, n)
    if not np.all(f.evaluable(flat)):
        raise DomainViolation("finite-difference stencil leaves the domain", operation=operation)
    with np.errstate(all="ignore"):
        vals = f(flat).reshape(P, len(steps) * unit.shape[0])
    if not np.all(np.isfinite(vals)):
        raise NumericFailure("non-finite potential value on the stencil", operation=operation)
    S = unit.shape[0]
    Hs = [_real_hessian(vals[:, l * S:(l + 1) * S], steps[l], d) for l in range(levels)]
    return _complex_from_real(_richardson(Hs), n)


def ddbar(f, z, h=None, *, levels=2):
    """Coefficient matrix of ``∂∂̄f`` at ``z``."""
    z = as_point(z)
    if h is None:
        h = default_step(z)
    return OneOneForm(ddbar_batch(f, z[None, :], h, levels=levels)[0])


def logdet_field(f, h, *, levels=2):
    """The field ``p ↦ log det(∂∂̄f(p))`` with a fixed inner step ``h``."""
    f = as_field(f)

    def func(Z):
        Z = np.asarray(Z, dtype=complex)
        shape = Z.shape[:-1]
        G = ddbar_batch(f, Z.reshape(-1, Z.shape[-1]), h, levels=levels,
                        operation="ricci_form")
        eig = np.linalg.eigvalsh(G)
        if np.any(eig[..., 0] <= POSITIVITY_RTOL * np.max(np.abs(G), axis=(-1, -2))):
            raise NotKahlerHere("metric is not positive definite on the Ricci stencil",
                                operation="ricci_form")
        return np.sum(np.log(eig), axis=-1).reshape(shape)

    return PotentialField(func, f.domain, name=f"logdet({f.name})")


def ricci_form(f, z, h=None, *, outer_factor=RICCI_OUTER_FACTOR, levels=2, outer_levels=3):
    """Ricci form ``-∂∂̄ log det g`` of the Kähler metric ``g = ∂∂̄f``.

    Nested finite differences: the inner Hessian uses step ``h`` and the
    outer one ``outer_factor * h``.
    """
    z = as_point(z)
    if h is None:
        h = default_step(z, RICCI_STEP_SCALE)
    ld = logdet_field(f, h, levels=levels)
    return -ddbar(ld, z, outer_factor * h, levels=outer_levels)


def positivity_check(a):
    """Classify a Hermitian form as ``positive``, ``semidefinite`` or ``indefinite``."""
    A = _coeffs(a)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise MalformedForm(f"expected a square matrix, got shape {A.shape}",
                            operation="positivity_check")
    scale = float(np.max(np.abs(A))) if A.size else 0.0
    if np.max(np.abs(A - A.conj().T), initial=0.0) > HERMITIAN_RTOL * scale:
        raise MalformedForm("coefficient matrix is not Hermitian", operation="positivity_check")
    if scale == 0.0:
        return "semidefinite"
    lo = float(np.linalg.eigvalsh(A)[0])
    if lo > POSITIVITY_RTOL * scale:
        return "positive"
    if lo >= -POSITIVITY_RTOL * scale:
        return "semidefinite"
    return "indefinite"


def form_distance(a, b):
    """Max-abs entrywise difference of two coefficient matrices."""
    A, B = _coeffs(a), _coeffs(b)
    if A.shape != B.shape:
        raise DimensionError(f"cannot compare forms of shape {A.shape} and {B.shape}",
                             operation="form_distance")
    return float(np.max(np.abs(A - B), initial=0.0))


def real_two_form(A):
    """Antisymmetric real matrix of ``i Σ a_{jk̄} dz_j ∧ dz̄_k`` in ``(x, y)`` order.

    ``ω(u, v) = -2 Im(Uᵀ A V̄)`` with ``U_j = dz_j(u)``.
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[-1]
    E = np.concatenate([np.eye(n), 1j * np.eye(n)]).astype(complex)
    return -2.0 * np.imag(E @ A @ E.conj().T)
