"""Toric Kähler potentials ``ρ(t_1, ..., t_n)`` with ``t_j = |z_j|²``.

The Kähler metric of ``i∂∂̄ρ`` is ``g_{jk̄} = δ_{jk} ρ_j + z̄_j z_k ρ_{jk}`` where
subscripts on ρ denote partial derivatives in the ``t`` variables.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameter
from .hermitian import PotentialField
from .radial import make_radial


@dataclass(frozen=True)
class ToricPotential:
    """A potential on ℂⁿ depending only on the moduli ``t_j = |z_j|²``.

    ``value``, ``grad`` and ``hess`` map ``t`` of shape ``(..., n)`` to arrays
    of shape ``(...)``, ``(..., n)`` and ``(..., n, n)``.  ``hess`` may be None,
    in which case it is approximated by central differences of ``grad``.
    """

    n: int
    value: object = field(repr=False, compare=False)
    grad: object = field(repr=False, compare=False)
    hess: object = field(default=None, repr=False, compare=False)
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def t_hessian(self, t):
        t = np.asarray(t, dtype=float)
        if self.hess is not None:
            return np.asarray(self.hess(t), dtype=float)
        out = np.empty(t.shape + (self.n,))
        for k in range(self.n):
            h = 1e-5 * (1.0 + np.abs(t[..., k]))
            tp, tm = t.copy(), t.copy()
            tp[..., k] += h
            tm[..., k] -= h
            out[..., :, k] = (self.grad(tp) - self.grad(tm)) / (2 * h[..., None])
        return 0.5 * (out + np.swapaxes(out, -1, -2))

    def field(self):
        """The potential as a function of the complex coordinates."""
        def func(Z):
            return self.value(np.abs(Z) ** 2)

        return PotentialField(func, n=self.n, name=self.name)

    def metric(self, z):
        """Analytic metric coefficients ``g_{jk̄}`` at points ``z`` ``(..., n)``."""
        z = np.asarray(z, dtype=complex)
        t = np.abs(z) ** 2
        g1 = self.grad(t)
        g2 = self.t_hessian(t)
        eye = np.eye(self.n)
        return g1[..., :, None] * eye + np.conj(z)[..., :, None] * z[..., None, :] * g2

    def to_dict(self):
        return {"kind": self.name, "n": self.n, **self.params}


def flat(n, scale=1.0):
    """``ρ = scale · Σ t_j``, the Euclidean potential."""
    if not scale > 0:
        raise InvalidParameter("flat potential needs scale > 0")

    def value(t):
        return scale * np.sum(t, axis=-1)

    def grad(t):
        return np.full(np.shape(t), scale, dtype=float)

    def hess(t):
        return np.zeros(np.shape(t) + (n,))

    return ToricPotential(n, value, grad, hess, "flat", {"scale": float(scale)})


def fubini_study(n, scale=1.0):
    """``ρ = scale · log(1 + Σ t_j)``: ``scale`` times Fubini–Study on an affine chart."""
    if not scale > 0:
        raise InvalidParameter("Fubini-Study potential needs scale > 0")

    def value(t):
        return scale * np.log1p(np.sum(t, axis=-1))

    def grad(t):
        r = np.sum(t, axis=-1, keepdims=True)
        return np.broadcast_to(scale / (1.0 + r), np.shape(t)).copy()

    def hess(t):
        r = np.sum(t, axis=-1)[..., None, None]
        return np.broadcast_to(-scale / (1.0 + r) ** 2, np.shape(t) + (n,)).copy()

    return ToricPotential(n, value, grad, hess, "fubini_study", {"scale": float(scale)})


def separable(radials):
    """``ρ = Σ F_j(t_j)`` for a list of radial potentials, one per coordinate."""
    radials = list(radials)
    n = len(radials)

    def value(t):
        return sum(p.F(t[..., j]) for j, p in enumerate(radials))

    def grad(t):
        return np.stack([np.asarray(p.F1(t[..., j]), dtype=float)
                         for j, p in enumerate(radials)], axis=-1)

    def hess(t):
        d = np.stack([np.asarray(p.F2(t[..., j]), dtype=float)
                      for j, p in enumerate(radials)], axis=-1)
        return d[..., :, None] * np.eye(n)

    return ToricPotential(n, value, grad, hess, "separable",
                          {"radials": [p.to_dict() for p in radials]})


def make_potential(spec):
    """Build a potential from a config mapping such as ``{"kind": "flat", "n": 2}``."""
    spec = dict(spec)
    kind = spec.pop("kind", None)
    if kind == "separable":
        return separable(make_radial(r) for r in spec["radials"])
    try:
        n = int(spec.pop("n"))
    except KeyError:
        raise InvalidParameter(f"potential {kind!r} needs n") from None
    if n < 1:
        raise InvalidParameter("potential dimension must be >= 1")
    if kind == "flat":
        return flat(n, **spec)
    if kind == "fubini_study":
        return fubini_study(n, **spec)
    raise InvalidParameter(f"unknown potential kind {kind!r}")
