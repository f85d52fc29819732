"""S¹-invariant Kähler potentials on ℂ.

A radial potential is a function ``F(t)`` of ``t = |z|²``.  Its moment
profile is ``H(t) = t F'(t)`` with derivative ``H'(t) = t F''(t) + F'(t)``;
the form ``i ∂∂̄ F(|z|²)`` is symplectic exactly when ``H' > 0`` on
``[0, ∞)``, and then ``H`` is a moment map for the rotation action.  ``H`` is
increasing onto ``[0, a)`` where ``a`` is the moment cap.
"""

from dataclasses import dataclass, field
import math
import warnings

import numpy as np
from numpy.polynomial import Polynomial

from .errors import InconsistentDerivatives, InvalidParameter, NoConvergence, OutOfRange
from .roots import find_increasing_root

BUILTIN_KINDS = ("quadratic", "log_einstein")


@dataclass(frozen=True)
class RadialPotential:
    """A radial potential ``F`` together with its first two derivatives.

    Use :func:`make_radial` to construct one; it validates the parameters and
    cross-checks the derivative evaluators.
    """

    kind: str
    params: dict
    F: object = field(repr=False, compare=False)
    F1: object = field(repr=False, compare=False)
    F2: object = field(repr=False, compare=False)
    t_max: float = math.inf

    def to_dict(self):
        return {"kind": self.kind, **self.params}

    def __hash__(self):
        return hash((self.kind, tuple(sorted((k, repr(v)) for k, v in self.params.items()))))


class MomentProfile:
    """Moment profile ``H`` of a radial potential with its cap and inverse.

    Attributes
    ----------
    potential : RadialPotential
    cap_a : float
        ``lim H(t)`` for ``t -> ∞``; ``math.inf`` for unbounded profiles.
    cap_estimated : bool
        True when ``cap_a`` was estimated as ``H(t_max)`` (custom kinds).
    tail_monotone : bool
        For estimated caps, whether ``H`` was still increasing at ``t_max``.
    abs_tol, rel_tol : float
        Inversion tolerance, ``|H(t) - s| < abs_tol + rel_tol * |s|``.
    """

    def __init__(self, potential, *, abs_tol=1e-12, rel_tol=1e-12):
        self.potential = potential
        self.abs_tol = abs_tol
        self.rel_tol = rel_tol
        self.cap_estimated = False
        self.tail_monotone = True
        p = potential
        if p.kind == "quadratic":
            self.cap_a = math.inf
        elif p.kind == "log_einstein":
            self.cap_a = 2.0 / p.params["kappa"]
        else:
            self.cap_estimated = True
            self.cap_a = float(self.H(p.t_max))
            self.tail_monotone = bool(self.H1(p.t_max) > 0)
            if not self.tail_monotone:
                warnings.warn(
                    f"moment profile is not increasing at t_max={p.t_max}; "
                    "cap estimate H(t_max) is unreliable", RuntimeWarning, stacklevel=2)

    def H(self, t):
        t = np.asarray(t, dtype=float)
        return t * self.potential.F1(t)

    def H1(self, t):
        t = np.asarray(t, dtype=float)
        return t * self.potential.F2(t) + self.potential.F1(t)

    @property
    def tolerance(self):
        return self.abs_tol

    def __repr__(self):
        return f"MomentProfile({self.potential.kind}, cap_a={self.cap_a})"


def _quadratic(scale):
    def F(t):
        return scale * np.asarray(t, dtype=float)

    def F1(t):
        return np.full(np.shape(t), scale, dtype=float)

    def F2(t):
        return np.zeros(np.shape(t), dtype=float)

    return F, F1, F2


def _log_einstein(kappa):
    c = 2.0 / kappa

    def F(t):
        return c * np.log1p(np.asarray(t, dtype=float))

    def F1(t):
        return c / (1.0 + np.asarray(t, dtype=float))

    def F2(t):
        return -c / (1.0 + np.asarray(t, dtype=float)) ** 2

    return F, F1, F2


def _richardson_derivative(f, t, h):
    d1 = (f(t + h) - f(t - h)) / (2 * h)
    d2 = (f(t + h / 2) - f(t - h / 2)) / h
    return (4 * d2 - d1) / 3


def _check_derivatives(F, F1, F2, t_max, rtol=1e-6):
    """Compare analytic derivative evaluators against finite differences."""
    upper = t_max if math.isfinite(t_max) else 10.0
    grid = np.linspace(0.0, upper, 17)
    h = 1e-3 * (1.0 + grid)
    # stay inside [0, t_max]: shift the stencil centre away from the ends
    centre = np.clip(grid, h, max(upper - h.max(), h.max()))
    for name, f, df in (("F1", F, F1), ("F2", F1, F2)):
        approx = _richardson_derivative(f, centre, h)
        exact = np.asarray(df(centre), dtype=float)
        err = np.abs(approx - exact) / np.maximum(1.0, np.abs(exact))
        if not np.all(np.isfinite(exact)) or np.max(err) > rtol:
            worst = float(centre[np.nanargmax(err)])
            raise InconsistentDerivatives(
                f"{name} disagrees with finite differences near t={worst:.6g}",
                operation="make_radial")


def make_radial(kind, **params):
    """Build a :class:`RadialPotential`.

    ``kind`` may also be a mapping ``{"kind": ..., **params}`` as found in CLI
    configs.

    Kinds
    -----
    quadratic(scale=1)
        ``F(t) = scale * t``.
    log_einstein(kappa)
        ``F(t) = (2/kappa) log(1 + t)``, Kähler–Einstein with constant kappa.
    custom(coeffs, t_max, F1=None, F2=None)
        Polynomial ``F(t) = sum(coeffs[k] t^k)`` on ``[0, t_max]``.  Optional
        derivative evaluators are checked against finite differences.
    """
    if isinstance(kind, dict):
        params = {k: v for k, v in kind.items() if k != "kind"}
        kind = kind["kind"]

    if kind == "quadratic":
        scale = float(params.get("scale", 1.0))
        if not scale > 0:
            raise InvalidParameter(f"quadratic scale must be positive, got {scale}",
                                   operation="make_radial")
        F, F1, F2 = _quadratic(scale)
        return RadialPotential("quadratic", {"scale": scale}, F, F1, F2)

    if kind == "log_einstein":
        if "kappa" not in params:
            raise InvalidParameter("log_einstein needs kappa", operation="make_radial")
        kappa = float(params["kappa"])
        if not kappa > 0:
            raise InvalidParameter(f"kappa must be positive, got {kappa}",
                                   operation="make_radial")
        F, F1, F2 = _log_einstein(kappa)
        return RadialPotential("log_einstein", {"kappa": kappa}, F, F1, F2)

    if kind == "custom":
        coeffs = [float(c) for c in params.get("coeffs", ())]
        t_max = float(params.get("t_max", 0.0))
        if not coeffs or not np.all(np.isfinite(coeffs)):
            raise InvalidParameter("custom potential needs finite coefficients",
                                   operation="make_radial")
        if not (t_max > 0 and math.isfinite(t_max)):
            raise InvalidParameter("custom potential needs a finite t_max > 0",
                                   operation="make_radial")
        poly = Polynomial(coeffs)
        d1, d2 = poly.deriv(1), poly.deriv(2)

        def F(t):
            return poly(np.asarray(t, dtype=float))

        F1 = params.get("F1") or (lambda t: d1(np.asarray(t, dtype=float)))
        F2 = params.get("F2") or (lambda t: d2(np.asarray(t, dtype=float)))
        _check_derivatives(F, F1, F2, t_max)
        return RadialPotential("custom", {"coeffs": coeffs, "t_max": t_max},
                               F, F1, F2, t_max=t_max)

    raise InvalidParameter(f"unknown radial potential kind {kind!r}", operation="make_radial")


def moment_profile(p, *, abs_tol=1e-12, rel_tol=1e-12):
    return MomentProfile(p, abs_tol=abs_tol, rel_tol=rel_tol)


def invert_moment(mp, s, *, maxiter=200):
    """Solve ``H(t) = s`` for ``t >= 0``.

    Accepts a scalar or an array of targets.  Raises :class:`OutOfRange` unless
    ``0 <= s < cap_a``.
    """
    s_arr = np.asarray(s, dtype=float)
    if np.any(~np.isfinite(s_arr)) or np.any(s_arr < 0) or np.any(s_arr >= mp.cap_a):
        raise OutOfRange(f"moment value outside [0, {mp.cap_a})", operation="invert_moment")
    upper = mp.potential.t_max

    def resid(t):
        return mp.H(t) - s_arr

    tol = (mp.abs_tol + mp.rel_tol * np.abs(s_arr)) * np.maximum(1.0, np.abs(s_arr))
    t, ok = find_increasing_root(resid, np.ones_like(s_arr), fprime=mp.H1, step=1.0,
                                 lower=0.0, upper=upper, ftol=tol,
                                 max_expand=maxiter, maxiter=maxiter)
    # H(0) = 0 exactly, so s = 0 maps to t = 0 without iteration
    t = np.where(s_arr == 0, 0.0, t)
    ok = ok | (s_arr == 0)
    if not np.all(ok) or np.any(np.abs(mp.H(t) - s_arr) >= tol):
        raise NoConvergence("could not bracket or converge on H(t) = s",
                            operation="invert_moment")
    return float(t) if t.ndim == 0 else t


@dataclass(frozen=True)
class SymplecticVerdict:
    symplectic: bool
    failing_t: float | None = None

    def __bool__(self):
        return self.symplectic


def check_symplectic(p, grid):
    """Test ``H'(t) > 0`` on ``grid``; report the first failing grid point."""
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size == 0 or np.any(grid < 0):
        raise InvalidParameter("grid must be a nonempty list of t >= 0",
                               operation="check_symplectic")
    h1 = np.asarray(p.F2(grid) * grid + p.F1(grid), dtype=float)
    bad = np.flatnonzero(~(h1 > 0))
    if bad.size:
        return SymplecticVerdict(False, float(grid[bad[0]]))
    return SymplecticVerdict(True)
