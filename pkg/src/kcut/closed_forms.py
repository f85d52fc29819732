"""Closed-form reduced metrics for three standard cuts.

``euclidean_cut``
    ℂⁿ × ℂ with all weights 1; the cut at λ > 0 is ℂℙⁿ with λ times the
    Fubini–Study metric, ``ρ_λ = λ log(1 + |ζ|²)``.
``euclidean_blowup``
    ℂⁿ × ℂ with weights −1 on ℂⁿ.  With ``S = √(λ² + 4|ζ|²)``::

        ρ_λ = S − λ log(λ + S),   |w|² = (λ + S)/2,   V_eff = 2π S^{1/2}

    For λ < 0 the cut is the blow-up of ℂⁿ at the origin; λ = 0 gives the cone
    metric ``ρ₀ = 2|ζ|``.
``fs_blowup``
    ℂℙⁿ with ``(n+1)`` times Fubini–Study and weights −1, cut by ℂ with
    ``F = 2 log(1 + |w|²)``.  The level set gives the quadratic
    ``2(2−λ)|w|⁴ − 2A|w|² − B/2 = 0`` with ``A = λ + (λ+n−1)|ζ|²`` and
    ``B = 4(2−λ)(λ+n+1)|ζ|²``.

All three are Einstein in the modified sense with structure constant
``c = n + 1`` (first) and ``c = 1 − n`` (the two blow-ups).
"""

from dataclasses import dataclass
import math

import numpy as np

from .circle import CutProblem, _ddbar_chart, make_chart
from .errors import DomainViolation, InvalidLevel, InvalidParameter
from .hermitian import PotentialField, STEP_SCALE, as_point, ddbar, form_distance
from .potentials import flat, fubini_study
from .radial import make_radial

EXAMPLES = ("euclidean_cut", "euclidean_blowup", "fs_blowup")


def _check(name, n, lam):
    if name not in EXAMPLES:
        raise InvalidParameter(f"unknown example {name!r}")
    if int(n) != n or n < 1:
        raise InvalidParameter("n must be a positive integer")
    if not math.isfinite(lam):
        raise InvalidLevel("level must be finite")
    if name == "euclidean_cut" and not lam > 0:
        raise InvalidLevel("euclidean_cut needs lambda > 0", operation="closed_form_example")
    if name == "fs_blowup" and not -n - 1 < lam < 2:
        raise InvalidLevel(f"fs_blowup needs -{n + 1} < lambda < 2",
                           operation="closed_form_example")


def example_problem(name, n, lam):
    """The :class:`CutProblem` whose cut is the named example."""
    _check(name, n, lam)
    if name == "euclidean_cut":
        return CutProblem(flat(n), (1,) * n, lam, make_radial("quadratic"), 0.0, n + 1.0, name)
    if name == "euclidean_blowup":
        return CutProblem(flat(n), (-1,) * n, lam, make_radial("quadratic"), 0.0, 1.0 - n, name)
    return CutProblem(fubini_study(n, n + 1.0), (-1,) * n, lam,
                      make_radial("log_einstein", kappa=1.0), 1.0, 1.0 - n, name)


def _r(Z):
    return np.sum(np.abs(np.asarray(Z, dtype=complex)) ** 2, axis=-1)


def _blowup_log_sum(lam, r):
    """``log(λ + S)`` computed without cancellation for λ < 0."""
    S = np.sqrt(lam * lam + 4.0 * r)
    if lam < 0:
        return np.log(4.0 * r) - np.log(S - lam)
    return np.log(lam + S)


def fs_level_w2(n, lam, r):
    """``|w|²`` on the fs_blowup level set over ``|ζ|² = r``."""
    r = np.asarray(r, dtype=float)
    A = lam + (lam + n - 1.0) * r
    B = 4.0 * (2.0 - lam) * (lam + n + 1.0) * r
    root = np.sqrt(A * A + B)
    with np.errstate(divide="ignore", invalid="ignore"):
        # rationalized branch avoids cancellation when A < 0
        stable = B / (2.0 * (2.0 - lam) * (root - A))
    return np.where(A >= 0, (A + root) / (2.0 * (2.0 - lam)), stable)


def closed_form_fields(name, n, lam):
    """Fields ``{"rho": ρ_λ or None, "log_w2": log|w|²}`` in ζ-coordinates."""
    _check(name, n, lam)
    if name == "euclidean_cut":
        def rho(Z):
            return lam * np.log1p(_r(Z))

        def log_w2(Z):
            return math.log(lam) - np.log1p(_r(Z))
    elif name == "euclidean_blowup":
        def rho(Z):
            r = _r(Z)
            S = np.sqrt(lam * lam + 4.0 * r)
            if lam == 0:
                return S
            return S - lam * _blowup_log_sum(lam, r)

        def log_w2(Z):
            return _blowup_log_sum(lam, _r(Z)) - math.log(2.0)
    else:
        rho = None

        def log_w2(Z):
            return np.log(fs_level_w2(n, lam, _r(Z)))

    return {"rho": None if rho is None else PotentialField(rho, n=n, name=f"{name}_rho"),
            "log_w2": PotentialField(log_w2, n=n, name=f"{name}_log_w2")}


@dataclass(frozen=True)
class ClosedFormPack:
    """Closed-form quantities at one point; entries not printed for an example are None."""

    name: str
    n: int
    level: float
    at: np.ndarray
    w2: float
    rho: float | None
    omega: object
    v_eff: float | None
    mu: object
    c: float
    singular: bool


def _step(name, lam, zeta, scale=STEP_SCALE):
    r = float(np.linalg.norm(zeta))
    if name != "euclidean_cut" and lam <= 0:
        return scale * r
    return scale * (1.0 + r)


def closed_form_example(name, params, zeta):
    """Evaluate an example's closed forms at ``ζ``.

    ``params`` holds ``n`` and ``lam`` (``kappa`` is fixed by the example and
    ignored if given).  ``ω_λ`` and ``μ`` are ∂∂̄ of the closed-form fields.
    """
    n = int(params["n"])
    lam = float(params["lam"])
    _check(name, n, lam)
    zeta = as_point(zeta)
    if zeta.size != n:
        raise DomainViolation(f"expected a point of C^{n}", operation="closed_form_example")
    r = float(np.sum(np.abs(zeta) ** 2))
    if name != "euclidean_cut" and lam <= 0 and r == 0:
        raise DomainViolation("zeta = 0 is not in the blow-up chart",
                              operation="closed_form_example")
    fields = closed_form_fields(name, n, lam)
    singular = name == "euclidean_blowup" and lam == 0
    h = _step(name, lam, zeta)
    rho = omega = v = None
    if fields["rho"] is not None:
        rho = float(fields["rho"](zeta))
        omega = ddbar(fields["rho"], zeta, h)
    mu = ddbar(fields["log_w2"], zeta, h)
    w2 = float(np.exp(fields["log_w2"](zeta)))
    if name == "euclidean_cut":
        v = 2.0 * math.pi * math.sqrt(lam)
        c = n + 1.0
    else:
        c = 1.0 - n
        if name == "euclidean_blowup":
            v = 2.0 * math.pi * (lam * lam + 4.0 * r) ** 0.25
    return ClosedFormPack(name, n, lam, zeta, w2, rho, omega, v, mu, c, singular)


def blowup_ricci_residual(p, chart, zeta):
    """Residual of ``Ric_λ = (n−1)μ_L + 2i∂∂̄ log V_eff`` for euclidean_blowup.

    ``μ_L = i∂∂̄ log(λ + S)`` is taken from the closed form; ``Ric_λ`` and
    ``V_eff`` are computed numerically from the cut.
    """
    from .circle import ricci_lambda

    zeta = as_point(zeta)
    n, lam = p.n, p.level
    mu_l = ddbar(closed_form_fields("euclidean_blowup", n, lam)["log_w2"], zeta,
                 _step("euclidean_blowup", lam, zeta))
    ric = ricci_lambda(p, chart, zeta)
    dlv = _ddbar_chart(chart.log_v_eff(), chart, zeta, None, "einstein_residual")
    return form_distance(ric, (n - 1) * mu_l + 2.0 * dlv)


def example_chart(name, n, lam):
    p = example_problem(name, n, lam)
    return p, make_chart(p)
