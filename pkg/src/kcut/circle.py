"""Kähler cuts of a toric chart by a weighted circle action.

The ambient space is ``W = M × ℂ`` with potential ``ρ(|z|²) + F(|w|²)``.  The
circle acts by ``z_j ↦ e^{i w_j θ} z_j`` on ``M`` and by rotation on the ℂ
factor, with moment map::

    ψ(z, w) = φ(z) + H(|w|²),      φ(z) = Σ_j w_j t_j ∂ρ/∂t_j

The cut at level λ is ``ψ⁻¹(λ)/S¹``.  Points of the cut away from the boundary
divisor are parametrised by invariant coordinates ``ζ`` with the holomorphic
slice ``(z, w) = (ζ, 1)``; the level point over ζ is ``e^{s}·(ζ, 1)`` where
``s`` solves the monotone equation ``φ(e^{s}·ζ) + H(e^{2s}) = λ``.  The reduced
Kähler potential is the value of the convex Kempf–Ness functional at that
critical point::

    ρ_λ(ζ) = ρ(t(s)) + F(e^{2s}) − 2λ s

which agrees with substituting the level point into the ambient potential up
to the term ``−λ log|w|²`` that keeps the result a potential on the quotient.
"""

from dataclasses import dataclass
from functools import cached_property
import math

import numpy as np

from .errors import (DomainViolation, InvalidLevel, InvalidParameter, LevelSolveFailure,
                     Misconfigured, NotEinsteinAmbient, NotSemistable, NumericFailure,
                     OutsideCutRegion, RegularityViolation, Unsupported)
from .hermitian import (PotentialField, STEP_SCALE, RICCI_STEP_SCALE, as_point, ddbar,
                        ddbar_batch, form_distance, positivity_check, real_two_form,
                        ricci_form)
from .radial import invert_moment, moment_profile
from .roots import find_increasing_root

#: exponent clip keeping e^x and its square finite during bracket growth
_EXP_CLIP = 300.0
#: search window for the flow parameter s
_S_BOUND = 350.0
LEVEL_TOL = 1e-10
REGULARITY_TOL = 1e-8
STRUCTURE_SPREAD_TOL = 1e-4
FIBER_SPREAD_TOL = 1e-8
#: inner Ricci step relative to |ζ| on charts singular at ζ = 0
PROPORTIONAL_RICCI_SCALE = 1e-2


def _exp(x):
    return np.exp(np.clip(x, -_EXP_CLIP, _EXP_CLIP))


@dataclass(frozen=True)
class CutProblem:
    """Chart of ``M`` with a toric potential, circle weights, a level and a radial factor."""

    potential: object
    weights: tuple
    level: float
    radial: object
    einstein_kappa: float | None = None
    structure_c: float | None = None
    name: str | None = None

    def __post_init__(self):
        weights = tuple(self.weights)
        if len(weights) != self.potential.n:
            raise InvalidParameter(
                f"{len(weights)} weights for a potential on C^{self.potential.n}")
        if any(int(w) != w for w in weights):
            raise InvalidParameter("circle weights must be integers")
        object.__setattr__(self, "weights", tuple(int(w) for w in weights))
        if not math.isfinite(self.level):
            raise InvalidLevel("level must be finite")
        if self.einstein_kappa is not None and self.einstein_kappa < 0:
            raise InvalidParameter("einstein_kappa must be non-negative")

    @property
    def n(self):
        return self.potential.n

    @cached_property
    def W(self):
        return np.array(self.weights, dtype=float)

    @cached_property
    def profile(self):
        return moment_profile(self.radial)


# ---------------------------------------------------------------------------
# moment maps and flows, vectorized over leading axes

def _phi_t(p, t):
    return np.sum(p.W * t * p.potential.grad(t), axis=-1)


def _norm2_t(p, t):
    """``|X|²`` of the generator on ``M`` in terms of ``t``."""
    wt = p.W * t
    g1 = p.potential.grad(t)
    g2 = p.potential.t_hessian(t)
    return np.sum(p.W * wt * g1, axis=-1) + np.einsum("...j,...jk,...k->...", wt, g2, wt)


def flow(p, z, s):
    """The ℂ*-action ``z_j ↦ e^{w_j s} z_j`` for complex ``s`` (real part flows)."""
    z = np.asarray(z, dtype=complex)
    s = np.asarray(s, dtype=complex)[..., None]
    return z * np.exp(np.clip(p.W * s.real, -_EXP_CLIP, _EXP_CLIP) + 1j * p.W * s.imag)


def moment_map(p, z):
    """Moment map ``φ(z) = Σ_j w_j t_j ∂ρ/∂t_j`` (scalar for one point)."""
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != p.n or not np.all(np.isfinite(z)):
        raise DomainViolation("point outside the chart", operation="moment_map")
    val = _phi_t(p, np.abs(z) ** 2)
    return float(val) if val.ndim == 0 else val


def ambient_moment(p, z, w):
    """``ψ(z, w) = φ(z) + H(|w|²)``."""
    return moment_map(p, z) + p.profile.H(np.abs(np.asarray(w)) ** 2)


def _crossing(p, M, level=None):
    """Solve ``φ(e^{s}·m) + H(e^{2s}) = λ`` for every row of ``M``."""
    lam = p.level if level is None else level
    M = np.asarray(M, dtype=complex)
    t0 = np.abs(M) ** 2
    prof = p.profile

    def parts(s):
        t = t0 * _exp(2.0 * p.W * s[..., None])
        u = _exp(2.0 * s)
        return t, u

    def c(s):
        t, u = parts(s)
        return _phi_t(p, t) + prof.H(u) - lam

    def dc(s):
        t, u = parts(s)
        return 2.0 * (_norm2_t(p, t) + u * prof.H1(u))

    s0 = np.zeros(M.shape[:-1])
    with np.errstate(all="ignore"):
        s, ok = find_increasing_root(c, s0, fprime=dc, step=1.0, lower=-_S_BOUND,
                                     upper=_S_BOUND, ftol=1e-14 * max(1.0, abs(lam)))
        ok &= np.abs(np.where(ok, c(np.where(ok, s, 0.0)), np.inf)) <= LEVEL_TOL
    return s, ok


def orbit_crossing(p, m):
    """The unique ``t₁`` with ``φ(e^{t₁}·m) + H(e^{2t₁}) = λ``.

    Raises :class:`NotSemistable` when the increasing function never reaches
    λ, i.e. the ℂ*-orbit of ``m`` misses the cut region.
    """
    m = as_point(m)
    if m.size != p.n:
        raise DomainViolation("point outside the chart", operation="orbit_crossing")
    s, ok = _crossing(p, m[None, :])
    if not ok[0]:
        raise NotSemistable("the C*-orbit never meets the level set", operation="orbit_crossing")
    return float(s[0])


def orbit_function(p, m, s):
    """``c(s) = φ(e^{s}·m) + H(e^{2s})`` (vectorized over ``s``)."""
    m = as_point(m)
    s = np.asarray(s, dtype=float)
    t = np.abs(m) ** 2 * _exp(2.0 * p.W * s[..., None])
    return _phi_t(p, t) + p.profile.H(_exp(2.0 * s))


def section_sigma(p, m):
    """``σ(m) = (m, K(λ − φ(m))^{1/2})``, the real positive section of the level set."""
    m = as_point(m)
    phi = moment_map(p, m)
    lam = p.level
    cap = p.profile.cap_a
    if phi > lam or phi <= lam - cap:
        raise OutsideCutRegion(f"phi(m)={phi:.6g} outside ({lam - cap:.6g}, {lam:.6g}]",
                               operation="section_sigma")
    if phi == lam:
        return m, 0.0
    return m, math.sqrt(invert_moment(p.profile, lam - phi))


# ---------------------------------------------------------------------------
# the map g : M^λ_o → M^#

def _check_region(p, phi):
    lam, cap = p.level, p.profile.cap_a
    if np.any(~(phi < lam)) or np.any(~(phi > lam - cap)):
        raise OutsideCutRegion("map_g needs lambda - a < phi(q) < lambda", operation="map_g")


def _map_g_coordinate(p, Q):
    phi = moment_map(p, Q)
    _check_region(p, np.asarray(phi))
    kappa = -0.5 * np.log(invert_moment(p.profile, np.asarray(p.level - phi, dtype=float)))
    return flow(p, Q, kappa)


def _map_g_orbit(p, Q):
    Q = np.asarray(Q, dtype=complex)
    _check_region(p, np.asarray(moment_map(p, Q)))
    prof = p.profile

    def G_and_slope(tau):
        pts = flow(p, Q, tau)
        s1, ok = _crossing(p, pts)
        if not np.all(ok):
            raise NumericFailure("orbit crossing failed inside map_g", operation="map_g")
        sigma = s1 + tau
        t = np.abs(Q) ** 2 * _exp(2.0 * p.W * sigma[..., None])
        u = _exp(2.0 * s1)
        a = 2.0 * _norm2_t(p, t)
        b = 2.0 * u * prof.H1(u)
        return sigma, b / (a + b)

    tau, ok = find_increasing_root(lambda x: G_and_slope(x)[0], np.zeros(Q.shape[:-1]),
                                   fprime=lambda x: G_and_slope(x)[1], step=1.0,
                                   lower=-_S_BOUND, upper=_S_BOUND)
    if not np.all(ok):
        raise NumericFailure("could not invert the orbit-crossing identification",
                             operation="map_g")
    return flow(p, Q, tau)


def map_g(p, q, path="coordinate"):
    """The biholomorphism ``g(q) = exp(κ(q) v)(q)`` with ``κ = -½ log K(λ − φ(q))``.

    ``path="coordinate"`` scales ``z_j`` by ``e^{w_j κ(q)}`` (for the flat
    ℂ factor and adapted weights ``(0,…,0,1)`` this is the classical chart
    formula).  ``path="orbit"`` instead finds the point ``p`` on the ℂ*-orbit
    of ``q`` whose orbit crossing lands on ``q``.
    Accepts one point ``(n,)`` or a batch ``(P, n)``.
    """
    q = np.asarray(q, dtype=complex)
    single = q.ndim == 1
    Q = q[None, :] if single else q
    if path == "coordinate":
        out = _map_g_coordinate(p, Q)
    elif path == "orbit":
        out = _map_g_orbit(p, Q)
    else:
        raise InvalidParameter(f"unknown map_g path {path!r}")
    return out[0] if single else out


def map_g_paths(p, q):
    """Both evaluations of ``g`` and their max-abs discrepancy."""
    a = map_g(p, q, "coordinate")
    b = map_g(p, q, "orbit")
    return a, b, float(np.max(np.abs(a - b)))


# ---------------------------------------------------------------------------
# charts on the cut

@dataclass(frozen=True)
class CutChart:
    """Invariant coordinates ``ζ_j = z_j · w^{−w_j}`` on the cut minus its divisor.

    ``pattern`` is ``"projective"`` for non-negative weights (``ζ = z/w``) and
    ``"blowup"`` for non-positive weights (``ζ = w·z``).  ``singular`` flags a
    level through a fixed point of the ambient action.
    """

    problem: CutProblem
    pattern: str
    singular: bool

    def invariant_coords(self, z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)[..., None]
        return z * w ** (-self.problem.W)

    def level_s(self, Z):
        Z = np.asarray(Z, dtype=complex)
        return _crossing(self.problem, Z.reshape(-1, self.problem.n))

    def evaluable(self, Z):
        Z = np.asarray(Z, dtype=complex)
        return self.level_s(Z)[1].reshape(Z.shape[:-1])

    def _solve_one(self, zeta, operation):
        zeta = as_point(zeta)
        if zeta.size != self.problem.n:
            raise DomainViolation("point has the wrong dimension", operation=operation)
        if self.pattern == "blowup" and self.problem.level <= 0 and not np.any(zeta):
            raise DomainViolation("zeta = 0 is not in the blow-up chart", operation=operation)
        s, ok = self.level_s(zeta)
        if not ok[0]:
            raise LevelSolveFailure("no level-set point over zeta", operation=operation)
        return zeta, float(s[0])

    def w_solver(self, zeta):
        """``|w|²`` on the level set over ``ζ``."""
        _, s = self._solve_one(zeta, "w_solver")
        return math.exp(2.0 * s)

    def level_point(self, zeta):
        """Ambient level point ``(z, w)`` over ``ζ`` with ``w`` real positive."""
        zeta, s = self._solve_one(zeta, "level_point")
        return flow(self.problem, zeta, s), math.exp(s)

    def step(self, zeta, scale=STEP_SCALE):
        r = float(np.linalg.norm(zeta))
        if self.pattern == "blowup" and self.problem.level <= 0:
            # the potential is singular at ζ = 0: keep the stencil proportional to |ζ|
            return scale * r
        return scale * (1.0 + r)

    def ricci_step(self, zeta):
        if self.pattern == "blowup" and self.problem.level <= 0:
            return PROPORTIONAL_RICCI_SCALE * float(np.linalg.norm(zeta))
        return self.step(zeta, RICCI_STEP_SCALE)

    def _fields(self, Z):
        p = self.problem
        Z = np.asarray(Z, dtype=complex)
        s, ok = self.level_s(Z)
        s = s.reshape(Z.shape[:-1])
        ok = ok.reshape(Z.shape[:-1])
        s = np.where(ok, s, np.nan)
        t = np.abs(Z) ** 2 * np.exp(2.0 * p.W * s[..., None])
        u = np.exp(2.0 * s)
        return s, t, u

    def reduced_potential(self):
        """Field ``ζ ↦ ρ_λ(ζ)``; NaN where the level solve fails."""
        p = self.problem

        def rho_lambda(Z):
            s, t, u = self._fields(Z)
            return p.potential.value(t) + p.radial.F(u) - 2.0 * p.level * s

        return PotentialField(rho_lambda, n=p.n, name="rho_lambda")

    def log_w2(self):
        """Field ``ζ ↦ log|w|²`` on the level set."""
        def log_w2(Z):
            return 2.0 * self._fields(Z)[0]

        return PotentialField(log_w2, n=self.problem.n, name="log_w2")

    def level_potential(self):
        """Field ``ζ ↦ ρ(z) + F(|w|²)`` at the level point; ``∂∂̄`` of it is ``ω_λ + λμ``."""
        p = self.problem

        def ambient(Z):
            _, t, u = self._fields(Z)
            return p.potential.value(t) + p.radial.F(u)

        return PotentialField(ambient, n=p.n, name="level_potential")

    def generator_norm2(self, Z):
        """``|X|²`` of the circle generator at the level points over ``Z``."""
        p = self.problem
        _, t, u = self._fields(Z)
        return _norm2_t(p, t) + u * p.profile.H1(u)

    def log_v_eff(self):
        def log_v(Z):
            return math.log(2.0 * math.pi) + 0.5 * np.log(self.generator_norm2(Z))

        return PotentialField(log_v, n=self.problem.n, name="log_v_eff")


def make_chart(p):
    """Invariant-coordinate chart for a supported weight pattern.

    Raises :class:`Unsupported` for mixed-sign or all-zero weights and
    :class:`InvalidLevel` when the level set misses the chart.
    """
    w = np.array(p.weights)
    if np.all(w >= 0) and np.any(w > 0):
        pattern = "projective"
    elif np.all(w <= 0) and np.any(w < 0):
        pattern = "blowup"
    else:
        raise Unsupported(f"weight pattern {p.weights} has no supported invariant chart",
                          operation="make_chart")
    singular = abs(p.level) <= 1e-12
    chart = CutChart(p, pattern, singular)
    probes = np.array([np.full(p.n, 0.5 + 0.25j), np.full(p.n, 2.0), np.full(p.n, 0.05j)])
    if not np.any(chart.evaluable(probes)):
        raise InvalidLevel(f"level {p.level} is not attained over the chart",
                           operation="make_chart")
    return chart


def _field_error(exc, operation):
    if isinstance(exc, (NumericFailure, DomainViolation)):
        return LevelSolveFailure(f"level solve failed on the stencil ({exc})",
                                 operation=operation)
    return exc


def _preflight(chart, zeta, operation):
    zeta = as_point(zeta)
    chart._solve_one(zeta, operation)
    norm2 = float(chart.generator_norm2(zeta[None, :])[0])
    if not norm2 > REGULARITY_TOL:
        raise RegularityViolation("circle action degenerates on the level set (critical level)",
                                  operation=operation)
    return zeta


def _ddbar_chart(field, chart, zeta, h, operation, scale=STEP_SCALE):
    h = chart.step(zeta, scale) if h is None else h
    try:
        return ddbar(field, zeta, h)
    except (NumericFailure, DomainViolation) as exc:
        raise _field_error(exc, operation) from exc


def reduced_form(p, chart, zeta, h=None):
    """Reduced Kähler form ``ω_λ = i∂∂̄ρ_λ`` at ``ζ``."""
    zeta = _preflight(chart, zeta, "reduced_form")
    form = _ddbar_chart(chart.reduced_potential(), chart, zeta, h, "reduced_form")
    if positivity_check(form) != "positive":
        raise RegularityViolation("reduced form is not positive definite",
                                  operation="reduced_form")
    return form


def bundle_curvature(p, chart, zeta, h=None):
    """Curvature ``μ = i∂∂̄ log|w|²`` of the level-set circle bundle, w-trivialized."""
    zeta = as_point(zeta)
    try:
        _preflight(chart, zeta, "bundle_curvature")
    except LevelSolveFailure as exc:
        raise DomainViolation(str(exc), operation="bundle_curvature") from exc
    return _ddbar_chart(chart.log_w2(), chart, zeta, h, "bundle_curvature")


def v_eff(p, chart, zeta, *, angles=4):
    """Length of the circle fibre over ``ζ`` in the ambient metric.

    The generator norm is evaluated with the full ambient metric matrix at
    ``angles`` points of the fibre; their spread must stay below 1e-8.
    """
    z, w = chart.level_point(zeta)
    norms = []
    for theta in np.linspace(0.0, 2.0 * math.pi, angles, endpoint=False):
        zr = flow(p, z, 1j * theta)
        wr = w * np.exp(1j * theta)
        X = 1j * p.W * zr
        g = p.potential.metric(zr)
        u = abs(wr) ** 2
        norm2 = float(np.real(np.conj(X) @ g.T @ X)) + float(p.profile.H1(u)) * u
        norms.append(norm2)
    norms = np.array(norms)
    if np.ptp(norms) > FIBER_SPREAD_TOL * max(1.0, norms.max()):
        raise NumericFailure("generator norm varies along the fibre", operation="v_eff")
    return 2.0 * math.pi * math.sqrt(norms.mean())


@dataclass(frozen=True)
class CurvaturePack:
    omega_lambda: object
    ricci_lambda: object
    bundle_mu: object
    v_eff: float
    at: np.ndarray


def ricci_lambda(p, chart, zeta, h=None):
    """Ricci form of the reduced metric, ``−i∂∂̄ log det ω_λ``."""
    zeta = _preflight(chart, zeta, "ricci_form")
    h = chart.ricci_step(zeta) if h is None else h
    try:
        return ricci_form(chart.reduced_potential(), zeta, h)
    except (NumericFailure, DomainViolation) as exc:
        raise _field_error(exc, "ricci_form") from exc


def curvature_pack(p, chart, zeta):
    zeta = as_point(zeta)
    return CurvaturePack(reduced_form(p, chart, zeta), ricci_lambda(p, chart, zeta),
                         bundle_curvature(p, chart, zeta), v_eff(p, chart, zeta), zeta)


@dataclass(frozen=True)
class EinsteinTerms:
    ricci: object
    ddbar_log_v: object
    mu: object
    omega: object
    residual: float


def einstein_terms(p, chart, zeta):
    """Both sides of ``Ric − 2i∂∂̄ log V_eff + cμ = κ(ω_λ + λμ)`` at ``ζ``."""
    if p.einstein_kappa is None or p.structure_c is None:
        raise Misconfigured("einstein_residual needs einstein_kappa and structure_c",
                            operation="einstein_residual")
    zeta = as_point(zeta)
    ric = ricci_lambda(p, chart, zeta)
    dlv = _ddbar_chart(chart.log_v_eff(), chart, zeta, None, "einstein_residual")
    mu = bundle_curvature(p, chart, zeta)
    omega = reduced_form(p, chart, zeta)
    lhs = ric - 2.0 * dlv + p.structure_c * mu
    rhs = p.einstein_kappa * (omega + p.level * mu)
    return EinsteinTerms(ric, dlv, mu, omega, form_distance(lhs, rhs))


def einstein_residual(p, chart, zeta):
    return einstein_terms(p, chart, zeta).residual


# ---------------------------------------------------------------------------
# ambient checks

def ambient_field(p):
    """Potential ``ρ(|z|²) + F(|w|²)`` on ``ℂⁿ × ℂ`` (last coordinate is ``w``)."""
    def func(X):
        X = np.asarray(X, dtype=complex)
        return p.potential.value(np.abs(X[..., :-1]) ** 2) + p.radial.F(np.abs(X[..., -1]) ** 2)

    return PotentialField(func, n=p.n + 1, name="ambient")


@dataclass(frozen=True)
class StructureEstimate:
    c: float
    spread: float

    def __float__(self):
        return self.c


def structure_constant(p, sample, *, step=1e-2, threshold=STRUCTURE_SPREAD_TOL):
    """Estimate ``c = κψ + div Z`` over ambient sample points ``(z_1..z_n, w)``.

    ``div Z`` is the holomorphic divergence ``Σ weights`` plus half the
    derivative of ``log det g`` along the real flow of ``Z``.
    """
    if p.einstein_kappa is None:
        raise Misconfigured("structure_constant needs einstein_kappa",
                            operation="structure_constant")
    X = np.atleast_2d(np.asarray(sample, dtype=complex))
    if X.shape[-1] != p.n + 1:
        raise DomainViolation("sample points must have n + 1 coordinates",
                              operation="structure_constant")
    field = ambient_field(p)
    Wx = np.append(p.W, 1.0)

    def logdet_along(s):
        pts = X * np.exp(Wx * s)
        H = np.array([ddbar(field, x).coeffs for x in pts])
        sign, ld = np.linalg.slogdet(H)
        if np.any(sign.real <= 0):
            raise NotEinsteinAmbient("ambient metric is not positive definite",
                                     operation="structure_constant")
        return ld

    d1 = (logdet_along(step) - logdet_along(-step)) / (2 * step)
    d2 = (logdet_along(step / 2) - logdet_along(-step / 2)) / step
    dlog = (4 * d2 - d1) / 3
    div_z = Wx.sum() + 0.5 * dlog
    psi = ambient_moment(p, X[:, :-1], X[:, -1])
    c = p.einstein_kappa * np.asarray(psi) + div_z
    spread = float(np.ptp(c))
    if spread > threshold:
        raise NotEinsteinAmbient(f"kappa*psi + div Z varies by {spread:.3g} over the sample",
                                 operation="structure_constant")
    return StructureEstimate(float(np.mean(c)), spread)


def moment_map_discrepancy(p, z, h=1e-4):
    """Max deviation between ``∂φ/∂z_j`` and ``Σ_k g_{jk̄} w_k z̄_k`` at ``z``.

    This is the pairing ``ι_X ω = −dφ`` written in complex coordinates.
    """
    z = as_point(z)
    n = p.n
    grad = np.zeros(n, dtype=complex)
    for j in range(n):
        e = np.zeros(n, dtype=complex)
        e[j] = 1.0
        parts = []
        for direction in (e, 1j * e):
            def d(hh):
                return (moment_map(p, z + hh * direction) - moment_map(p, z - hh * direction)) / (2 * hh)
            parts.append((4 * d(h / 2) - d(h)) / 3)
        grad[j] = 0.5 * (parts[0] - 1j * parts[1])
    g = ddbar(p.potential.field(), z).coeffs
    pairing = g @ (p.W * np.conj(z))
    return float(np.max(np.abs(grad - pairing)))


def real_jacobian(func, q, h=None):
    """Real ``2n × 2n`` Jacobian of a map ``ℂⁿ → ℂⁿ`` in ``(x, y)`` coordinates."""
    q = as_point(q)
    n = q.size
    h = 1e-3 * (1.0 + float(np.linalg.norm(q))) if h is None else h
    J = np.empty((2 * n, 2 * n))
    for a in range(2 * n):
        e = np.zeros(n, dtype=complex)
        e[a % n] = 1.0 if a < n else 1j

        def d(hh):
            return (func(q + hh * e) - func(q - hh * e)) / (2 * hh)

        col = (4 * d(h / 2) - d(h)) / 3
        J[:, a] = np.concatenate([col.real, col.imag])
    return J


def pullback_discrepancy(p, chart, q):
    """``max |g*ω_λ − ω_M|`` at ``q`` in ``M^λ_o`` (real 2-form matrices)."""
    q = as_point(q)
    zeta = map_g(p, q)
    D = real_jacobian(lambda x: map_g(p, x), q)
    omega_cut = real_two_form(reduced_form(p, chart, zeta).coeffs)
    omega_m = real_two_form(ddbar(p.potential.field(), q).coeffs)
    return float(np.max(np.abs(D.T @ omega_cut @ D - omega_m)))


def grid_forms(p, chart, Z):
    """Reduced forms at many points at once, shape ``(P, n, n)``."""
    Z = np.asarray(Z, dtype=complex)
    h = np.array([chart.step(z) for z in Z])
    try:
        return ddbar_batch(chart.reduced_potential(), Z, h, operation="reduced_form")
    except (NumericFailure, DomainViolation) as exc:
        raise _field_error(exc, "reduced_form") from exc
