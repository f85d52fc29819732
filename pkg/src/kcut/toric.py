"""Cuts by torus actions: polyhedral sets, faces, isotropy and stability.

A rational polyhedral set ``Δ = {η ∈ ℝᵏ : ⟨η, N_j⟩ ≥ c_j}`` is stored with
primitive integer normals.  A face is identified by its (closed) active set,
the constraints tight on all of it; its direction space is the kernel of the
active normals, and its isotropy algebra ``g_E`` is the annihilator of that
space, represented by an integer lattice basis.

The torus ``T^k`` acts on a toric chart ``ℂⁿ`` through an integer weight
matrix ``W`` (``k × n``): ``θ·z_j = e^{i(Wᵀθ)_j} z_j``.  The X side is a
product of ``k`` copies of ℂ with radial potentials ``F_a`` and moment map
``Ψ_a(x) = λ_a − H_a(|x_a|²)``, so that ``Φ = φ − Ψ`` vanishes exactly on
the combined level set and the one-factor case reproduces the circle cut.
"""

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
import json
import math

import numpy as np
from scipy.optimize import linprog

from . import lattice
from .errors import (Inconclusive, InvalidParameter, NotSemistable, OutsidePolytope,
                     TooLarge, Unsupported)
from .radial import moment_profile

FACE_TOL = 1e-10
LP_TOL = 1e-9
MAX_CONSTRAINTS = 20
MOMENT_TOL = 1e-8
#: bound on 2t in exponents so that squared moduli stay finite
_CLIP = 300.0


# ---------------------------------------------------------------------------
# polyhedral sets

def _to_fraction(x):
    return x if isinstance(x, Fraction) else Fraction(x)


def _lp_max(objective, A_ub, b_ub, A_eq, b_eq, k):
    """Maximize ``objective·x`` (x = (η, s)); returns (value, x) or (None, None)."""
    res = linprog(-np.asarray(objective, dtype=float),
                  A_ub=A_ub if len(A_ub) else None, b_ub=b_ub if len(b_ub) else None,
                  A_eq=A_eq if len(A_eq) else None, b_eq=b_eq if len(b_eq) else None,
                  bounds=[(None, None)] * k + [(None, 1.0)], method="highs")
    if res.status == 0:
        return -res.fun, res.x
    if res.status == 3:
        return math.inf, None
    return None, None


@dataclass(frozen=True)
class Face:
    """Open face of a polyhedral set: its active constraints, a witness and its dimension."""

    active: tuple
    witness: tuple
    dim: int

    def to_dict(self, isotropy_rank=None):
        out = {"face": list(self.active), "dim": self.dim,
               "witness": [float(x) for x in self.witness]}
        if isotropy_rank is not None:
            out["isotropy_rank"] = isotropy_rank
        return out


class PolyhedralSet:
    """``{η ∈ ℝᵏ : ⟨η, N_j⟩ ≥ c_j}`` with primitive normals and no redundant rows.

    Parameters
    ----------
    dimension : int
    constraints : iterable of (normal, offset)
        Integer normal vectors and real (or rational) offsets.  Non-primitive
        normals are divided by their gcd together with the offset.

    Raises
    ------
    InvalidParameter
        On zero or non-integer normals, or when the set is empty.
    """

    def __init__(self, dimension, constraints):
        k = int(dimension)
        if k < 1:
            raise InvalidParameter("dimension must be >= 1")
        rows = []
        for normal, offset in constraints:
            if len(normal) != k:
                raise InvalidParameter(f"normal {normal} has the wrong length")
            if any(int(x) != x for x in normal):
                raise InvalidParameter(f"normal {normal} is not integral")
            if not any(normal):
                raise InvalidParameter("normals must be nonzero")
            g = math.gcd(*[int(x) for x in normal])
            prim = tuple(int(x) // g for x in normal)
            rows.append((prim, _to_fraction(offset) / g))
        self.k = k
        self._all = rows
        self.constraints = self._prune(rows)
        if len(self.constraints) > 0:
            ok, _ = self._feasible_point((), self.constraints)
            if not ok:
                raise InvalidParameter("polyhedral set is empty")
        self.witness = self.relint_point(self.implicit_equalities())

    @property
    def normals(self):
        return np.array([n for n, _ in self.constraints], dtype=float).reshape(-1, self.k)

    @property
    def offsets(self):
        return np.array([float(c) for _, c in self.constraints])

    def _system(self, equal, rows):
        A_ub, b_ub, A_eq, b_eq = [], [], [], []
        for j, (N, c) in enumerate(rows):
            if j in equal:
                A_eq.append(list(N) + [0.0])
                b_eq.append(float(c))
            else:
                # ⟨η, N⟩ − s ≥ c  ⇔  −⟨η, N⟩ + s ≤ −c
                A_ub.append([-x for x in N] + [1.0])
                b_ub.append(-float(c))
        return A_ub, b_ub, A_eq, b_eq

    def _feasible_point(self, equal, rows):
        """Max-slack point with ``equal`` tight; ``(slack > LP_TOL, x)``."""
        A_ub, b_ub, A_eq, b_eq = self._system(set(equal), rows)
        val, x = _lp_max([0.0] * self.k + [1.0], A_ub, b_ub, A_eq, b_eq, self.k)
        if val is None:
            return False, None
        return val > -LP_TOL, x

    def _prune(self, rows):
        # identical normals: keep the tighter offset
        best = {}
        for N, c in rows:
            if N not in best or c > best[N]:
                best[N] = c
        rows = list(best.items())
        keep = list(range(len(rows)))
        for j in range(len(rows)):
            others = [rows[i] for i in keep if i != j]
            if not others:
                continue
            A_ub = [[-x for x in N] for N, _ in others]
            b_ub = [-float(c) for _, c in others]
            res = linprog(np.array(rows[j][0], dtype=float), A_ub=A_ub, b_ub=b_ub,
                          bounds=[(None, None)] * self.k, method="highs")
            if res.status == 0 and res.fun >= float(rows[j][1]) - LP_TOL:
                keep.remove(j)
        return [rows[i] for i in keep]

    def contains(self, eta, tol=FACE_TOL):
        eta = np.asarray(eta, dtype=float)
        return all(float(np.dot(eta, N)) - float(c) >= -tol * (1 + abs(float(c)))
                   for N, c in self.constraints)

    def closure(self, active):
        """All constraints forced tight once ``active`` are tight (None if infeasible)."""
        active = set(active)
        ok, x = self._feasible_point(active, self.constraints)
        if not ok:
            return None
        while True:
            ok, x = self._feasible_point(active, self.constraints)
            A_ub, b_ub, A_eq, b_eq = self._system(active, self.constraints)
            s = x[-1] if x is not None else 0.0
            if s > LP_TOL or len(active) == len(self.constraints):
                return tuple(sorted(active))
            forced = set()
            for j, (N, c) in enumerate(self.constraints):
                if j in active:
                    continue
                # drop the slack variable: ⟨η, N_i⟩ ≥ c_i for the rest
                A = [row[:-1] + [0.0] for row in A_ub]
                val, _ = _lp_max(list(N) + [0.0], A, b_ub, A_eq, b_eq, self.k)
                if val is not None and val - float(c) <= LP_TOL * (1 + abs(float(c))):
                    forced.add(j)
            if not forced:
                return tuple(sorted(active))
            active |= forced

    def implicit_equalities(self):
        return self.closure(())

    def relint_point(self, active):
        """Exact rational point tight on ``active`` and strict on every other row."""
        ok, x = self._feasible_point(active, self.constraints)
        if not ok:
            raise InvalidParameter(f"active set {active} is infeasible")
        eta = [Fraction(float(v)).limit_denominator(10 ** 9) for v in x[:-1]]
        eta = _project_exact(eta, [self.constraints[j] for j in active])
        return tuple(eta)

    def face_dim(self, active):
        return self.k - lattice.rank([self.constraints[j][0] for j in active])

    def to_dict(self):
        return {"dimension": self.k,
                "constraints": [{"normal": list(N), "offset": _num(c)}
                                for N, c in self.constraints]}


def _num(c):
    return int(c) if c.denominator == 1 else float(c)


def _project_exact(eta, rows):
    """Smallest exact correction making ``⟨η, N⟩ = c`` for the given rows."""
    if not rows:
        return eta
    k = len(eta)
    # Gaussian elimination on N δ = c − N η over ℚ, free variables set to zero
    M = [[Fraction(x) for x in N] + [c - sum(Fraction(a) * b for a, b in zip(N, eta))]
         for N, c in rows]
    piv_cols, r = [], 0
    for col in range(k):
        piv = next((i for i in range(r, len(M)) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        M[r] = [v / M[r][col] for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][col] != 0:
                f = M[i][col]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        piv_cols.append(col)
        r += 1
    delta = [Fraction(0)] * k
    for i, col in enumerate(piv_cols):
        delta[col] = M[i][-1]
    return [a + b for a, b in zip(eta, delta)]


def load_polyhedral(source):
    """Read ``{dimension, constraints: [{normal, offset}]}`` from a path, string or mapping."""
    if isinstance(source, dict):
        data = source
    else:
        text = str(source)
        if text.lstrip().startswith("{"):
            data = json.loads(text)
        else:
            with open(text, encoding="utf-8") as fh:
                data = json.load(fh)
    try:
        cons = [(c["normal"], c["offset"]) for c in data["constraints"]]
        return PolyhedralSet(data["dimension"], cons)
    except (KeyError, TypeError) as exc:
        raise InvalidParameter(f"malformed polyhedral description: {exc}") from None


def face_of(delta, eta):
    """The open face containing ``η``.

    Rational ``η`` (ints or Fractions) is classified exactly; floats use the
    relative tolerance ``1e-10 (1 + |c_j|)``.
    """
    if len(eta) != delta.k:
        raise OutsidePolytope("point has the wrong dimension", operation="face_of")
    exact = all(isinstance(x, (int, Fraction)) for x in eta)
    active = []
    for j, (N, c) in enumerate(delta.constraints):
        if exact:
            gap = sum(Fraction(a) * b for a, b in zip(eta, N)) - c
            if gap < 0:
                raise OutsidePolytope(f"constraint {j} violated", operation="face_of")
            tight = gap == 0
        else:
            gap = float(np.dot(np.asarray(eta, dtype=float), N)) - float(c)
            tol = FACE_TOL * (1 + abs(float(c)))
            if gap < -tol:
                raise OutsidePolytope(f"constraint {j} violated by {-gap:.3g}",
                                      operation="face_of")
            tight = abs(gap) <= tol
        if tight:
            active.append(j)
    active = tuple(active)
    return Face(active, tuple(eta), delta.face_dim(active))


def enumerate_faces(delta, max_constraints=MAX_CONSTRAINTS):
    """All nonempty faces, breadth first from the relative interior."""
    if len(delta.constraints) > max_constraints:
        raise TooLarge(f"{len(delta.constraints)} constraints exceed the budget of "
                       f"{max_constraints}", operation="enumerate_faces")
    start = delta.implicit_equalities()
    seen = {start}
    queue = deque([start])
    while queue:
        active = queue.popleft()
        for j in range(len(delta.constraints)):
            if j in active:
                continue
            closed = delta.closure(set(active) | {j})
            if closed is not None and closed not in seen:
                seen.add(closed)
                queue.append(closed)
    faces = [Face(a, delta.relint_point(a), delta.face_dim(a)) for a in seen]
    return sorted(faces, key=lambda f: (-f.dim, len(f.active), f.active))


@dataclass(frozen=True)
class IsotropyAlgebra:
    """Integer lattice basis (rows) of the annihilator of a face's direction space."""

    basis: tuple
    k: int

    @property
    def rank(self):
        return len(self.basis)

    def contains(self, v):
        return lattice.in_lattice(v, [list(b) for b in self.basis], self.k)

    def sublattice_of(self, other):
        return all(other.contains(b) for b in self.basis)


def isotropy(delta, face):
    """Lattice of the isotropy algebra ``g_E`` of a face."""
    normals = [list(delta.constraints[j][0]) for j in face.active]
    directions = lattice.integer_kernel(normals, delta.k) if normals else \
        [[int(i == j) for j in range(delta.k)] for i in range(delta.k)]
    annihilator = lattice.integer_kernel(directions, delta.k) if directions else \
        [[int(i == j) for j in range(delta.k)] for i in range(delta.k)]
    basis = lattice.echelon_basis(annihilator, delta.k)
    return IsotropyAlgebra(tuple(tuple(b) for b in basis), delta.k)


def stratification(delta):
    """Report rows ``{face, dim, isotropy_rank, witness}`` for every face."""
    return [f.to_dict(isotropy(delta, f).rank) for f in enumerate_faces(delta)]


# ---------------------------------------------------------------------------
# torus cut problems

@dataclass(frozen=True)
class TorusCutProblem:
    """Cut of a toric chart of ``M`` by ``T^k`` against a product of radial factors.

    ``weights`` is the ``k × n`` integer matrix of the action on ``M``;
    ``radials`` and ``levels`` give the X factors.  ``delta`` defaults to the
    moment polytope ``{η_a ≤ λ_a}`` of the X model.
    """

    potential: object
    weights: tuple
    radials: tuple
    levels: tuple
    delta: PolyhedralSet | None = field(default=None, compare=False)

    def __post_init__(self):
        W = [tuple(row) for row in self.weights]
        if not W or any(len(r) != self.potential.n for r in W):
            raise InvalidParameter("weight matrix must be k x n")
        if any(int(x) != x for r in W for x in r):
            raise Unsupported("non-integral weights", operation="torus_cut")
        object.__setattr__(self, "weights", tuple(tuple(int(x) for x in r) for r in W))
        object.__setattr__(self, "radials", tuple(self.radials))
        object.__setattr__(self, "levels", tuple(float(x) for x in self.levels))
        if len(self.radials) != self.k or len(self.levels) != self.k:
            raise InvalidParameter("need one radial factor and one level per torus factor")
        if self.delta is None:
            cons = [([-int(a == b) for b in range(self.k)], -Fraction(lam))
                    for a, lam in enumerate(self.levels)]
            object.__setattr__(self, "delta", PolyhedralSet(self.k, cons))
        elif self.delta.k != self.k:
            raise InvalidParameter("polyhedral set dimension differs from the torus rank")

    @property
    def k(self):
        return len(self.weights)

    @property
    def W(self):
        return np.array(self.weights, dtype=float)

    @property
    def profiles(self):
        return [moment_profile(r) for r in self.radials]


def m_moment(p, m):
    """M-side moment ``φ_a(m) = Σ_j W_aj t_j ∂ρ/∂t_j``."""
    t = np.abs(np.asarray(m, dtype=complex)) ** 2
    return p.W @ (t * p.potential.grad(t))


def x_moment(p, x):
    """X-side moment ``Ψ_a(x) = λ_a − H_a(|x_a|²)``."""
    u = np.abs(np.asarray(x, dtype=complex)) ** 2
    return np.array([lam - float(prof.H(ua)) for lam, prof, ua in zip(p.levels, p.profiles, u)])


def combined_moment(p, m, x, t=None):
    """``Φ(exp(t)·(m, x)) = φ − Ψ``."""
    m = np.asarray(m, dtype=complex)
    x = np.asarray(x, dtype=complex)
    if t is not None:
        t = np.asarray(t, dtype=float)
        m = m * np.exp(np.clip(p.W.T @ t, -_CLIP / 2, _CLIP / 2))
        x = x * np.exp(np.clip(t, -_CLIP / 2, _CLIP / 2))
    return m_moment(p, m) - x_moment(p, x)


def _moment_face(p, m):
    eta = m_moment(p, m)
    return eta, face_of(p.delta, [float(v) for v in eta])


def stratum_label(p, m, m2):
    """``"equivalent"`` when ``m2`` lies on the ``G_E``-orbit of ``m`` with the same moment."""
    m = np.asarray(m, dtype=complex)
    m2 = np.asarray(m2, dtype=complex)
    eta, face = _moment_face(p, m)
    eta2, _ = _moment_face(p, m2)
    if np.max(np.abs(eta - eta2)) >= MOMENT_TOL:
        return "distinct"
    supp = m != 0
    if np.any(supp != (m2 != 0)):
        return "distinct"
    a, b = np.abs(m[supp]), np.abs(m2[supp])
    if np.any(np.abs(a - b) > MOMENT_TOL * np.maximum(1.0, a)):
        return "distinct"
    basis = [list(r) for r in isotropy(p.delta, face).basis]
    J = np.flatnonzero(supp)
    delta = np.angle(m[J] / m2[J]) / (2 * math.pi)
    # solvable iff y·δ ∈ ℤ for every integer y in the left kernel of C = (B W_J)ᵀ
    C = lattice.transpose(lattice.matmul(basis, [[row[j] for j in J] for row in p.weights]),
                          len(J)) if basis else [[] for _ in J]
    Ct = lattice.transpose(C, 0) if basis else []
    left = lattice.integer_kernel(Ct, len(J)) if basis else \
        [[int(i == j) for j in range(len(J))] for i in range(len(J))]
    for y in left:
        val = float(np.dot(y, delta))
        if abs(val - round(val)) > MOMENT_TOL:
            return "distinct"
    return "equivalent"


@dataclass(frozen=True)
class SmoothnessVerdict:
    smooth: bool
    kind: str
    order: int | None = None
    witness: tuple | None = None

    def __bool__(self):
        return self.smooth


def smoothness_check(p, m):
    """Whether ``G_E`` acts freely at ``m`` (trivial ``G_E ∩ G_m``).

    Non-free points are reported as ``continuous`` (a circle subgroup, witness
    a generator of its Lie algebra) or ``finite`` (witness the order of the
    finite stabilizer, detected by a lattice index).
    """
    if not hasattr(p.potential, "grad"):
        raise Unsupported("smoothness needs a toric M-model", operation="smoothness_check")
    m = np.asarray(m, dtype=complex)
    _, face = _moment_face(p, m)
    basis = [list(r) for r in isotropy(p.delta, face).basis]
    r = len(basis)
    if r == 0:
        return SmoothnessVerdict(True, "smooth")
    J = np.flatnonzero(m != 0)
    # C a ∈ ℤ^J describes G_E ∩ G_m in the coordinates a ∈ ℝ^r / ℤ^r of G_E
    C = [[sum(basis[q][i] * p.weights[i][j] for i in range(p.k)) for q in range(r)] for j in J]
    if lattice.rank(C) < r:
        kernel = lattice.integer_kernel(C, r) if C else [[int(i == q) for q in range(r)]
                                                         for i in range(r)]
        gen = [sum(kernel[0][q] * basis[q][i] for q in range(r)) for i in range(p.k)]
        return SmoothnessVerdict(False, "continuous", None, tuple(lattice.primitive(gen)))
    d = lattice.maximal_minor_gcd(C, r)
    if d > 1:
        return SmoothnessVerdict(False, "finite", d, (d,))
    return SmoothnessVerdict(True, "smooth")


@dataclass(frozen=True)
class KempfNessResult:
    status: str
    t: np.ndarray
    residual: float
    iterations: int


def _kn_parts(p, m, x, t):
    tau_m = np.abs(m) ** 2 * np.exp(np.clip(2.0 * p.W.T @ t, -_CLIP, _CLIP))
    u = np.abs(x) ** 2 * np.exp(np.clip(2.0 * t, -_CLIP, _CLIP))
    rho1 = p.potential.grad(tau_m)
    rho2 = p.potential.t_hessian(tau_m)
    phi = p.W @ (tau_m * rho1)
    H = np.array([float(prof.H(ua)) for prof, ua in zip(p.profiles, u)])
    H1 = np.array([float(prof.H1(ua)) for prof, ua in zip(p.profiles, u)])
    Phi = phi + H - np.array(p.levels)
    Wt = p.W * tau_m
    J = 2.0 * (p.W @ np.diag(tau_m * rho1) @ p.W.T + Wt @ rho2 @ Wt.T) + np.diag(2.0 * u * H1)
    f = float(p.potential.value(tau_m)) + sum(float(r.F(ua)) for r, ua in zip(p.radials, u)) \
        - 2.0 * float(np.dot(p.levels, t))
    return Phi, J, f


def kempf_ness_solve(p, m, x, budget=200, *, tol=1e-12, max_step=50.0):
    """Solve ``Φ(exp(t)·(m, x)) = 0`` by damped Newton on the Kempf–Ness functional.

    The functional ``f(t) = ρ(e^{Wᵀt}m) + Σ F_a(e^{2t_a}|x_a|²) − 2⟨λ, t⟩`` is
    convex with gradient ``2Φ`` and Hessian ``2J``, so Newton steps with
    backtracking on ``f`` are monotone.  A run is classified ``unstable`` once
    ``|t| > 1e3`` while the residual stays above 1e-8 and improves by less
    than a factor 1e-3 per step.  A run whose Newton step drops below the
    resolution of ``t`` with residual under 1e-9 is accepted as ``stable``.

    Raises
    ------
    Inconclusive
        When the budget runs out before convergence or a stall verdict.
    """
    m = np.asarray(m, dtype=complex)
    x = np.asarray(x, dtype=complex)
    t = np.zeros(p.k)
    Phi, J, f = _kn_parts(p, m, x, t)
    res = float(np.linalg.norm(Phi))
    goal = tol * max(1.0, float(np.max(np.abs(p.levels))))
    for it in range(1, budget + 1):
        if res <= goal:
            return KempfNessResult("stable", t, res, it - 1)
        damp = 1e-12 * max(1.0, float(np.trace(J)))
        step = -np.linalg.solve(J + damp * np.eye(p.k), Phi)
        norm = float(np.linalg.norm(step))
        if res <= 1e-9 and norm <= 1e-14 * (1.0 + float(np.linalg.norm(t))):
            # residual is at the rounding floor of the moment terms
            return KempfNessResult("stable", t, res, it - 1)
        if norm > max_step:
            step *= max_step / norm
        slope = 2.0 * float(Phi @ step)
        alpha = 1.0
        while True:
            t_new = t + alpha * step
            Phi_new, J_new, f_new = _kn_parts(p, m, x, t_new)
            if f_new <= f + 1e-4 * alpha * slope or alpha < 1e-12:
                break
            # near the root the decrease in f is below its rounding error
            if (abs(f_new - f) <= 1e-13 * (1.0 + abs(f))
                    and np.linalg.norm(Phi_new) < res):
                break
            alpha *= 0.5
        res_new = float(np.linalg.norm(Phi_new))
        progress = (res - res_new) / res if res > 0 else 0.0
        t, Phi, J, f, res = t_new, Phi_new, J_new, f_new, res_new
        if np.linalg.norm(t) > 1e3 and res > 1e-8 and progress < 1e-3:
            return KempfNessResult("unstable", t, res, it)
    if res <= goal:
        return KempfNessResult("stable", t, res, budget)
    raise Inconclusive(f"no verdict after {budget} iterations (residual {res:.3g})",
                       operation="kempf_ness_solve")


def kempf_ness_t(p, m, x, budget=200):
    """The solution ``t`` or :class:`NotSemistable` for unstable inputs."""
    out = kempf_ness_solve(p, m, x, budget)
    if out.status == "unstable":
        raise NotSemistable("the complex torus orbit misses the zero level",
                            operation="kempf_ness_solve")
    return out.t
