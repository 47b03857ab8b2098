"""Disk-chain analytic continuation of period integrals along the real axis.

For two surfaces ``E1, E2`` and a weight ``n`` the integrand on a real
interval ``(a, b)`` between consecutive singular points is the vector

    f(t) = t^n * (P_1^(1) P_1^(2), P_1^(1) P_2^(2), P_2^(1) P_1^(2), P_2^(1) P_2^(2))(t)

(the ``uu, uv, vu, vv`` ordering), where ``P_u^(j)`` are the elliptic
periods in the interval-adapted root basis.  Every component satisfies the
minimal operator ``Phi`` of the hypergeometric seed, and its primitive
satisfies ``Phi'``.  The pipeline per interval is:

1. local Frobenius basis ``F`` of ``Phi`` at ``a``; coefficients ``f = C F``
   from a few direct period evaluations near ``a``;
2. primitive ``Q = C G`` (``G`` the term-wise primitives, vanishing at ``a``);
3. continuation of ``Q = D_0 + sum D_i G_i`` through a chain of disks in the
   closed upper half-plane, matching ``d+1`` derivatives at one point per hop;
4. at ``b`` (Frobenius basis again): ``q^{ab} = Q(b) = D_0`` and the
   continued coefficients ``C_old`` of ``f`` in the basis at ``b``.

Comparing ``C_old`` with coefficients obtained from direct evaluations just
right of ``b`` gives the integer transformation matrix ``M_b`` (so that the
next interval's integrand is ``M_b f``); conjugating the local monodromy of
the Frobenius basis gives ``N_b``.  Intervals adjacent to infinity are
computed in the chart ``w = -1/z``; the integrand ``(-w)^(2k-2-n) f_w dw``
agrees with ``z^n f dz`` there, so no rescaling between charts is needed.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import mpmath as mp

from .errors import (
    ConsistencyFailure,
    DegenerateSamples,
    InvalidParameter,
    InvalidSeedCenter,
    NotAdjacent,
    OutsideSchoenHypotheses,
    PrecisionExhausted,
)
from .numerics import PrecisionContext, RatPoly, is_exact, to_mp
from .ode import (
    LinearODE,
    RegularSolution,
    antiderivative_ode,
    find_min_ode,
    frobenius_basis,
    holomorphic_solutions,
)
from .surface import SigmaPoint, WeierstrassSurface, branch_signs, elliptic_period, seed_series_mod

#: Bounds of the per-hop contraction factor theta (matching point at distance
#: theta * R from a center whose series converges in radius R).
THETA_MIN = 0.02
THETA_MAX = 0.4
#: Disk radius reported in plans, as a fraction of the distance to the
#: nearest singular point.
DISK_RADIUS_FACTOR = 0.75
#: Spread of the direct-evaluation sample points near an endpoint.
SAMPLE_FRACTION = 0.05

PRODUCT_LABELS = ("uu", "uv", "vu", "vv")
#: Relative position of the point fixing the square-root branches of an interval.
REFERENCE_FRACTION = mp.mpf(1) / 1000


def reference_point(a, b):
    """Point near the left end of ``(a, b)`` at which period branches are fixed."""
    a, b = to_mp(a), to_mp(b)
    return a + (b - a) * REFERENCE_FRACTION


def convergence_factor(ctx: PrecisionContext) -> float:
    """``theta`` with ``theta ** series_order ~ 10 ** -(working digits + 5)``."""
    theta = 10 ** (-(ctx.working_digits + 5) / ctx.series_order)
    return min(THETA_MAX, max(THETA_MIN, theta))


# ---------------------------------------------------------------------------
# singular points of an operator (low precision, for planning)
# ---------------------------------------------------------------------------

_ROOT_CACHE: dict = {}


def operator_singularities(ode: LinearODE) -> list:
    """Roots of the leading coefficient as Python complex numbers."""
    key = ode.leading.coeffs
    hit = _ROOT_CACHE.get(key)
    if hit is not None:
        return hit
    import sympy

    z = sympy.Symbol("z")
    poly = sympy.Poly(ode.leading.to_sympy(z), z)
    out = []
    for fac, _mult in poly.factor_list()[1]:
        for r in fac.nroots(n=30, maxsteps=200):
            out.append(complex(r))
    _ROOT_CACHE[key] = out
    return out


# ---------------------------------------------------------------------------
# path planning
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PathPlan:
    """Chain of disks from ``a`` to ``b`` (chart coordinates, ``a < b``)."""

    a: float
    b: float
    centers: tuple  # complex (endpoints exactly a and b)
    radii: tuple  # DISK_RADIUS_FACTOR * distance to the nearest singular point
    matching: tuple  # one matching point per hop
    detours: tuple  # (t, h): triangle through t - h, t + i h, t + h
    theta: float

    def __len__(self) -> int:
        return len(self.centers)


def _distance_to_singular(x: complex, sing: Sequence[complex], exclude: complex | None = None) -> float:
    best = math.inf
    for s in sing:
        d = abs(x - s)
        if exclude is not None and abs(s - exclude) < 1e-12:
            continue
        if d < 1e-14:
            continue
        best = min(best, d)
    return best


def plan_path(a, b, ode_or_singularities, theta: float = 0.25, sigma: Sequence | None = None) -> PathPlan:
    """Plan a disk chain from ``a`` to ``b`` through the closed upper half-plane.

    Real singular points strictly between ``a`` and ``b`` (apparent ones of
    the operator) are passed above along a small triangle.  Consecutive
    centers ``c, c'`` satisfy ``|c - c'| <= theta (R(c) + R(c'))`` and are
    matched at ``c + (c' - c) R(c) / (R(c) + R(c'))``.  If ``sigma`` (the
    real singular fibers) is given, ``a`` and ``b`` must be consecutive in it.
    """
    a, b = float(to_mp(a)), float(to_mp(b))
    if not a < b:
        raise NotAdjacent("interval endpoints must satisfy a < b", a=a, b=b)
    if sigma is not None:
        inside = [s for s in sigma if a + 1e-12 < s < b - 1e-12]
        if inside:
            raise NotAdjacent("singular fiber strictly inside the interval", a=a, b=b, inside=inside)
    if isinstance(ode_or_singularities, LinearODE):
        sing = operator_singularities(ode_or_singularities)
    else:
        sing = [complex(s) for s in ode_or_singularities]
    sing = list(sing) + [complex(a), complex(b)]
    interior = sorted(s.real for s in sing if abs(s.imag) < 1e-12 and a + 1e-12 < s.real < b - 1e-12)
    vertices: list = [complex(a)]
    detours = []
    for t in interior:
        h = 0.5 * _distance_to_singular(complex(t), sing, exclude=complex(t))
        detours.append((t, h))
        vertices += [complex(t - h), complex(t, h), complex(t + h)]
    vertices.append(complex(b))

    def R(x: complex) -> float:
        return _distance_to_singular(x, sing)

    R_end = {complex(a): _distance_to_singular(complex(a), sing, exclude=complex(a)),
             complex(b): _distance_to_singular(complex(b), sing, exclude=complex(b))}

    def Rc(x: complex) -> float:
        return R_end.get(x, None) or R(x)

    # walk along the polyline
    seg = 0
    pos = vertices[0]
    centers = [pos]
    matching = []
    guard = 0
    while centers[-1] != vertices[-1]:
        guard += 1
        if guard > 100000:  # pragma: no cover
            raise PrecisionExhausted("path planning did not terminate", a=a, b=b)
        c = centers[-1]
        rc = Rc(c)
        target = vertices[-1]
        if abs(c - target) <= theta * (rc + Rc(target)):
            nxt = target
        else:
            nxt = None
            step_seg, step_pos = seg, pos
            ds = theta * rc / 16
            while True:
                # advance along the polyline by ds
                remaining = ds
                s_seg, s_pos = step_seg, step_pos
                while remaining > 0 and s_seg < len(vertices) - 1:
                    end = vertices[s_seg + 1]
                    left = abs(end - s_pos)
                    if left <= remaining:
                        remaining -= left
                        s_seg += 1
                        s_pos = end
                    else:
                        s_pos = s_pos + (end - s_pos) * (remaining / left)
                        remaining = 0
                if s_seg >= len(vertices) - 1:
                    s_pos = vertices[-1]
                if abs(c - s_pos) <= theta * (rc + R(s_pos)) and s_pos != vertices[-1]:
                    nxt, seg, pos = s_pos, s_seg, s_pos
                    step_seg, step_pos = s_seg, s_pos
                    continue
                break
            if nxt is None:
                raise PrecisionExhausted("cannot advance the disk chain", at=str(c))
        rn = Rc(nxt)
        matching.append(c + (nxt - c) * (rc / (rc + rn)))
        centers.append(nxt)
    radii = tuple(DISK_RADIUS_FACTOR * Rc(c) for c in centers)
    return PathPlan(a, b, tuple(centers), radii, tuple(matching), tuple(detours), theta)


# ---------------------------------------------------------------------------
# integrands and local coefficient matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChartData:
    """Both surfaces, the operator and the weight factor in one chart."""

    name: str  # "z" or "w"
    s1: WeierstrassSurface
    s2: WeierstrassSurface
    phi: LinearODE
    weight_exponent: int
    weight_sign: int  # weight factor is (weight_sign * t) ** weight_exponent
    signs: tuple = ((1, 1), (1, 1))  # square-root branch signs per surface and period

    def for_interval(self, a, b) -> "ChartData":
        """Copy with the square-root branches fixed near the left end ``a``."""
        t = reference_point(a, b)
        return replace(self, signs=(branch_signs(self.s1, t), branch_signs(self.s2, t)))

    def weight(self, t):
        if self.weight_exponent == 0:
            return mp.mpf(1)
        return (self.weight_sign * t) ** self.weight_exponent

    def integrand(self, t) -> list:
        """The four weighted period products at a real point ``t``."""
        (a1, a2), (b1, b2) = self.signs
        p1 = [a1 * elliptic_period(self.s1, t, 1), a2 * elliptic_period(self.s1, t, 2)]
        if self.s2 is self.s1 and self.signs[0] == self.signs[1]:
            p2 = p1
        else:
            p2 = [b1 * elliptic_period(self.s2, t, 1), b2 * elliptic_period(self.s2, t, 2)]
        w = self.weight(t)
        return [p1[0] * p2[0] * w, p1[0] * p2[1] * w, p1[1] * p2[0] * w, p1[1] * p2[1] * w]


def chart_point(p: SigmaPoint, chart: str):
    """Coordinate of a singular point in the given chart (exact when rational)."""
    if chart == "z":
        if p.is_infinity:
            raise InvalidParameter("infinity has no z-coordinate")
        return p.exact if p.is_rational else p.value()
    if p.is_infinity:
        return Fraction(0)
    if p.is_rational:
        if p.exact == 0:
            raise InvalidParameter("0 has no w-coordinate")
        return -1 / p.exact
    return -1 / p.value()


class _Basis:
    """Solutions at one center with derivative chains and primitives."""

    def __init__(self, sols: list, order: int):
        self.sols = sols
        self.d = order
        self.chains = []
        for s in sols:
            chain = [s]
            for _ in range(order - 1):
                chain.append(chain[-1].derivative())
            self.chains.append(chain)
        self.prims = [s.primitive() for s in sols]
        self.center = sols[0].center

    def values(self, t, log_value=None) -> list:
        return [s.evaluate(t, log_value) for s in self.sols]

    def jet_matrix(self, m):
        """Rows: basis (1, G_1..G_d); columns: derivative orders 0..d of the primitive."""
        d = self.d
        J = mp.matrix(d + 1, d + 1)
        J[0, 0] = 1
        for i in range(d):
            J[i + 1, 0] = self.prims[i].evaluate(m)
            for j in range(d):
                J[i + 1, j + 1] = self.chains[i][j].evaluate(m)
        return J

    def wronskian(self, t, log_value=None):
        d = self.d
        W = mp.matrix(d, d)
        for i in range(d):
            for j in range(d):
                W[i, j] = self.chains[i][j].evaluate(t, log_value)
        return W


def _solve_coefficients(chart: ChartData, basis: _Basis, points: Sequence, check_point):
    """``C`` (4 x d) with ``f(t) = C F(t)`` from direct evaluations at ``points``."""
    d = basis.d
    Fm = mp.matrix(d, d)
    Y = mp.matrix(d, 4)
    for i, t in enumerate(points):
        vals = basis.values(t)
        for j in range(d):
            Fm[i, j] = vals[j]
        fv = chart.integrand(t)
        for r in range(4):
            Y[i, r] = fv[r]
    try:
        X = mp.inverse(Fm) * Y  # Fm X = Y -> X = C^T
    except (ZeroDivisionError, ValueError):
        raise DegenerateSamples("interpolation matrix is singular")
    C = mp.matrix(4, d)
    for r in range(4):
        for j in range(d):
            C[r, j] = X[j, r]
    # consistency at a point not used for the fit
    vals = basis.values(check_point)
    fv = chart.integrand(check_point)
    err = max(abs(sum(C[r, j] * vals[j] for j in range(d)) - fv[r]) for r in range(4))
    scale = max(abs(v) for v in fv)
    return C, err / max(scale, mp.mpf(1))


def _sample_points(center, R: float, theta: float, d: int, side: int):
    delta = min(SAMPLE_FRACTION, theta / 1.75) * R
    c = to_mp(center)
    pts = [c + side * mp.mpf(delta) * (1 + mp.mpf(i) / 4) for i in range(d)]
    check = c + side * mp.mpf(delta) * (1 + mp.mpf(1) / 8)
    return pts, check


# ---------------------------------------------------------------------------
# one interval
# ---------------------------------------------------------------------------


@dataclass
class IntervalData:
    """Raw continuation results for one interval (in its own chart)."""

    label: str
    chart: str
    q: list
    C_start: object  # f = C_start F^a just right of a
    C_end: object  # continued coefficients at b (left side, via upper half-plane)
    C_end_direct: object  # direct left-side fit at b (check only)
    C_right_of_end: object  # fit just right of b in this chart (for M_b)
    plan: PathPlan
    residuals: dict = field(default_factory=dict)


def interval_partials(
    chart: ChartData,
    a,
    b,
    ctx: PrecisionContext,
    basis_a: _Basis | None = None,
    basis_b: _Basis | None = None,
    label: str = "",
    plan: PathPlan | None = None,
    next_signs: tuple | None = None,
) -> IntervalData:
    """Partial-result vector ``q^{ab}`` and local coefficient data for ``(a, b)``.

    ``a < b`` are chart coordinates of consecutive singular points.  The
    returned ``q`` lists ``int_a^b f(t) dt`` for the four products.
    ``chart.signs`` fixes the period branches on this interval and
    ``next_signs`` those of the following interval (used for the fit just
    right of ``b``); both default to the branches fixed near each left end.
    """
    if chart.signs == ChartData.signs:
        chart = chart.for_interval(a, b)
    phi = chart.phi
    d = phi.order
    theta = convergence_factor(ctx)
    if plan is None:
        plan = plan_path(a, b, phi, theta)
    N = ctx.series_order
    if basis_a is None:
        basis_a = _Basis(frobenius_basis(phi, a, N), d)
    if basis_b is None:
        basis_b = _Basis(frobenius_basis(phi, b, N), d)
    Ra = plan.radii[0] / DISK_RADIUS_FACTOR
    Rb = plan.radii[-1] / DISK_RADIUS_FACTOR
    residuals = {}

    pts, chk = _sample_points(a, Ra, theta, d, +1)
    C_start, res = _solve_coefficients(chart, basis_a, pts, chk)
    residuals["fit_start"] = res

    # Q = D [1, G_1..G_d]^T with D = [0 | C_start] at a
    D = mp.matrix(4, d + 1)
    for r in range(4):
        for j in range(d):
            D[r, j + 1] = C_start[r, j]
    current = basis_a
    for k, m in enumerate(plan.matching):
        nxt_c = plan.centers[k + 1]
        if k + 1 == len(plan.centers) - 1:
            nxt = basis_b
        else:
            cen = mp.mpc(nxt_c.real, nxt_c.imag) if nxt_c.imag else mp.mpf(nxt_c.real)
            nxt = _Basis(holomorphic_solutions(phi, cen, N, radius_hint=plan.radii[k + 1]), d)
        mm = mp.mpc(m.real, m.imag)
        J_old = current.jet_matrix(mm)
        J_new = nxt.jet_matrix(mm)
        D = D * J_old * mp.inverse(J_new)
        current = nxt
    q = [D[r, 0] for r in range(4)]
    C_end = mp.matrix(4, d)
    for r in range(4):
        for j in range(d):
            C_end[r, j] = D[r, j + 1]

    pts, chk = _sample_points(b, Rb, theta, d, -1)
    C_end_direct, res = _solve_coefficients(chart, basis_b, pts, chk)
    residuals["fit_end_left"] = res
    scale = max(abs(x) for x in C_end_direct)
    residuals["continuation_vs_direct"] = max(abs(x) for x in (C_end - C_end_direct)) / max(scale, 1)

    pts, chk = _sample_points(b, Rb, theta, d, +1)
    if next_signs is None:
        far = to_mp(b) + (to_mp(b) - to_mp(a))
        next_signs = chart.for_interval(b, far).signs
    C_right, res = _solve_coefficients(replace(chart, signs=next_signs), basis_b, pts, chk)
    residuals["fit_end_right"] = res
    return IntervalData(label, chart.name, q, C_start, C_end, C_end_direct, C_right, plan, residuals)


# ---------------------------------------------------------------------------
# integer matrices from coefficient matrices
# ---------------------------------------------------------------------------

SYM_ROWS = (0, 1, 3)  # uu, uv, vv rows used when the operator has order 3


def _round_integer_matrix(A, tol):
    out = []
    worst = mp.mpf(0)
    for i in range(A.rows):
        row = []
        for j in range(A.cols):
            x = A[i, j]
            n = int(mp.nint(mp.re(x)))
            worst = max(worst, abs(x - n))
            row.append(n)
        out.append(row)
    if worst > tol:
        raise PrecisionExhausted("matrix entries are not integral", residual=mp.nstr(worst, 5))
    return out, worst


def _square_rows(C, rows):
    S = mp.matrix(len(rows), C.cols)
    for i, r in enumerate(rows):
        for j in range(C.cols):
            S[i, j] = C[r, j]
    return S


def kron(A, B) -> list:
    """Kronecker product of integer matrices given as lists."""
    n, m = len(A), len(B)
    return [[A[i // m][j // m] * B[i % m][j % m] for j in range(n * m)] for i in range(n * m)]


def sym2_matrix(B) -> list:
    """Action on (P1^2, P1 P2, P2^2) of ``P -> B P``."""
    (a, b), (c, d) = B
    return [
        [a * a, 2 * a * b, b * b],
        [a * c, a * d + b * c, b * d],
        [c * c, 2 * c * d, d * d],
    ]


def recover_from_sym2(S) -> list:
    """A 2x2 integer ``B`` with ``sym2_matrix(B) == S`` (unique up to sign)."""
    cands = []
    for (i, j) in ((0, 0), (0, 2), (2, 0), (2, 2)):
        v = S[i][j]
        if v < 0:
            raise PrecisionExhausted("symmetric-square matrix has a negative square entry")
        rt = math.isqrt(v)
        if rt * rt != v:
            raise PrecisionExhausted("symmetric-square matrix entry is not a square", entry=v)
        cands.append(rt)
    a0, b0, c0, d0 = cands
    for sa in (1, -1):
        for sb in (1, -1):
            for sc in (1, -1):
                for sd in (1, -1):
                    B = [[sa * a0, sb * b0], [sc * c0, sd * d0]]
                    if sym2_matrix(B) == [list(r) for r in S]:
                        if sa * a0 < 0 or (a0 == 0 and (sb * b0 < 0 or (b0 == 0 and sc * c0 < 0))):
                            continue  # canonical sign: first nonzero entry positive
                        return B
    raise ConsistencyFailure("no 2x2 matrix induces the symmetric-square matrix", failed=("sym2",))


def _integer_action(A_float, d: int, tol) -> tuple:
    """Round a coefficient-space matrix to the 4x4 integer action on products."""
    if d == 4:
        M, res = _round_integer_matrix(A_float, tol)
        return M, res
    if d == 3:
        S, res = _round_integer_matrix(A_float, tol)
        B = recover_from_sym2(S)
        return kron(B, B), res
    raise ConsistencyFailure(f"unsupported operator order {d}", failed=("order",))


def transformation_matrix(C_old, C_new, d: int, tol):
    """Integer ``M`` with ``f_new = M f_old`` given ``f_old = C_old F``, ``f_new = C_new F``."""
    if d == 4:
        A = C_new * mp.inverse(C_old)
    else:
        A = _square_rows(C_new, SYM_ROWS) * mp.inverse(_square_rows(C_old, SYM_ROWS))
    return _integer_action(A, d, tol)


def local_monodromy(basis: _Basis, t):
    """``T`` with ``F(t e^{2 pi i}) = T F(t)`` (counter-clockwise loop)."""
    x = to_mp(t) - to_mp(basis.center)
    lg = mp.log(x) + 2j * mp.pi
    W = basis.wronskian(t)
    Ws = basis.wronskian(t, lg)
    return Ws * mp.inverse(W)


def monodromy_matrix(C, T, d: int, tol):
    """Integer ``N`` with ``f -> N f`` under the loop, given ``f = C F``."""
    if d == 4:
        A = C * T * mp.inverse(C)
    else:
        Cs = _square_rows(C, SYM_ROWS)
        A = Cs * T * mp.inverse(Cs)
    return _integer_action(A, d, tol)


# ---------------------------------------------------------------------------
# integer matrix helpers
# ---------------------------------------------------------------------------


def imat_mul(A, B) -> list:
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def imat_identity(n: int) -> list:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def imat_inverse_unimodular(A) -> list:
    import sympy

    M = sympy.Matrix(A)
    det = M.det()
    if abs(det) != 1:
        raise ConsistencyFailure("matrix is not unimodular", failed=("unimodular",), det=int(det))
    inv = M.inv()
    return [[int(inv[i, j]) for j in range(M.cols)] for i in range(M.rows)]


def imat_vec(A, v) -> list:
    return [sum(A[i][k] * v[k] for k in range(len(v))) for i in range(len(A))]


# ---------------------------------------------------------------------------
# the full cycle of intervals
# ---------------------------------------------------------------------------


@dataclass
class PartialResultSet:
    """All interval and point data of one (example, weight) run.

    ``points`` are the singular points in cyclic order starting with the
    smallest finite one; interval ``i`` runs from ``points[i]`` to
    ``points[i+1]`` (cyclically).  ``q[i]`` is the raw partial-result
    vector of interval ``i`` in its own basis; ``M[i]`` and ``N[i]`` are the
    integer matrices at ``points[i]``; ``r`` and ``Theta`` are the same data
    rebased to interval 0.
    """

    points: list
    order: int
    weight: int
    q: list
    M: list
    N: list
    r: list = field(default_factory=list)
    Theta: list = field(default_factory=list)
    residuals: dict = field(default_factory=dict)
    charts: list = field(default_factory=list)
    interval_residuals: list = field(default_factory=list)

    @property
    def labels(self) -> list:
        return [str(p) for p in self.points]

    def to_record(self) -> dict:
        s = lambda x: _mp_str(x)
        return {
            "points": [p.to_record() for p in self.points],
            "order": self.order,
            "weight": self.weight,
            "q": [[s(x) for x in v] for v in self.q],
            "M": self.M,
            "N": self.N,
            "r": [[s(x) for x in v] for v in self.r],
            "Theta": self.Theta,
            "charts": self.charts,
            "residuals": {k: mp.nstr(v, 5) for k, v in self.residuals.items()},
        }


def _mpf_str(x) -> str:
    # Use the number's own mantissa length, not the ambient precision, so
    # values serialized after leaving a workdps block keep every digit.
    bits = x._mpf_[3] if x else 0
    return mp.nstr(x, max(mp.mp.dps, int(bits * 0.30103) + 3))


def _mp_str(x) -> str:
    if not isinstance(x, (mp.mpc, mp.mpf)):
        x = mp.mpc(x)
    im = x.imag if isinstance(x, mp.mpc) else mp.mpf(0)
    return f"{_mpf_str(x.real)}|{_mpf_str(im)}"


def _mp_parse(s: str):
    re_, im_ = s.split("|")
    return mp.mpc(mp.mpf(re_), mp.mpf(im_))


def adapt_to_base(q: list, M: list, N: list, tol=None) -> tuple:
    """Rebase interval vectors and monodromies to interval 0.

    With ``U_i = M_i M_{i-1} ... M_1`` (``U_0 = I``):
    ``r_i = U_i^{-1} q_i`` and ``Theta_i = U_i^{-1} N_i U_i``.
    Returns ``(r, Theta, residuals)``; raises :class:`ConsistencyFailure`
    listing every identity that fails.
    """
    n = len(q)
    dim = len(M[0])
    U = imat_identity(dim)
    r, Theta = [], []
    for i in range(n):
        if i > 0:
            U = imat_mul(M[i], U)
        Ui = imat_inverse_unimodular(U)
        vec = [sum(Ui[a][b] * q[i][b] for b in range(dim)) for a in range(dim)]
        r.append(vec)
        Theta.append(imat_mul(Ui, imat_mul(N[i], U)))
    failed = []
    residuals = {}
    # product of all transformation matrices around the cycle
    P = imat_identity(dim)
    for i in range(n):
        P = imat_mul(M[i], P)
    residuals["M_cycle"] = 0 if P == imat_identity(dim) else 1
    if P != imat_identity(dim):
        failed.append("M_cycle")
    T = imat_identity(dim)
    for i in range(n):
        T = imat_mul(T, Theta[i])
    residuals["Theta_cycle"] = 0 if T == imat_identity(dim) else 1
    if T != imat_identity(dim):
        failed.append("Theta_cycle")
    total = [sum(r[i][a] for i in range(n)) for a in range(dim)]
    residuals["sum_r"] = max(abs(x) for x in total)
    acc = [mp.mpc(0)] * dim
    prod = imat_identity(dim)
    for i in range(n):
        if i > 0:
            prod = imat_mul(prod, Theta[i])
        v = imat_vec(prod, r[i])
        acc = [acc[a] + v[a] for a in range(dim)]
    residuals["lower_half_plane"] = max(abs(x) for x in acc)
    if tol is not None:
        for key in ("sum_r", "lower_half_plane"):
            if residuals[key] > tol:
                failed.append(key)
    if failed:
        raise ConsistencyFailure("partial-result identities violated", failed=tuple(failed), residuals=residuals)
    return r, Theta, residuals


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------


def singular_points(s1: WeierstrassSurface, s2: WeierstrassSurface) -> list:
    """Union of the singular fibers of both surfaces in cyclic order."""
    pts: list = []
    for s in (s1, s2):
        for f in s.fibers:
            loc = f.location
            if not loc.is_real:
                raise OutsideSchoenHypotheses("singular fiber over a non-real point", point=str(loc))
            if not any(_same_point(loc, p) for p in pts):
                pts.append(loc)
    return sorted(pts, key=SigmaPoint.sort_key)


def _same_point(p: SigmaPoint, q: SigmaPoint) -> bool:
    if p.is_infinity or q.is_infinity:
        return p.is_infinity and q.is_infinity
    if p.minpoly != q.minpoly:
        return False
    with mp.workdps(30):
        return abs(p.value() - q.value()) < 1e-20


def fiber_orders(s: WeierstrassSurface, p: SigmaPoint) -> int:
    for f in s.fibers:
        if _same_point(f.location, p):
            return f.kodaira_n
    return 0


def _seed_center(s1: WeierstrassSurface, s2: WeierstrassSurface) -> Fraction:
    """A rational point (in the chart of ``s1``) singular for both surfaces."""
    cands = []
    for f in s1.fibers:
        loc = f.location
        if loc.is_infinity or not loc.is_rational:
            continue
        c = loc.exact
        if s2.discriminant_poly(c) == 0 and s1.g2(c) != 0 and s2.g2(c) != 0:
            cands.append(c)
    if not cands:
        raise InvalidSeedCenter("the surfaces share no rational singular fiber in this chart")
    return min(cands, key=lambda c: (abs(c), c))


def operator_for_chart(
    s1: WeierstrassSurface, s2: WeierstrassSurface, weight_exponent: int, self_product: bool
) -> LinearODE:
    """Minimal operator of the weighted seed in the chart of ``s1``/``s2``."""
    c = _seed_center(s1, s2)

    def provider(p, n):
        return seed_series_mod(s1, s2, c, n, p, weight=weight_exponent)

    return find_min_ode(provider, center=c)


@dataclass
class ChartSetup:
    z: ChartData
    w: ChartData


def chart_setup(s1: WeierstrassSurface, s2: WeierstrassSurface, weight: int, phi_z=None, phi_w=None) -> ChartSetup:
    k = s1.k
    if s2.k != k:
        raise InvalidParameter("both surfaces must have the same twist degree")
    same = (s1.g2, s1.g3) == (s2.g2, s2.g3)
    s1w, s2w = s1.other_chart(), s2.other_chart()
    if same:
        s2z, s2w_ = s1, s1w
    else:
        s2z, s2w_ = s2, s2w
    if phi_z is None:
        phi_z = operator_for_chart(s1, s2z, weight, same)
    wexp = 2 * k - 2 - weight
    if phi_w is None:
        phi_w = operator_for_chart(s1w, s2w_, wexp, same)
    z = ChartData("z", s1, s2z, phi_z, weight, 1)
    w = ChartData("w", s1w, s2w_, phi_w, wexp, -1)
    return ChartSetup(z, w)


def interval_chart(p: SigmaPoint, q: SigmaPoint) -> str:
    return "w" if (p.is_infinity or q.is_infinity) else "z"


def _interval_coordinates(p: SigmaPoint, q: SigmaPoint, chart: str):
    a, b = chart_point(p, chart), chart_point(q, chart)
    if chart == "w" and not (to_mp(a) < to_mp(b)):
        raise OutsideSchoenHypotheses("interval through infinity would contain z = 0 in the w-chart")
    if chart == "z" and not (to_mp(a) < to_mp(b)):
        raise InvalidParameter("interval endpoints out of order")
    return a, b


def _surfaces_digest(s1: WeierstrassSurface, s2: WeierstrassSurface) -> str:
    rec = [[str(c) for c in s.g2.coeffs] + ["|"] + [str(c) for c in s.g3.coeffs] + [str(s.k)] for s in (s1, s2)]
    return hashlib.sha256(json.dumps(rec).encode()).hexdigest()[:16]


class PartialsCache:
    """Append-only on-disk cache of interval results (JSON, decimal strings)."""

    def __init__(self, root: str | os.PathLike | None):
        self.root = Path(root) if root else None
        if self.root:
            self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, key: dict) -> Path | None:
        if not self.root:
            return None
        h = hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()[:24]
        return self.root / f"{h}.json"

    def get(self, key: dict):
        path = self._path(key)
        if path is None or not path.exists():
            return None
        with open(path) as fh:
            rec = json.load(fh)
        if rec.get("key") != key:
            return None
        return rec["value"]

    def put(self, key: dict, value) -> None:
        path = self._path(key)
        if path is None:
            return
        tmp = path.with_suffix(".tmp")
        with open(tmp, "w") as fh:
            json.dump({"key": key, "value": value}, fh)
        os.replace(tmp, path)

    def entries(self) -> list:
        if not self.root:
            return []
        return sorted(self.root.glob("*.json"))

    def clear(self) -> int:
        n = 0
        for p in self.entries():
            p.unlink()
            n += 1
        return n


def _matrix_to_strings(A) -> list:
    return [[_mp_str(A[i, j]) for j in range(A.cols)] for i in range(A.rows)]


def _matrix_from_strings(rows) -> object:
    A = mp.matrix(len(rows), len(rows[0]) if rows else 0)
    for i, row in enumerate(rows):
        for j, s in enumerate(row):
            A[i, j] = _mp_parse(s)
    return A


def compute_partial_results(
    s1: WeierstrassSurface,
    s2: WeierstrassSurface,
    weight: int,
    ctx: PrecisionContext,
    cache: PartialsCache | None = None,
    example_id: str = "custom",
    setup: ChartSetup | None = None,
    check_tol=None,
    progress: Callable[[str], None] | None = None,
) -> PartialResultSet:
    """Run the continuation pipeline around all singular points."""
    k = s1.k
    if not 0 <= weight <= 2 * k - 2:
        raise InvalidParameter("weight must satisfy 0 <= n <= 2k - 2", weight=weight, k=k)
    points = singular_points(s1, s2)
    n = len(points)
    if n < 2:
        raise OutsideSchoenHypotheses("fewer than two singular points")
    with ctx.workdps():
        if setup is None:
            setup = chart_setup(s1, s2, weight)
        charts = {"z": setup.z, "w": setup.w}
        d = setup.z.phi.order
        if setup.w.phi.order != d:
            raise ConsistencyFailure("operators in the two charts have different orders", failed=("order",))
        if d not in (3, 4):
            raise ConsistencyFailure(f"operator order {d} not supported", failed=("order",))
        tol_int = mp.mpf(10) ** (-(ctx.digits // 2))
        basis_cache: dict = {}

        def basis_at(chart: str, p: SigmaPoint):
            key = (chart, str(p), p.minpoly, p.lo)
            if key not in basis_cache:
                c = chart_point(p, chart)
                basis_cache[key] = _Basis(frobenius_basis(charts[chart].phi, c, ctx.series_order), d)
            return basis_cache[key]

        surfaces_digest = _surfaces_digest(s1, s2)
        signs = []
        for i in range(n):
            p, q = points[i], points[(i + 1) % n]
            ch = interval_chart(p, q)
            a, b = _interval_coordinates(p, q, ch)
            signs.append(charts[ch].for_interval(a, b).signs)

        intervals = []
        for i in range(n):
            p, q = points[i], points[(i + 1) % n]
            ch = interval_chart(p, q)
            label = f"{p}->{q}"
            key = {
                "example": example_id,
                "surfaces": surfaces_digest,
                "chart": ch,
                "interval": label,
                "weight": weight,
                "digits": ctx.digits,
                "series_order": ctx.series_order,
                "guard": ctx.guard,
            }
            hit = cache.get(key) if cache else None
            if hit is not None:
                data = IntervalData(
                    label,
                    ch,
                    [_mp_parse(x) for x in hit["q"]],
                    _matrix_from_strings(hit["C_start"]),
                    _matrix_from_strings(hit["C_end"]),
                    _matrix_from_strings(hit["C_end_direct"]),
                    _matrix_from_strings(hit["C_right_of_end"]),
                    None,
                    {kk: mp.mpf(v) for kk, v in hit["residuals"].items()},
                )
            else:
                if progress:
                    progress(f"interval {label} ({ch}-chart)")
                a, b = _interval_coordinates(p, q, ch)
                data = interval_partials(
                    replace(charts[ch], signs=signs[i]),
                    a,
                    b,
                    ctx,
                    basis_at(ch, p),
                    basis_at(ch, q),
                    label=label,
                    next_signs=signs[(i + 1) % n],
                )
                if cache:
                    cache.put(
                        key,
                        {
                            "q": [_mp_str(x) for x in data.q],
                            "C_start": _matrix_to_strings(data.C_start),
                            "C_end": _matrix_to_strings(data.C_end),
                            "C_end_direct": _matrix_to_strings(data.C_end_direct),
                            "C_right_of_end": _matrix_to_strings(data.C_right_of_end),
                            "residuals": {kk: mp.nstr(v, 10) for kk, v in data.residuals.items()},
                        },
                    )
            intervals.append(data)

        M = [None] * n
        N = [None] * n
        residuals: dict = {}
        for i in range(n):
            left = intervals[(i - 1) % n]
            right = intervals[i]
            M[i], res = transformation_matrix(left.C_end, left.C_right_of_end, d, tol_int)
            residuals[f"M[{points[i]}]"] = res
            bas = basis_at(right.chart, points[i])
            a, _ = _interval_coordinates(points[i], points[(i + 1) % n], right.chart)
            theta = convergence_factor(ctx)
            R0 = _distance_to_singular(complex(to_mp(a)), operator_singularities(charts[right.chart].phi), exclude=complex(to_mp(a)))
            t0 = to_mp(a) + mp.mpf(min(SAMPLE_FRACTION, theta / 1.75) * R0)
            T = local_monodromy(bas, t0)
            N[i], res = monodromy_matrix(right.C_start, T, d, tol_int)
            residuals[f"N[{points[i]}]"] = res
        q = [iv.q for iv in intervals]
        tol_sum = mp.mpf(10) ** (-(ctx.digits - 20)) if check_tol is None else check_tol
        scale = max(max(abs(x) for x in v) for v in q)
        r, Theta, ident = adapt_to_base(q, M, N, tol=None)
        prs = PartialResultSet(
            points,
            d,
            weight,
            q,
            M,
            N,
            r,
            Theta,
            residuals,
            [iv.chart for iv in intervals],
            [iv.residuals for iv in intervals],
        )
        for key_, v in ident.items():
            prs.residuals[key_] = v
        failed = [key_ for key_ in ("M_cycle", "Theta_cycle") if ident[key_] != 0]
        failed += [key_ for key_ in ("sum_r", "lower_half_plane") if ident[key_] > tol_sum * max(scale, 1)]
        prs.residuals["identity_tolerance"] = tol_sum
        if failed:
            raise ConsistencyFailure(
                "partial-result identities violated", failed=tuple(failed), residuals={k_: mp.nstr(v, 5) for k_, v in ident.items()}
            )
        return prs


def chart_agreement(
    s1: WeierstrassSurface,
    s2: WeierstrassSurface,
    weight: int,
    ctx: PrecisionContext,
    setup: ChartSetup | None = None,
) -> tuple:
    """Recompute one finite interval in both charts and compare.

    Picks the first interval whose endpoints are finite, non-zero and of
    the same sign (so it avoids ``z = 0`` and ``z = inf``, the two centers
    of the charts), computes its partial-result vector once with the
    z-chart operator and once with the w-chart operator, and returns
    ``(label, q_z, q_w, max |q_z - q_w|)``.
    """
    points = singular_points(s1, s2)
    n = len(points)
    with ctx.workdps():
        if setup is None:
            setup = chart_setup(s1, s2, weight)
        for i in range(n):
            p, q = points[i], points[(i + 1) % n]
            if p.is_infinity or q.is_infinity:
                continue
            a, b = to_mp(chart_point(p, "z")), to_mp(chart_point(q, "z"))
            if a == 0 or b == 0 or (a > 0) != (b > 0):
                continue
            dz = interval_partials(setup.z, chart_point(p, "z"), chart_point(q, "z"), ctx, label=f"{p}->{q}")
            dw = interval_partials(setup.w, chart_point(p, "w"), chart_point(q, "w"), ctx, label=f"{p}->{q}")
            diff = max(abs(x - y) for x, y in zip(dz.q, dw.q))
            return f"{p}->{q}", dz.q, dw.q, diff
    raise OutsideSchoenHypotheses("no interval avoids both chart centers")
