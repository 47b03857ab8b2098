"""Weierstrass models of semistable elliptic surfaces over the projective line.

A surface is given by binary forms ``g2`` of degree ``4k`` and ``g3`` of
degree ``6k``; we store their restrictions to the chart ``[z:1]`` as
:class:`~schoenperiods.numerics.RatPoly` objects tagged with the form degree.
The fiber over ``z`` is the cubic curve ``y^2 = 4x^3 - g2(z) x - g3(z)``.

This module provides the discriminant, the J-invariant, the classification
of singular fibers (type ``I_n`` only), the ordering of the roots of the
cubic along real intervals, the two elliptic periods, and exact Taylor
expansions of the hypergeometric product seed at a common singular point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import mpmath as mp
import numpy as np

from .errors import (
    InvalidParameter,
    InvalidSeedCenter,
    InvalidSurface,
    NonSemistablePoint,
    SingularFiberPoint,
)
from .numerics import (
    PowerSeries,
    RatPoly,
    fractional_power_series,
    frac_mod,
    hypergeometric_2f1,
    is_exact,
    mod_compose,
    mod_hypergeometric,
    mod_mul,
    mod_power_series,
    mod_series_from_poly,
    mod_series_inverse,
    to_fraction,
    to_mp,
)

#: Parameters of the hypergeometric function expressing elliptic periods
#: through the J-invariant.
HYPERGEOMETRIC_PARAMETERS = (Fraction(1, 12), Fraction(5, 12), Fraction(1))


# ---------------------------------------------------------------------------
# points of the projective line
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SigmaPoint:
    """A point of P^1: either infinity or an algebraic number.

    Finite points are stored exactly as (minimal polynomial, isolating
    interval) -- the polynomial is primitive over Z with ascending
    coefficients, and the interval ``[lo, hi]`` contains exactly this real
    root.  Non-real algebraic points carry a rectangle instead (``lo``/``hi``
    are then complex corner values given as strings).
    """

    minpoly: tuple = ()
    lo: Fraction | None = None
    hi: Fraction | None = None
    label: str = "inf"
    imag_sign: int = 0

    # -- constructors -----------------------------------------------------
    @classmethod
    def infinity(cls) -> "SigmaPoint":
        return cls()

    @classmethod
    def rational(cls, r) -> "SigmaPoint":
        r = to_fraction(r)
        mp_ = (-r.numerator, r.denominator)
        return cls(mp_, r, r, _fmt_fraction(r))

    @property
    def is_infinity(self) -> bool:
        return not self.minpoly

    @property
    def is_rational(self) -> bool:
        return len(self.minpoly) == 2

    @property
    def is_real(self) -> bool:
        return self.is_infinity or self.imag_sign == 0

    @property
    def exact(self) -> Fraction | None:
        if self.is_rational:
            return Fraction(-self.minpoly[0], self.minpoly[1])
        return None

    def value(self):
        """Numeric value at the current mpmath precision (``mp.inf`` for infinity)."""
        if self.is_infinity:
            return mp.inf
        if self.is_rational:
            return to_mp(self.exact)
        return _algebraic_value(self.minpoly, self.lo, self.hi, self.imag_sign, mp.mp.dps)

    def sort_key(self):
        if self.is_infinity:
            return (1, 0.0)
        with mp.workdps(30):
            return (0, float(mp.re(self.value())))

    def __str__(self) -> str:
        return "inf" if self.is_infinity else self.label

    def to_record(self) -> dict:
        if self.is_infinity:
            return {"kind": "infinity"}
        return {
            "kind": "algebraic",
            "minpoly": [int(c) for c in self.minpoly],
            "interval": [str(self.lo), str(self.hi)],
            "imag_sign": self.imag_sign,
            "label": self.label,
        }

    @classmethod
    def from_record(cls, rec) -> "SigmaPoint":
        if rec["kind"] == "infinity":
            return cls.infinity()
        lo, hi = (Fraction(x) for x in rec["interval"])
        return cls(tuple(int(c) for c in rec["minpoly"]), lo, hi, rec.get("label", "?"), rec.get("imag_sign", 0))


def _fmt_fraction(r: Fraction) -> str:
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


_ALGEBRAIC_CACHE: dict = {}


def _algebraic_value(minpoly, lo, hi, imag_sign, dps):
    key = (minpoly, lo, hi, imag_sign, dps)
    hit = _ALGEBRAIC_CACHE.get(key)
    if hit is not None:
        return hit
    coeffs = [mp.mpf(c) for c in reversed(minpoly)]
    with mp.workdps(dps + 20):
        roots = mp.polyroots(coeffs, maxsteps=500, extraprec=10 * dps)
        if imag_sign == 0:
            cands = [mp.re(r) for r in roots if abs(mp.im(r)) < mp.mpf(10) ** (-dps // 2)]
            lo_v, hi_v = to_mp(lo), to_mp(hi)
            cands = [r for r in cands if lo_v - mp.mpf(10) ** (-dps // 2) <= r <= hi_v + mp.mpf(10) ** (-dps // 2)]
        else:
            cands = [
                r
                for r in roots
                if mp.sign(mp.im(r)) == imag_sign
                and abs(mp.re(r) - to_mp(lo)) < mp.mpf(10) ** -8
            ]
        if len(cands) != 1:
            raise InvalidSurface("could not isolate algebraic point", minpoly=minpoly)
        val = cands[0]
    val = +val
    _ALGEBRAIC_CACHE[key] = val
    return val


# ---------------------------------------------------------------------------
# surfaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SingularFiber:
    """Singular fiber of Kodaira type ``I_n`` over ``location``."""

    location: SigmaPoint
    kodaira_n: int

    def __str__(self) -> str:
        return f"I{self.kodaira_n} over {self.location}"


@dataclass(frozen=True)
class RootTriple:
    """Roots of ``4x^3 - g2 x - g3`` in the interval-adapted order."""

    r1: object
    r2: object
    r3: object
    all_real: bool

    def __iter__(self):
        return iter((self.r1, self.r2, self.r3))

    def __getitem__(self, i):
        return (self.r1, self.r2, self.r3)[i]


@dataclass(frozen=True)
class WeierstrassSurface:
    """Elliptic surface ``y^2 = 4x^3 - g2 x - g3`` with ``g2 in O(4k)``, ``g3 in O(6k)``."""

    g2: RatPoly
    g3: RatPoly
    k: int = 1
    name: str = ""
    chart: str = "z"

    def __post_init__(self):
        if self.k < 1:
            raise InvalidSurface("twist degree k must be positive", k=self.k)
        g2 = self.g2 if isinstance(self.g2, RatPoly) else RatPoly(self.g2)
        g3 = self.g3 if isinstance(self.g3, RatPoly) else RatPoly(self.g3)
        if g2.degree() > 4 * self.k or g3.degree() > 6 * self.k:
            raise InvalidSurface(
                "coefficient degrees exceed (4k, 6k)", deg_g2=g2.degree(), deg_g3=g3.degree(), k=self.k
            )
        object.__setattr__(self, "g2", g2.with_form_degree(4 * self.k))
        object.__setattr__(self, "g3", g3.with_form_degree(6 * self.k))
        if self.discriminant_poly.is_zero():
            raise InvalidSurface("discriminant vanishes identically")

    # -- algebraic invariants ---------------------------------------------
    @cached_property
    def discriminant_poly(self) -> RatPoly:
        d = self.g2**3 - 27 * self.g3**2
        return d.with_form_degree(12 * self.k)

    def other_chart(self) -> "WeierstrassSurface":
        """The same surface written in the chart ``[-1:w]`` (``w = -1/z``)."""
        return WeierstrassSurface(
            self.g2.w_chart(), self.g3.w_chart(), self.k, self.name, "w" if self.chart == "z" else "z"
        )

    def cubic_coefficients(self, z):
        """``(g2(z), g3(z))`` at a point of this chart."""
        return self.g2(z), self.g3(z)

    @cached_property
    def fibers(self) -> tuple:
        return tuple(classify_fibers(self))

    @property
    def sigma(self) -> list:
        """Locations of singular fibers, finite real ones ascending, then infinity."""
        return sorted((f.location for f in self.fibers), key=SigmaPoint.sort_key)

    def to_record(self) -> dict:
        return {
            "g2": [str(c) for c in self.g2.coeffs],
            "g3": [str(c) for c in self.g3.coeffs],
            "k": self.k,
            "name": self.name,
        }

    @classmethod
    def from_record(cls, rec) -> "WeierstrassSurface":
        return cls(
            RatPoly([Fraction(c) for c in rec["g2"]]),
            RatPoly([Fraction(c) for c in rec["g3"]]),
            int(rec.get("k", 1)),
            rec.get("name", ""),
        )


def discriminant(s: WeierstrassSurface) -> RatPoly:
    """``g2^3 - 27 g3^2`` as a form of degree ``12k`` (z-chart restriction)."""
    return s.discriminant_poly


def j_invariant(s: WeierstrassSurface, z):
    """``g2^3 / (g2^3 - 27 g3^2)`` at ``z`` (``mp.inf`` at singular fibers).

    ``z`` may be exact (returns a ``Fraction``), numeric, or the string
    ``"inf"`` / :class:`SigmaPoint` at infinity.
    """
    if isinstance(z, SigmaPoint):
        if z.is_infinity:
            return j_invariant(s.other_chart(), Fraction(0))
        z = z.exact if z.is_rational else z.value()
    if isinstance(z, str) and z == "inf":
        return j_invariant(s.other_chart(), Fraction(0))
    a = s.g2(z)
    d = s.discriminant_poly(z)
    if is_exact(z):
        if d == 0:
            if a == 0:
                raise NonSemistablePoint("g2 and discriminant vanish simultaneously", z=z)
            return mp.inf
        return a**3 / d
    tiny = mp.mpf(10) ** (-(mp.mp.dps // 2))
    if abs(d) < tiny:
        if abs(a) < tiny:
            raise NonSemistablePoint("g2 and discriminant vanish simultaneously", z=z)
        return mp.inf
    return a**3 / d


def classify_fibers(s: WeierstrassSurface) -> list:
    """Singular fibers of ``s`` (type ``I_n``), including the one over infinity.

    Raises :class:`NonSemistablePoint` if ``g2`` vanishes at a zero of the
    discriminant (additive reduction).
    """
    import sympy

    z = sympy.Symbol("z")
    disc = s.discriminant_poly
    dpoly = sympy.Poly(disc.to_sympy(z), z, domain="QQ")
    g2poly = sympy.Poly(s.g2.to_sympy(z), z, domain="QQ")
    fibers = []
    _, factors = dpoly.factor_list()
    for fac, mult in factors:
        if fac.degree() == 0:
            continue
        if sympy.gcd(fac, g2poly).degree() > 0:
            raise NonSemistablePoint("additive fiber: g2 vanishes at a root of the discriminant", factor=str(fac.as_expr()))
        _, prim = fac.clear_denoms(convert=True)
        _, prim = prim.primitive()
        if prim.LC() < 0:
            prim = -prim
        coeffs = tuple(int(c) for c in reversed(prim.all_coeffs()))
        if prim.degree() == 1:
            r = Fraction(-coeffs[0], coeffs[1])
            fibers.append(SingularFiber(SigmaPoint.rational(r), int(mult)))
            continue
        for (lo, hi), _m in prim.intervals(eps=sympy.Rational(1, 10**12)):
            lo = Fraction(int(lo.p), int(lo.q)) if hasattr(lo, "p") else Fraction(lo)
            hi = Fraction(int(hi.p), int(hi.q)) if hasattr(hi, "p") else Fraction(hi)
            label = _algebraic_label(prim, lo, hi)
            fibers.append(SingularFiber(SigmaPoint(coeffs, lo, hi, label, 0), int(mult)))
        n_real = len(prim.intervals())
        if n_real < prim.degree():
            for root in prim.nroots(n=30):
                if sympy.im(root) == 0:
                    continue
                re = Fraction(str(sympy.re(root).evalf(40)))
                sign = 1 if sympy.im(root) > 0 else -1
                fibers.append(
                    SingularFiber(SigmaPoint(coeffs, re, re, f"root of {prim.as_expr()}", sign), int(mult))
                )
    inf_order = 12 * s.k - disc.degree()
    if inf_order > 0:
        if s.g2.degree() < 4 * s.k:
            raise NonSemistablePoint("additive fiber over infinity")
        fibers.append(SingularFiber(SigmaPoint.infinity(), inf_order))
    return sorted(fibers, key=lambda f: f.location.sort_key())


def _algebraic_label(prim, lo, hi) -> str:
    import sympy

    z = prim.gens[0]
    try:
        for r in sympy.roots(prim.as_expr(), z, multiple=True):
            if r.is_real and sympy.Rational(lo.numerator, lo.denominator) <= r <= sympy.Rational(hi.numerator, hi.denominator):
                return sympy.sstr(sympy.nsimplify(r))
    except Exception:  # pragma: no cover - label only
        pass
    mid = (lo + hi) / 2
    return f"root of {prim.as_expr()} near {float(mid):.6g}"


# ---------------------------------------------------------------------------
# roots and periods
# ---------------------------------------------------------------------------

def ordered_roots(s: WeierstrassSurface, z, interval: Sequence | None = None) -> RootTriple:
    """Roots of ``4x^3 - g2(z)x - g3(z)`` at a real point ``z`` of the chart.

    Three real roots are sorted ascending; otherwise the roots are sorted by
    imaginary part (the real root in the middle).  Since the sign of the
    discriminant is constant on an interval free of singular fibers, the
    case selection -- and hence the ordering -- is continuous along it.

    If ``interval = (lo, hi)`` is given, ``z`` must lie strictly inside it.
    """
    zv = to_mp(z)
    if interval is not None:
        lo, hi = interval
        if not (to_mp(lo) < mp.re(zv) < to_mp(hi)):
            raise InvalidParameter("point outside its interval", z=mp.nstr(zv, 10))
    g2 = s.g2(zv) if not is_exact(z) else to_mp(s.g2(z))
    g3 = s.g3(zv) if not is_exact(z) else to_mp(s.g3(z))
    disc = g2**3 - 27 * g3**2
    scale = max(abs(g2) ** 3, abs(g3) ** 2, mp.mpf(1))
    if abs(disc) <= scale * mp.mpf(10) ** (-(mp.mp.dps * 3) // 4):
        raise SingularFiberPoint("cubic has a repeated root", z=mp.nstr(zv, 10))
    roots = mp.polyroots([4, 0, -g2, -g3], maxsteps=200, extraprec=2 * mp.mp.prec)
    if mp.im(disc) == 0 and mp.re(disc) > 0 and mp.im(g2) == 0 and mp.im(g3) == 0:
        rs = sorted(mp.re(r) for r in roots)
        return RootTriple(rs[0], rs[1], rs[2], True)
    rs = sorted(roots, key=lambda r: mp.im(r))
    if mp.im(g2) == 0 and mp.im(g3) == 0:
        # one real root in the middle, a conjugate pair around it
        mid = mp.re(rs[1])
        pair = (rs[0] + mp.conj(rs[2])) / 2
        rs = [mp.conj(pair), mid, pair] if mp.im(pair) > 0 else [pair, mid, mp.conj(pair)]
    return RootTriple(rs[0], rs[1], rs[2], False)


def period_from_roots(roots: RootTriple, u: int):
    """``2 * int_{r_u}^{r_{u+1}} dx / sqrt(4x^3 - g2 x - g3)`` in closed form.

    With ``x = r_u + (r_{u+1} - r_u) sin^2(phi)`` the integral becomes
    ``2 int_0^{pi/2} dphi / sqrt(r_o - x)`` (``r_o`` the remaining root,
    principal square root), which is ``pi / agm(sqrt(r_o - r_u), sqrt(r_o - r_{u+1}))``.
    """
    if u not in (1, 2):
        raise InvalidParameter("period index must be 1 or 2", u=u)
    ra, rb = roots[u - 1], roots[u]
    ro = roots[2] if u == 1 else roots[0]
    a = mp.sqrt(ro - ra)
    b = mp.sqrt(ro - rb)
    if a == 0 or b == 0 or ra == rb:
        raise SingularFiberPoint("coincident roots")
    return mp.pi / mp.agm(a, b)


def period_by_quadrature(roots: RootTriple, u: int):
    """Same integral as :func:`period_from_roots` by Gauss-Legendre quadrature
    in the smooth variable ``phi`` (independent check of the closed form)."""
    ra, rb = roots[u - 1], roots[u]
    ro = roots[2] if u == 1 else roots[0]
    d = rb - ra
    f = lambda phi: 1 / mp.sqrt(ro - ra - d * mp.sin(phi) ** 2)
    return 2 * mp.quad(f, [0, mp.pi / 4, mp.pi / 2], method="gauss-legendre")


def elliptic_period(s: WeierstrassSurface, z, u: int, interval: Sequence | None = None, check: bool = False):
    """Period ``P_u(z)`` of the fiber over the real point ``z`` (this chart).

    ``check=True`` additionally compares the closed form against quadrature
    at a lower precision and raises :class:`InvalidParameter` on mismatch.
    """
    roots = ordered_roots(s, z, interval)
    value = period_from_roots(roots, u)
    if check:
        with mp.workdps(30):
            q = period_by_quadrature(roots, u)
            if abs(q - value) > mp.mpf(10) ** -20 * abs(value):
                raise InvalidParameter("closed-form period disagrees with quadrature", z=mp.nstr(to_mp(z), 10))
    return value


def branch_signs(s: WeierstrassSurface, z) -> tuple:
    """Signs ``(e_1, e_2)`` fixing the square-root branch of ``P_1, P_2`` on an interval.

    :func:`period_from_roots` continues the square root analytically along
    the segment ``r_u -> r_{u+1}`` starting from ``2 (r_{u+1}-r_u) sqrt(r_o - r_u)``
    (principal root).  The normalised period instead starts from the
    principal square root of ``4 (r_{u+1}-r_u)^2 (r_o - r_u)`` at the start
    root; ``e_u`` is the ratio of the two starting branches.  Evaluated once
    at a reference point near the left end of an interval, the signs are
    constant along it.  Both conventions agree whenever all roots are real.
    """
    roots = ordered_roots(s, z)
    out = []
    for u in (1, 2):
        ra, rb = roots[u - 1], roots[u]
        ro = roots[2] if u == 1 else roots[0]
        d = rb - ra
        ratio = mp.sqrt(d * d * (ro - ra)) / (d * mp.sqrt(ro - ra))
        out.append(1 if mp.re(ratio) > 0 else -1)
    return tuple(out)


def hypergeometric_period(s: WeierstrassSurface, z):
    """``(2 pi / 12^(1/4)) g2(z)^(-1/4) 2F1(1/12, 5/12; 1; 1/J(z))`` (valid for |1/J| < 1)."""
    a, b, c = (to_mp(x) for x in HYPERGEOMETRIC_PARAMETERS)
    zv = to_mp(z)
    g2 = s.g2(zv)
    inv_j = s.discriminant_poly(zv) / g2**3
    return 2 * mp.pi / mp.root(12, 4) * mp.power(g2, mp.mpf(-1) / 4) * mp.hyp2f1(a, b, c, inv_j)


# ---------------------------------------------------------------------------
# seed series
# ---------------------------------------------------------------------------

def _check_seed_center(s: WeierstrassSurface, c: Fraction):
    if s.g2(c) == 0:
        raise InvalidSeedCenter("g2 vanishes at the seed center", center=c)
    if s.discriminant_poly(c) != 0:
        raise InvalidSeedCenter("1/J does not vanish at the seed center", center=c)


def seed_period_series(
    s1: WeierstrassSurface, s2: WeierstrassSurface | None, center, order: int = 20, weight: int = 0
) -> PowerSeries:
    """Exact Taylor series at ``center`` of the product seed

    ``(z-shift)^weight * (g2_1 g2_2)^(-1/4) * F(1/J_1) * F(1/J_2)``, with
    ``F = 2F1(1/12, 5/12; 1; .)``, normalised by the constant
    ``(g2_1(c) g2_2(c))^(-1/4)`` so that all coefficients are rational.

    ``center`` is a rational point of the chart in which both surfaces are
    given (use :meth:`WeierstrassSurface.other_chart` for infinity), and must
    be a singular fiber of both surfaces.  With ``s2=None`` the seed is the
    single-surface period ``g2^(-1/4) F(1/J)``.  ``weight`` multiplies by
    ``z^weight`` where ``z`` is the chart coordinate (not the local one).
    """
    c = to_fraction(center)
    surfaces = (s1,) if s2 is None else (s1, s2)
    for s in surfaces:
        _check_seed_center(s, c)
    extra = order + 2
    prod = PowerSeries([Fraction(1)] + [Fraction(0)] * (extra - 1), c)
    for s in surfaces:
        g2s = s.g2.taylor_shift(c)
        ds = s.discriminant_poly.taylor_shift(c)
        g2_series = PowerSeries([g2s.coeff(i) / g2s.coeff(0) for i in range(extra)], c)
        inv_g2c3 = fractional_power_series(g2_series, Fraction(-3))
        u = PowerSeries([ds.coeff(i) / g2s.coeff(0) ** 3 for i in range(extra)], c) * inv_g2c3
        F = hypergeometric_2f1(*HYPERGEOMETRIC_PARAMETERS, extra)
        Fu = _compose_exact(F, u)
        root = fractional_power_series(g2_series, Fraction(-1, 4))
        factor = root * Fu
        prod = prod * factor
    if weight:
        zpow = RatPoly.monomial(weight).taylor_shift(c)
        prod = prod * PowerSeries([zpow.coeff(i) for i in range(extra)], c)
    return prod.truncate(order)


def _compose_exact(F: PowerSeries, u: PowerSeries) -> PowerSeries:
    n = len(u)
    if u.coeffs[0] != 0:
        raise InvalidSeedCenter("inner series does not vanish at the center")
    acc = PowerSeries([Fraction(0)] * n, u.center)
    for coef in reversed(F.coeffs[:n]):
        acc = acc * u
        acc = PowerSeries((acc.coeffs[0] + coef,) + acc.coeffs[1:], u.center)
    return acc


def seed_series_mod(
    s1: WeierstrassSurface, s2: WeierstrassSurface | None, center, order: int, p: int, weight: int = 0
) -> np.ndarray:
    """The normalised seed of :func:`seed_period_series` reduced mod ``p``."""
    c = to_fraction(center)
    surfaces = (s1,) if s2 is None else (s1, s2)
    for s in surfaces:
        _check_seed_center(s, c)
    n = order
    prod = np.zeros(n, dtype=np.int64)
    prod[0] = 1
    F = mod_hypergeometric(*HYPERGEOMETRIC_PARAMETERS, n, p)
    for s in surfaces:
        g2s = mod_series_from_poly(s.g2.taylor_shift(c), n, p)
        ds = mod_series_from_poly(s.discriminant_poly.taylor_shift(c), n, p)
        if g2s[0] == 0:
            raise ZeroDivisionError("g2(center) vanishes mod p")
        g2n = g2s * pow(int(g2s[0]), p - 2, p) % p
        cube = mod_mul(mod_mul(g2s, g2s, p), g2s, p)
        u = mod_mul(ds, mod_series_inverse(cube, p), p)
        prod = mod_mul(prod, mod_compose(F, u, p), p)
        prod = mod_mul(prod, mod_power_series(g2n, Fraction(-1, 4), p), p)
    if weight:
        zpow = mod_series_from_poly(RatPoly.monomial(weight).taylor_shift(c), n, p)
        prod = mod_mul(prod, zpow, p)
    return prod
