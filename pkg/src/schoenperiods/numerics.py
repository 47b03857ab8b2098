"""Arbitrary-precision scalar, polynomial and truncated power-series algebra.

Everything else in the package is built on three small value types:

* :class:`PrecisionContext` -- the two user knobs (decimal digits and series
  truncation length) plus a fixed number of guard digits;
* :class:`RatPoly` -- exact rational polynomials, optionally tagged as the
  dehomogenisation of a binary form of a given degree;
* :class:`PowerSeries` -- truncated Taylor series at a center, with exact
  (``Fraction``) or floating (``mpmath``) coefficients.

A second, independent layer works with series over ``Z/pZ`` stored as
``numpy.int64`` arrays.  It is used by the exact multi-modular search for
annihilating differential operators (see :mod:`schoenperiods.ode`).

All values are immutable; every function is a pure function of its inputs
and the active mpmath precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import mpmath as mp
import numpy as np

from .errors import (
    BranchPointAtCenter,
    CenterMismatch,
    InvalidParameter,
    OutsideConvergence,
)

#: Guard digits added to the user precision for every internal pipeline.
GUARD_DIGITS = 20

#: Named (digits, series_order) presets.
PRESETS = {
    "paper": (1000, 350),
    "desk": (200, 140),
}


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision (decimal digits) and series truncation length."""

    digits: int = 200
    series_order: int = 140
    guard: int = GUARD_DIGITS

    def __post_init__(self):
        if int(self.digits) < 30:
            raise InvalidParameter("digits must be >= 30", digits=self.digits)
        if int(self.series_order) < 10:
            raise InvalidParameter("series_order must be >= 10", series_order=self.series_order)

    @classmethod
    def preset(cls, name: str) -> "PrecisionContext":
        try:
            digits, order = PRESETS[name]
        except KeyError:
            raise InvalidParameter(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        return cls(digits, order)

    @property
    def working_digits(self) -> int:
        return self.digits + self.guard

    def workdps(self):
        """Context manager setting mpmath to the internal working precision."""
        return mp.workdps(self.working_digits)

    def tolerance(self, offset: int = 0):
        """``10**(-digits + offset)`` as an mpf."""
        return mp.mpf(10) ** (-(self.digits - offset))

    def key(self) -> tuple:
        return (self.digits, self.series_order)


# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------

def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) or isinstance(x, Rational)


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, Rational):
        return Fraction(int(x.numerator), int(x.denominator))
    try:  # sympy Rational / Integer
        import sympy

        if isinstance(x, sympy.Rational):
            return Fraction(int(x.p), int(x.q))
    except ImportError:  # pragma: no cover
        pass
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def to_mp(x):
    """Convert an exact or floating scalar to an mpmath number (current prec)."""
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    if isinstance(x, int):
        return mp.mpf(x)
    if isinstance(x, (mp.mpf, mp.mpc)):
        return +x
    if isinstance(x, complex):
        return mp.mpc(x)
    return mp.mpmathify(x)


def snap_rational(x, max_den: int = 12, tol=None):
    """Return the rational with denominator <= ``max_den`` closest to ``x``.

    Returns ``None`` if no such rational is within ``tol`` (default:
    ``10**(-dps/3)``).  Used to recognise indicial exponents computed
    numerically.
    """
    if tol is None:
        tol = mp.mpf(10) ** (-(mp.mp.dps // 3))
    xr = mp.re(x)
    if abs(mp.im(x)) > tol:
        return None
    best = None
    for q in range(1, max_den + 1):
        p = int(mp.nint(xr * q))
        err = abs(xr - mp.mpf(p) / q)
        if err <= tol and (best is None or err < best[0]):
            best = (err, Fraction(p, q))
            break
    return None if best is None else best[1]


# ---------------------------------------------------------------------------
# exact polynomials
# ---------------------------------------------------------------------------

class RatPoly:
    """Univariate polynomial with exact rational coefficients (ascending).

    ``form_degree`` optionally records that the polynomial is the chart
    ``[z:1]`` restriction of a binary form of that degree, so that the form
    can be restricted to the other chart ``[-1:w]`` (see :meth:`w_chart`).
    The zero polynomial has degree ``-1``.
    """

    __slots__ = ("coeffs", "form_degree")

    def __init__(self, coeffs: Iterable = (), form_degree: int | None = None):
        cs = [to_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        if form_degree is not None and form_degree < len(cs) - 1:
            raise InvalidParameter(
                "form degree smaller than polynomial degree",
                form_degree=form_degree,
                degree=len(cs) - 1,
            )
        object.__setattr__(self, "form_degree", form_degree)

    def __setattr__(self, name, value):  # immutability
        raise AttributeError("RatPoly is immutable")

    # -- constructors -----------------------------------------------------
    @classmethod
    def monomial(cls, k: int, c=1) -> "RatPoly":
        return cls([0] * k + [c])

    @classmethod
    def from_roots(cls, roots: Sequence) -> "RatPoly":
        p = cls([1])
        for r in roots:
            p = p * cls([-to_fraction(r), 1])
        return p

    @classmethod
    def from_sympy(cls, expr, var, form_degree: int | None = None) -> "RatPoly":
        import sympy

        poly = sympy.Poly(sympy.expand(expr), var)
        coeffs = list(reversed(poly.all_coeffs()))
        return cls([to_fraction(sympy.Rational(c)) for c in coeffs], form_degree)

    def to_sympy(self, var):
        import sympy

        return sum(sympy.Rational(c.numerator, c.denominator) * var**i for i, c in enumerate(self.coeffs))

    # -- basic structure --------------------------------------------------
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def with_form_degree(self, D: int) -> "RatPoly":
        return RatPoly(self.coeffs, D)

    def __eq__(self, other) -> bool:
        if isinstance(other, RatPoly):
            return self.coeffs == other.coeffs
        if is_exact(other):
            return self.coeffs == RatPoly([other]).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self) -> str:
        body = ", ".join(str(c) for c in self.coeffs)
        tag = f", form_degree={self.form_degree}" if self.form_degree is not None else ""
        return f"RatPoly([{body}]{tag})"

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "RatPoly":
        if isinstance(other, RatPoly):
            return other
        return RatPoly([other])

    def __add__(self, other):
        o = self._coerce(other)
        n = max(len(self.coeffs), len(o.coeffs))
        return RatPoly([self.coeff(i) + o.coeff(i) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return RatPoly([-c for c in self.coeffs], self.form_degree)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        if self.is_zero() or o.is_zero():
            return RatPoly([])
        out = [Fraction(0)] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] += a * b
        fd = None
        if self.form_degree is not None and o.form_degree is not None:
            fd = self.form_degree + o.form_degree
        elif self.form_degree is not None and not isinstance(other, RatPoly):
            fd = self.form_degree
        return RatPoly(out, fd)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise InvalidParameter("negative power of a polynomial")
        result = RatPoly([1], 0 if self.form_degree is not None else None)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def divmod(self, other: "RatPoly"):
        """Euclidean division over Q."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree()
        lead = other.coeffs[-1]
        quot = [Fraction(0)] * max(0, len(rem) - dq)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] / lead
            quot[i - dq] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[i - dq + j] -= c * b
        return RatPoly(quot), RatPoly(rem[:dq] if dq > 0 else [])

    def derivative(self) -> "RatPoly":
        return RatPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, x):
        if is_exact(x):
            x = to_fraction(x)
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        acc = mp.mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * x + to_mp(c)
        return acc

    def taylor_shift(self, c) -> "RatPoly":
        """Exact coefficients of ``p(x + c)`` for rational ``c``."""
        c = to_fraction(c)
        cs = list(self.coeffs)
        n = len(cs)
        for i in range(n):
            for j in range(n - 2, i - 1, -1):
                cs[j] += c * cs[j + 1]
        return RatPoly(cs)

    def taylor_shift_numeric(self, c) -> list:
        """mpmath coefficients of ``p(x + c)`` for a floating center ``c``."""
        cs = [to_mp(a) for a in self.coeffs]
        n = len(cs)
        for i in range(n):
            for j in range(n - 2, i - 1, -1):
                cs[j] += c * cs[j + 1]
        return cs

    def compose_affine(self, a, b) -> "RatPoly":
        """Exact coefficients of ``p(a*x + b)``."""
        a = to_fraction(a)
        shifted = self.taylor_shift(b)
        return RatPoly([c * a**i for i, c in enumerate(shifted.coeffs)])

    def valuation_at(self, r) -> int:
        """Multiplicity of the rational root ``r`` (0 if not a root)."""
        if self.is_zero():
            raise InvalidParameter("valuation of the zero polynomial")
        shifted = self.taylor_shift(r)
        k = 0
        while shifted.coeffs[k] == 0:
            k += 1
        return k

    def content(self) -> Fraction:
        """Positive rational c with self/c primitive integral."""
        if self.is_zero():
            return Fraction(0)
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // math.gcd(den, c.denominator)
        nums = [int(c * den) for c in self.coeffs]
        g = 0
        for v in nums:
            g = math.gcd(g, v)
        return Fraction(g, den)

    # -- binary forms -----------------------------------------------------
    def w_chart(self) -> "RatPoly":
        """Restriction ``g(-1, w)`` of the binary form to the chart ``[-1:w]``.

        With ``g(X, Y) = sum a_i X^i Y^(D-i)`` this is
        ``sum a_i (-1)^i w^(D-i)``.
        """
        if self.form_degree is None:
            raise InvalidParameter("w_chart needs the form degree")
        D = self.form_degree
        out = [Fraction(0)] * (D + 1)
        for i, a in enumerate(self.coeffs):
            out[D - i] += a * (-1) ** i
        return RatPoly(out, D)

    def homogeneous(self, X, Y):
        """Evaluate the binary form at ``(X, Y)``."""
        if self.form_degree is None:
            raise InvalidParameter("homogeneous evaluation needs the form degree")
        D = self.form_degree
        return sum(c * X**i * Y ** (D - i) for i, c in enumerate(self.coeffs))

    def order_at_infinity(self) -> int:
        """Vanishing order of the binary form at ``[1:0]``."""
        if self.form_degree is None:
            raise InvalidParameter("order at infinity needs the form degree")
        return self.form_degree - self.degree()

    def numeric_roots(self) -> list:
        """All complex roots as mpmath numbers (current precision)."""
        if self.degree() < 1:
            return []
        cs = [to_mp(c) for c in reversed(self.coeffs)]
        return list(mp.polyroots(cs, maxsteps=400, extraprec=4 * mp.mp.prec))


# ---------------------------------------------------------------------------
# truncated power series
# ---------------------------------------------------------------------------

#: Evaluation of a truncated series is refused beyond this fraction of the
#: radius hint (the tail is not under control there).
SERIES_SAFETY = mp.mpf("0.95")


class PowerSeries:
    """Truncated Taylor series ``sum c_k (z - center)^k``.

    Coefficients are exact (``Fraction``) when all inputs were exact, and
    mpmath numbers otherwise.  ``radius_hint`` is the distance to the nearest
    known singularity (``inf`` when unknown / entire).
    """

    __slots__ = ("center", "coeffs", "radius_hint")

    def __init__(self, coeffs: Iterable, center=0, radius_hint=None):
        cs = tuple(c if not isinstance(c, int) else Fraction(c) for c in coeffs)
        object.__setattr__(self, "coeffs", cs)
        object.__setattr__(self, "center", Fraction(center) if isinstance(center, int) else center)
        object.__setattr__(self, "radius_hint", mp.inf if radius_hint is None else radius_hint)

    def __setattr__(self, name, value):
        raise AttributeError("PowerSeries is immutable")

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __repr__(self) -> str:
        head = ", ".join(str(c) for c in self.coeffs[:6])
        more = ", ..." if len(self.coeffs) > 6 else ""
        return f"PowerSeries([{head}{more}], center={self.center})"

    @property
    def exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coeffs)

    def _same_center(self, other: "PowerSeries"):
        a, b = self.center, other.center
        same = a == b if (is_exact(a) and is_exact(b)) else abs(to_mp(a) - to_mp(b)) == 0
        if not same:
            raise CenterMismatch("series expanded at different centers", left=a, right=b)

    def truncate(self, n: int) -> "PowerSeries":
        return PowerSeries(self.coeffs[:n], self.center, self.radius_hint)

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        self._same_center(other)
        n = min(len(self), len(other))
        return PowerSeries(
            [self.coeffs[i] + other.coeffs[i] for i in range(n)],
            self.center,
            min(self.radius_hint, other.radius_hint),
        )

    def __neg__(self):
        return PowerSeries([-c for c in self.coeffs], self.center, self.radius_hint)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other) -> "PowerSeries":
        if not isinstance(other, PowerSeries):
            return PowerSeries([c * other for c in self.coeffs], self.center, self.radius_hint)
        self._same_center(other)
        n = min(len(self), len(other))
        a, b = self.coeffs, other.coeffs
        out = []
        for k in range(n):
            s = 0
            for i in range(k + 1):
                ai = a[i]
                if ai:
                    s += ai * b[k - i]
            out.append(s if not isinstance(s, int) else Fraction(s))
        return PowerSeries(out, self.center, min(self.radius_hint, other.radius_hint))

    __rmul__ = __mul__

    def differentiate(self) -> "PowerSeries":
        return PowerSeries([k * c for k, c in enumerate(self.coeffs)][1:], self.center, self.radius_hint)

    def integrate_termwise(self) -> "PowerSeries":
        """Primitive with zero constant term (one coefficient longer)."""
        out = [Fraction(0)]
        for k, c in enumerate(self.coeffs):
            out.append(c / (k + 1) if isinstance(c, Fraction) else c / (k + 1))
        return PowerSeries(out, self.center, self.radius_hint)

    def compose_linear(self, scale) -> "PowerSeries":
        """Series of ``f(center + scale*(z - center))``."""
        out = []
        p = Fraction(1) if is_exact(scale) else mp.mpf(1)
        for c in self.coeffs:
            out.append(c * p)
            p = p * scale
        radius = self.radius_hint / abs(to_mp(scale)) if scale != 0 else mp.inf
        return PowerSeries(out, self.center, radius)

    def evaluate(self, z, derivative: int = 0, check_radius: bool = True):
        """Value of the truncated series (or its derivative) at ``z``."""
        x = z - self.center if is_exact(z) and is_exact(self.center) else to_mp(z) - to_mp(self.center)
        if check_radius and self.radius_hint != mp.inf:
            if abs(to_mp(x)) >= SERIES_SAFETY * self.radius_hint:
                raise OutsideConvergence(
                    "evaluation point outside the safe disk", distance=mp.nstr(abs(to_mp(x)), 8)
                )
        s = self
        for _ in range(derivative):
            s = s.differentiate()
        acc = 0
        for c in reversed(s.coeffs):
            acc = acc * x + c
        return acc


def series_arith(a: PowerSeries, b: PowerSeries | None, op: str) -> PowerSeries:
    """Dispatch on ``op`` in {add, mul, differentiate, integrate_termwise,
    compose_linear}.  For ``compose_linear`` pass the scale factor as ``b``."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "differentiate":
        return a.differentiate()
    if op == "integrate_termwise":
        return a.integrate_termwise()
    if op == "compose_linear":
        return a.compose_linear(b)
    raise InvalidParameter(f"unknown series operation {op!r}")


def hypergeometric_2f1(a, b, c, order: int) -> PowerSeries:
    """Exact Taylor coefficients of 2F1(a, b; c; z) at 0 (``order`` terms)."""
    a, b, c = to_fraction(a), to_fraction(b), to_fraction(c)
    if c <= 0 and c.denominator == 1:
        raise InvalidParameter("c must not be a nonpositive integer", c=c)
    out = [Fraction(1)]
    for k in range(order - 1):
        out.append(out[-1] * (a + k) * (b + k) / ((c + k) * (1 + k)))
    return PowerSeries(out[:order], 0)


def _exact_root(x: Fraction, exponent: Fraction):
    """x**exponent if it is rational, else None."""
    if x <= 0:
        return None
    p, q = exponent.numerator, exponent.denominator
    num = _int_root(x.numerator, q)
    den = _int_root(x.denominator, q)
    if num is None or den is None:
        return None
    return Fraction(num, den) ** p


def _int_root(n: int, q: int):
    r = round(n ** (1.0 / q)) if n < 2**1000 else int(mp.nint(mp.root(n, q)))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**q == n:
            return cand
    return None


def fractional_power_series(f: PowerSeries, exponent) -> PowerSeries:
    """Principal branch of ``f**exponent`` as a truncated series.

    Uses the recurrence ``f0 * n * g_n = sum_{k=1}^n (alpha*k - (n-k)) f_k g_{n-k}``
    obtained from ``f g' = alpha f' g``.  Exact when ``f`` is exact and
    ``f(center)**exponent`` happens to be rational.
    """
    alpha = to_fraction(exponent)
    cs = f.coeffs
    if not cs or cs[0] == 0:
        raise BranchPointAtCenter("fractional power of a series vanishing at its center")
    f0 = cs[0]
    g0 = None
    if isinstance(f0, Fraction):
        g0 = _exact_root(f0, alpha)
    if g0 is None:
        f0 = to_mp(f0)
        g0 = mp.power(f0, to_mp(alpha))
        cs = [to_mp(c) for c in cs]
        alpha_v = to_mp(alpha)
    else:
        alpha_v = alpha
    g = [g0]
    for n in range(1, len(cs)):
        s = 0
        for k in range(1, n + 1):
            fk = cs[k]
            if fk:
                s += (alpha_v * k - (n - k)) * fk * g[n - k]
        g.append(s / (f0 * n))
    return PowerSeries(g, f.center, f.radius_hint)


# ---------------------------------------------------------------------------
# modular series kernels (Z/pZ, numpy int64; p < 2**26 keeps sums exact)
# ---------------------------------------------------------------------------

MODULAR_PRIME_BOUND = 2**26


def modular_primes(count: int, start: int = MODULAR_PRIME_BOUND) -> list[int]:
    """``count`` distinct primes just below ``start`` (descending)."""
    import sympy

    out = []
    p = start
    while len(out) < count:
        p = sympy.prevprime(p)
        out.append(int(p))
    return out


def mod_inv(a: int, p: int) -> int:
    return pow(int(a) % p, p - 2, p)


def frac_mod(x: Fraction, p: int) -> int:
    den = x.denominator % p
    if den == 0:
        raise ZeroDivisionError(f"denominator divisible by {p}")
    return (x.numerator % p) * mod_inv(den, p) % p


def mod_mul(a: np.ndarray, b: np.ndarray, p: int, n: int | None = None) -> np.ndarray:
    """Truncated product of two series mod p."""
    if n is None:
        n = min(len(a), len(b))
    a = a[:n]
    b = b[:n]
    # split b to keep every partial sum below 2**63
    lo = b & 0x1FFF
    hi = b >> 13
    r_lo = np.convolve(a, lo)[:n] % p
    r_hi = np.convolve(a, hi)[:n] % p
    return (r_lo + (r_hi * 8192) % p) % p


def mod_power_series(f: np.ndarray, alpha: Fraction, p: int) -> np.ndarray:
    """``(f/f0)**alpha`` mod p for a series with f0 != 0 (normalised to start at 1)."""
    n = len(f)
    inv_f0 = mod_inv(int(f[0]), p)
    f = f * inv_f0 % p
    a = frac_mod(Fraction(alpha), p)
    g = np.zeros(n, dtype=np.int64)
    g[0] = 1
    for m in range(1, n):
        k = np.arange(1, m + 1, dtype=np.int64)
        w = (a * k - (m - k)) % p
        terms = (w * f[1 : m + 1]) % p
        terms = (terms * g[m - 1 :: -1][:m]) % p
        g[m] = int(terms.sum() % p) * mod_inv(m, p) % p
    return g


def mod_hypergeometric(a: Fraction, b: Fraction, c: Fraction, n: int, p: int) -> np.ndarray:
    out = np.zeros(n, dtype=np.int64)
    out[0] = 1
    for k in range(n - 1):
        num = frac_mod((a + k) * (b + k), p)
        den = frac_mod((c + k) * (1 + k), p)
        out[k + 1] = out[k] * num % p * mod_inv(den, p) % p
    return out


def mod_compose(F: np.ndarray, u: np.ndarray, p: int) -> np.ndarray:
    """``F(u(x))`` mod p for a series ``u`` with zero constant term (Horner)."""
    n = len(u)
    if u[0] % p:
        raise InvalidParameter("inner series must vanish at the center")
    acc = np.zeros(n, dtype=np.int64)
    # the valuation of u is >= 1, so only the first n coefficients of F matter
    for c in F[:n][::-1]:
        acc = mod_mul(acc, u, p, n)
        acc[0] = (acc[0] + int(c)) % p
    return acc


def mod_series_from_poly(poly: RatPoly, n: int, p: int) -> np.ndarray:
    out = np.zeros(n, dtype=np.int64)
    for i, c in enumerate(poly.coeffs[:n]):
        out[i] = frac_mod(c, p)
    return out


def mod_series_inverse(f: np.ndarray, p: int) -> np.ndarray:
    n = len(f)
    inv0 = mod_inv(int(f[0]), p)
    g = np.zeros(n, dtype=np.int64)
    g[0] = inv0
    for m in range(1, n):
        s = int((f[1 : m + 1] * g[m - 1 :: -1][:m] % p).sum() % p)
        g[m] = (-s) * inv0 % p
    return g


def rational_reconstruction(a: int, m: int):
    """Fraction n/d with n/d = a mod m and |n|, d <= sqrt(m/2); None if absent."""
    a %= m
    bound = math.isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if math.gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int]:
    """Chinese remaindering of coprime moduli."""
    t = (r2 - r1) * pow(m1, -1, m2) % m2
    return r1 + m1 * t, m1 * m2
