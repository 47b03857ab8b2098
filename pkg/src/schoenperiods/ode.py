"""Linear ODEs with polynomial coefficients: discovery and local solution bases.

* :func:`find_min_ode` finds the minimal annihilating operator of a power
  series with rational coefficients.  The linear system for the unknown
  polynomial coefficients is solved exactly, by elimination modulo many
  word-size primes followed by Chinese remaindering and rational
  reconstruction; the result is verified modulo fresh primes.
* :func:`indicial_polynomial`, :func:`frobenius_basis` and
  :func:`holomorphic_basis` construct bases of local solutions at regular
  singular and ordinary points.  Logarithmic solutions are obtained from
  derivatives with respect to the exponent, computed by running the
  coefficient recurrence in a truncated power-series ring in ``eps = rho - rho0``.
* :func:`antiderivative_ode` lifts an equation to the one satisfied by the
  primitives of its solutions.

An operator of order ``d`` is stored as ``(p_0, ..., p_d)`` with ``p_j``
multiplying ``f^(d-j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath as mp
import numpy as np

from .errors import (
    InvalidParameter,
    NoODEFound,
    NotRegularSingular,
    SingularExpansionPoint,
)
from .numerics import (
    PowerSeries,
    RatPoly,
    crt_pair,
    frac_mod,
    is_exact,
    modular_primes,
    rational_reconstruction,
    snap_rational,
    to_fraction,
    to_mp,
)

# ---------------------------------------------------------------------------
# the operator type
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearODE:
    """``sum_j p_j(z) f^(d-j)(z) = 0`` with exact rational polynomial coefficients."""

    coeffs: tuple

    def __post_init__(self):
        cs = tuple(c if isinstance(c, RatPoly) else RatPoly(c) for c in self.coeffs)
        if not cs or cs[0].is_zero():
            raise InvalidParameter("leading coefficient of an ODE must be nonzero")
        object.__setattr__(self, "coeffs", cs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> RatPoly:
        return self.coeffs[0]

    def degree(self) -> int:
        return max(c.degree() for c in self.coeffs)

    def coefficient_of_derivative(self, m: int) -> RatPoly:
        """Polynomial multiplying ``f^(m)``."""
        return self.coeffs[self.order - m]

    def __eq__(self, other):
        return isinstance(other, LinearODE) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def normalized(self) -> "LinearODE":
        """Content-normalised: integer coefficients with gcd 1, leading term positive."""
        den = 1
        for p in self.coeffs:
            for c in p.coeffs:
                den = den * c.denominator // math.gcd(den, c.denominator)
        g = 0
        for p in self.coeffs:
            for c in p.coeffs:
                g = math.gcd(g, int(c * den))
        scale = Fraction(den, g)
        if self.leading.coeffs[-1] < 0:
            scale = -scale
        return LinearODE(tuple(p * scale for p in self.coeffs))

    def is_singular(self, z) -> bool:
        v = self.leading(z)
        return v == 0 if is_exact(z) else abs(v) < mp.mpf(10) ** (-(mp.mp.dps // 2))

    def singular_points(self) -> list:
        """Roots of the leading coefficient (numeric, current precision)."""
        return self.leading.numeric_roots()

    def local_coefficients(self, z0, n: int | None = None) -> list:
        """Coefficient lists of ``p_j(z0 + x)`` (exact for rational ``z0``)."""
        out = []
        for p in self.coeffs:
            if is_exact(z0):
                cs = list(p.taylor_shift(z0).coeffs)
            else:
                cs = p.taylor_shift_numeric(to_mp(z0))
            out.append(cs)
        return out

    def apply(self, f: PowerSeries) -> PowerSeries:
        """Residual series ``L(f)`` (truncated to ``len(f) - order`` terms)."""
        n = len(f) - self.order
        if n <= 0:
            return PowerSeries([], f.center)
        c = f.center
        derivs = [f]
        for _ in range(self.order):
            derivs.append(derivs[-1].differentiate())
        exact = f.exact and is_exact(c)
        total = [Fraction(0) if exact else mp.mpf(0)] * n
        for j, p in enumerate(self.coeffs):
            pc = p.taylor_shift(c).coeffs if exact else p.taylor_shift_numeric(to_mp(c))
            g = derivs[self.order - j].coeffs
            for a, pa in enumerate(pc):
                if pa == 0:
                    continue
                for t in range(a, n):
                    if t - a < len(g):
                        total[t] += pa * g[t - a]
        return PowerSeries(total, c)

    def to_record(self) -> dict:
        return {"coeffs": [[str(c) for c in p.coeffs] for p in self.coeffs]}

    @classmethod
    def from_record(cls, rec) -> "LinearODE":
        return cls(tuple(RatPoly([Fraction(c) for c in p]) for p in rec["coeffs"]))

    def pretty(self, var: str = "z") -> str:
        import sympy

        z = sympy.Symbol(var)
        terms = []
        for j, p in enumerate(self.coeffs):
            m = self.order - j
            if p.is_zero():
                continue
            terms.append(f"({sympy.factor(p.to_sympy(z))})*f^({m})")
        return " + ".join(terms) + " = 0"


def antiderivative_ode(ode: LinearODE) -> LinearODE:
    """Order ``d+1`` equation whose solutions are the constants and the primitives
    of solutions of ``ode`` (raise every derivative order by one)."""
    return LinearODE(tuple(ode.coeffs) + (RatPoly([]),))


# ---------------------------------------------------------------------------
# exact search for the minimal operator
# ---------------------------------------------------------------------------

#: Extra equations beyond the number of unknowns (guards against relations
#: that only hold through the truncation order).
ODE_SAFETY_EQUATIONS = 24


def _rref_mod(A: np.ndarray, p: int):
    """Reduced row echelon form over GF(p); returns (rows, pivot columns)."""
    A = A.copy() % p
    nrows, ncols = A.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if len(nz) == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = pow(int(A[r, c]), p - 2, p)
        A[r] = A[r] * inv % p
        col = A[:, c].copy()
        col[r] = 0
        rows = np.nonzero(col)[0]
        if len(rows):
            A[rows] = (A[rows] - (col[rows, None] * A[r][None, :]) % p) % p
        pivots.append(c)
        r += 1
    return A[:r], pivots


def _ode_matrix_mod(f: np.ndarray, order: int, deg: int, n_eq: int, p: int) -> np.ndarray:
    """Rows t = 0..n_eq-1: coefficient of x^t in sum_{m,i} a_{m,i} x^i f^(m)."""
    n = len(f)
    cols = []
    # [f^(m)]_s = f_{s+m} (s+m)!/s!
    for m in range(order + 1):
        fm = np.zeros(n, dtype=np.int64)
        for s in range(n - m):
            fac = 1
            for u in range(s + 1, s + m + 1):
                fac = fac * u % p
            fm[s] = int(f[s + m]) * fac % p
        for i in range(deg + 1):
            col = np.zeros(n_eq, dtype=np.int64)
            col[i:] = fm[: n_eq - i]
            cols.append(col)
    return np.stack(cols, axis=1)


def _nullity_mod(f, order, deg, p):
    n_unknown = (order + 1) * (deg + 1)
    n_eq = len(f) - order
    A = _ode_matrix_mod(f, order, deg, n_eq, p)
    _, piv = _rref_mod(A, p)
    return n_unknown - len(piv)


def _kernel_vector_mod(f, order, deg, p):
    """The unique (up to scale) kernel vector, normalised by its free column."""
    n_eq = len(f) - order
    A = _ode_matrix_mod(f, order, deg, n_eq, p)
    R, piv = _rref_mod(A, p)
    ncols = A.shape[1]
    free = [c for c in range(ncols) if c not in set(piv)]
    if len(free) != 1:
        return None, free
    fc = free[0]
    x = np.zeros(ncols, dtype=np.int64)
    x[fc] = 1
    for row, c in enumerate(piv):
        x[c] = (-int(R[row, fc])) % p
    return x, free


def _series_provider(seed) -> Callable[[int, int], np.ndarray]:
    if callable(seed):
        return seed
    coeffs = seed.coeffs if isinstance(seed, PowerSeries) else tuple(seed)
    if not all(is_exact(c) for c in coeffs):
        raise InvalidParameter("find_min_ode needs exact rational seed coefficients")

    def provider(p, n):
        if n > len(coeffs):
            n = len(coeffs)
        return np.array([frac_mod(to_fraction(c), p) for c in coeffs[:n]], dtype=np.int64)

    provider.available = len(coeffs)  # type: ignore[attr-defined]
    return provider


def find_min_ode(
    seed,
    max_order: int = 6,
    max_deg_start: int = 10,
    max_deg: int = 60,
    deg_step: int = 5,
    center=0,
) -> LinearODE:
    """Minimal-order, then minimal-degree operator annihilating ``seed``.

    ``seed`` is a :class:`PowerSeries` with ``Fraction`` coefficients, or a
    callable ``(p, n) -> numpy array`` returning the first ``n`` coefficients
    reduced mod ``p``.  The series is in the local variable ``z - center``;
    the returned operator is expressed in ``z``.
    """
    if isinstance(seed, PowerSeries):
        center = seed.center
    provider = _series_provider(seed)
    available = getattr(provider, "available", None)
    prime_list = modular_primes(400)
    p0 = prime_list[0]
    series_cache: dict = {}

    def series(p, n):
        hit = series_cache.get(p)
        if hit is None or len(hit) < n:
            hit = provider(p, n)
            series_cache[p] = hit
        return hit[:n]

    # Order first: the nullity at the largest admissible degree decides whether
    # an operator of order r exists, and (r being minimal) the kernel is
    # {a(z) L : deg a <= D - deg L}, so its dimension gives deg L directly.
    # The degree bound grows along the schedule only if nothing is found.
    found = None
    D = max_deg_start
    while found is None and D <= max_deg:
        for r in range(1, max_order + 1):
            need = (r + 1) * (D + 1) + r + ODE_SAFETY_EQUATIONS
            if available is not None and need > available:
                break
            f = series(p0, need)
            k = _nullity_mod(f, r, D, p0)
            if k > 0:
                found = (r, D - k + 1)
                break
        D = D + deg_step if D < max_deg else max_deg + 1
        if found is not None:
            r0, _ = found
            # a lower order might still exist at a higher degree: test it at max_deg
            for r in range(1, r0):
                need = (r + 1) * (max_deg + 1) + r + ODE_SAFETY_EQUATIONS
                if available is not None and need > available:
                    break
                k = _nullity_mod(series(p0, need), r, max_deg, p0)
                if k > 0:
                    found = (r, max_deg - k + 1)
                    break
    if found is None:
        raise NoODEFound("no annihilating operator within the search bounds", max_order=max_order, max_deg=max_deg)
    r, dmin = found
    need = (r + 1) * (dmin + 1) + r + ODE_SAFETY_EQUATIONS

    residues = None
    modulus = 1
    previous = None
    free_col = None
    used = []
    for idx, p in enumerate(prime_list[:-2]):
        f = series(p, need)
        x, free = _kernel_vector_mod(f, r, dmin, p)
        if x is None:
            continue  # unlucky prime
        if free_col is None:
            free_col = free[0]
        elif free[0] != free_col:
            continue
        used.append(p)
        xs = [int(v) for v in x]
        if residues is None:
            residues, modulus = xs, p
        else:
            merged = [crt_pair(a, modulus, b, p)[0] for a, b in zip(residues, xs)]
            residues, modulus = merged, modulus * p
        rec = [rational_reconstruction(v, modulus) for v in residues]
        if any(v is None for v in rec):
            previous = None
            continue
        if rec == previous:
            break
        previous = rec
    else:  # pragma: no cover
        raise NoODEFound("rational reconstruction did not stabilise")

    polys = []
    for m in range(r + 1):
        cs = rec[m * (dmin + 1) : (m + 1) * (dmin + 1)]
        polys.append(RatPoly(cs))
    # polys[m] multiplies f^(m) in the local variable x = z - center
    ode_local = LinearODE(tuple(reversed(polys)))
    # verify modulo fresh primes
    for p in prime_list[idx + 1 : idx + 3]:
        f = series(p, need)
        if not _annihilates_mod(ode_local, f, p):
            raise NoODEFound("reconstructed operator fails modular verification", prime=p)
    c = to_fraction(center)
    shifted = tuple(poly.taylor_shift(-c) for poly in ode_local.coeffs)
    return LinearODE(shifted).normalized()


def _annihilates_mod(ode: LinearODE, f: np.ndarray, p: int) -> bool:
    d = ode.order
    n = len(f)
    n_eq = n - d
    total = np.zeros(n_eq, dtype=np.int64)
    for j, poly in enumerate(ode.coeffs):
        m = d - j
        fm = np.zeros(n, dtype=np.int64)
        for s in range(n - m):
            fac = 1
            for u in range(s + 1, s + m + 1):
                fac = fac * u % p
            fm[s] = int(f[s + m]) * fac % p
        for i, c in enumerate(poly.coeffs):
            if c == 0 or i >= n_eq:
                continue
            total[i:] = (total[i:] + frac_mod(c, p) * fm[: n_eq - i]) % p
    return not total.any()


# ---------------------------------------------------------------------------
# local structure at a point
# ---------------------------------------------------------------------------


def _falling_poly(k: int) -> list:
    """Coefficients (ascending, in s) of the falling factorial [s]_k."""
    poly = [Fraction(1)]
    for u in range(k):
        # multiply by (s - u)
        new = [Fraction(0)] * (len(poly) + 1)
        for i, c in enumerate(poly):
            new[i + 1] += c
            new[i] -= u * c
        poly = new
    return poly


class _LocalOperator:
    """The operator rewritten as ``L(x^s) = sum_e g_e(s) x^(s - d + e)`` at a point."""

    def __init__(self, ode: LinearODE, z0):
        d = ode.order
        self.d = d
        self.exact = is_exact(z0)
        local = ode.local_coefficients(z0)
        zero = Fraction(0) if self.exact else mp.mpf(0)
        max_e = max(j + len(cs) - 1 for j, cs in enumerate(local))
        falling = [_falling_poly(k) for k in range(d + 1)]
        gs = []
        for e in range(max_e + 1):
            g = [zero] * (d + 1)
            for j, cs in enumerate(local):
                i = e - j
                if 0 <= i < len(cs) and cs[i] != 0:
                    for t, fc in enumerate(falling[d - j]):
                        g[t] += cs[i] * (fc if self.exact else to_mp(fc))
            gs.append(g)
        tol = None if self.exact else mp.mpf(10) ** (-(mp.mp.dps * 2) // 3)
        scale = max((abs(to_mp(c)) for g in gs for c in g), default=mp.mpf(1))

        def nonzero(g):
            if self.exact:
                return any(c != 0 for c in g)
            return any(abs(c) > tol * scale for c in g)

        e0 = next((e for e, g in enumerate(gs) if nonzero(g)), None)
        if e0 is None:
            raise InvalidParameter("operator vanishes identically")
        f0 = gs[e0]
        lead = f0[d]
        if (lead == 0) if self.exact else (abs(lead) <= tol * scale):
            raise NotRegularSingular("irregular singular point", z0=str(z0))
        self.e0 = e0
        # normalise so that the indicial polynomial is monic
        self.g = [[c / lead for c in g] for g in gs[e0:]]
        lead0 = local[0][0] if local[0] else 0
        self.regular_point = (lead0 != 0) if self.exact else abs(to_mp(lead0)) > tol * scale

    def indicial(self) -> list:
        return self.g[0]


def _poly_eval(cs, s):
    acc = 0
    for c in reversed(cs):
        acc = acc * s + c
    return acc


def _poly_taylor(cs, s0, L):
    """First ``L`` Taylor coefficients of the polynomial at ``s0``."""
    cs = [to_mp(c) for c in cs]
    out = []
    for _ in range(L):
        out.append(_poly_eval(cs, s0))
        cs = [i * c for i, c in enumerate(cs)][1:]
    # divide by l!
    return [v / math.factorial(l) for l, v in enumerate(out)]


def indicial_polynomial(ode: LinearODE, z0) -> RatPoly:
    """Monic indicial polynomial at ``z0`` (exact for rational ``z0``).

    For a non-rational ``z0`` the coefficients are rounded to rationals with
    bounded denominators; use :func:`indicial_roots` for numeric roots.
    """
    op = _LocalOperator(ode, z0)
    f0 = op.indicial()
    if op.exact:
        return RatPoly(f0)
    return RatPoly([Fraction(str(mp.nstr(mp.re(c), 40))).limit_denominator(10**12) for c in f0])


def indicial_roots(ode: LinearODE, z0, max_den: int = 12) -> list:
    """Roots of the indicial polynomial with multiplicity, snapped to rationals
    with denominator ``<= max_den`` when possible."""
    op = _LocalOperator(ode, z0)
    return _snapped_roots(op.indicial(), max_den)


def _snapped_roots(f0, max_den):
    """Roots with multiplicity; exact rational roots are found exactly when the
    coefficients are rational, the rest numerically (multiple roots are
    ill-conditioned, so the numeric search runs at moderate precision and
    roots are snapped to small-denominator rationals)."""
    if all(is_exact(c) for c in f0):
        import sympy

        x = sympy.Symbol("x")
        poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(f0)], x)
        out = []
        for fac, mult in poly.factor_list()[1]:
            if fac.degree() == 1:
                a, b = fac.all_coeffs()
                r = Fraction(int((-b / a).p), int((-b / a).q))
                out += [r] * mult
            else:
                with mp.workdps(mp.mp.dps + 20):
                    rts = mp.polyroots([to_mp(Fraction(int(c.p), int(c.q))) for c in fac.all_coeffs()], maxsteps=400, extraprec=mp.mp.prec)
                for r in rts:
                    out += [r] * mult
        return out
    coeffs = [to_mp(c) for c in reversed(f0)]
    with mp.workdps(60):
        raw = mp.polyroots(coeffs, maxsteps=800, extraprec=400)
    out = []
    tol = mp.mpf(10) ** -8
    for r in raw:
        snapped = snap_rational(r, max_den, tol)
        out.append(snapped if snapped is not None else +r)
    return out


# ---------------------------------------------------------------------------
# regular solutions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegularSolution:
    """``(z - z0)^rho * sum_i log^i(z - z0) * sum_K logparts[i][K] (z - z0)^K``.

    The logarithm is principal unless a value is supplied explicitly (which
    is how analytic continuation around ``z0`` is expressed).
    """

    center: object
    rho: object
    logparts: tuple
    radius_hint: object = mp.inf

    @property
    def log_degree(self) -> int:
        return len(self.logparts) - 1

    @property
    def h(self) -> list:
        """Log-coefficient series ``h_k`` as :class:`PowerSeries`."""
        return [PowerSeries(list(c), self.center, self.radius_hint) for c in self.logparts]

    def evaluate(self, z, log_value=None):
        x = to_mp(z) - to_mp(self.center)
        if log_value is None:
            if x == 0:
                return self._value_at_center()
            log_value = mp.log(x)
        rho = to_mp(self.rho)
        xpow = mp.exp(rho * log_value) if rho != 0 else mp.mpf(1)
        total = 0
        lp = mp.mpf(1)
        for i, cs in enumerate(self.logparts):
            if i:
                lp = lp * log_value
            acc = 0
            for c in reversed(cs):
                acc = acc * x + c
            total += acc * lp
        return xpow * total

    def _value_at_center(self):
        rho = to_mp(self.rho)
        # lowest power x^(rho + K) with a nonzero coefficient decides the limit
        if any(any(c != 0 for c in cs) for cs in self.logparts[1:]) and mp.re(rho) <= 0:
            raise InvalidParameter("logarithmic solution at its center")
        if rho == 0:
            return self.logparts[0][0] if self.logparts[0] else mp.mpf(0)
        if mp.re(rho) > 0:
            return mp.mpf(0)
        raise InvalidParameter("singular solution at its center")

    def derivative(self) -> "RegularSolution":
        rho = self.rho
        L = len(self.logparts)
        n = max(len(c) for c in self.logparts)
        parts = []
        for i in range(L):
            cs = self.logparts[i]
            nxt = self.logparts[i + 1] if i + 1 < L else ()
            new = []
            for K in range(n):
                a = cs[K] if K < len(cs) else 0
                b = nxt[K] if K < len(nxt) else 0
                new.append((rho + K) * a + (i + 1) * b)
            parts.append(tuple(new))
        parts = _trim_logparts(parts)
        return RegularSolution(self.center, rho - 1, tuple(parts), self.radius_hint)

    def primitive(self) -> "RegularSolution":
        """Term-wise primitive ``sum a x^s log^i -> int``, vanishing at the center
        when every exponent has positive real part after integration."""
        rho = self.rho
        L = len(self.logparts)
        n = max(len(c) for c in self.logparts)
        zero = mp.mpf(0)
        out = [[zero] * n for _ in range(L + 1)]
        for i in range(L):
            for K, a in enumerate(self.logparts[i]):
                if a == 0:
                    continue
                s1 = rho + K + 1
                if (s1 == 0) if is_exact(s1) else abs(to_mp(s1)) < mp.mpf(10) ** (-(mp.mp.dps // 2)):
                    out[i + 1][K] += a / (i + 1)
                    continue
                # int x^s log^i = x^(s+1) sum_l (-1)^l i!/(i-l)! log^(i-l) / (s+1)^(l+1)
                fact = 1
                for l in range(i + 1):
                    if l:
                        fact *= i - l + 1
                    out[i - l][K] += a * (-1) ** l * fact / to_mp(s1) ** (l + 1)
        parts = _trim_logparts([tuple(c) for c in out])
        return RegularSolution(self.center, rho + 1, tuple(parts), self.radius_hint)

    def truncate(self, n: int) -> "RegularSolution":
        return RegularSolution(self.center, self.rho, tuple(c[:n] for c in self.logparts), self.radius_hint)


def _drop_negligible_logs(parts):
    """Remove trailing log parts that are rounding noise (apparent singularities)."""
    scale = max(abs(c) for c in parts[0]) if parts[0] else mp.mpf(1)
    tol = mp.mpf(10) ** (-(mp.mp.dps // 2)) * max(scale, 1)
    parts = list(parts)
    while len(parts) > 1 and all(abs(c) < tol for c in parts[-1]):
        parts.pop()
    return parts


def _trim_logparts(parts):
    parts = list(parts)
    while len(parts) > 1 and all(c == 0 for c in parts[-1]):
        parts.pop()
    return parts


def _series_inverse_lead(cs, L):
    """Inverse of a truncated eps-series with nonzero constant term."""
    inv = [mp.mpf(0)] * L
    inv[0] = 1 / cs[0]
    for n in range(1, L):
        s = 0
        for k in range(1, min(n, len(cs) - 1) + 1):
            s += cs[k] * inv[n - k]
        inv[n] = -s * inv[0]
    return inv


def _eps_mul(a, b, L):
    out = [mp.mpf(0)] * L
    for i, x in enumerate(a[:L]):
        if x == 0:
            continue
        for j in range(min(len(b), L - i)):
            out[i + j] += x * b[j]
    return out


def _root_classes(roots):
    """Group roots (with multiplicity) into classes congruent mod Z.

    Returns a list of classes; each class is a list of (root, multiplicity)
    sorted by increasing real part."""
    tol = mp.mpf(10) ** (-(mp.mp.dps // 4))
    distinct: list = []
    for r in roots:
        for item in distinct:
            if _same(item[0], r, tol):
                item[1] += 1
                break
        else:
            distinct.append([r, 1])
    classes: list = []
    for r, m in distinct:
        for cl in classes:
            diff = to_mp(r) - to_mp(cl[0][0])
            if abs(mp.im(diff)) < tol and abs(mp.re(diff) - mp.nint(mp.re(diff))) < tol:
                cl.append((r, m))
                break
        else:
            classes.append([(r, m)])
    for cl in classes:
        cl.sort(key=lambda rm: mp.re(to_mp(rm[0])))
    return classes


def _same(a, b, tol):
    if is_exact(a) and is_exact(b):
        return a == b
    return abs(to_mp(a) - to_mp(b)) < tol


def frobenius_basis(ode: LinearODE, z0, n_terms: int, radius_hint=None, max_den: int = 12) -> list:
    """Basis of ``order`` regular solutions at ``z0`` with ``n_terms`` terms each.

    Within each class of indicial roots congruent mod Z the roots are handled
    from the largest real part downwards.  For a root ``rho`` with ``P``
    roots (counted with multiplicity) above it in its class, the recurrence
    is started from ``c_0 = prod_{k=1}^{G} f0(rho + eps + k)`` (``G`` the
    largest integer gap above ``rho``), and the ``eps``-derivatives of order
    ``P .. P + m(rho) - 1`` at ``eps = 0`` are the new solutions; the first
    ``P`` derivatives belong to roots already treated.
    """
    op = _LocalOperator(ode, z0)
    d = op.d
    f0 = op.indicial()
    roots = _snapped_roots(f0, max_den)
    if len(roots) != d:
        raise NotRegularSingular("indicial polynomial degree differs from order")
    g = [[to_mp(c) for c in gg] for gg in op.g]  # g[t] = g_{e0+t}, monic indicial g[0]
    center = z0
    sols = []
    for cls in _root_classes(roots):
        top = to_mp(cls[-1][0])
        above = 0
        for r, m in reversed(cls):
            G = int(mp.nint(mp.re(top - to_mp(r))))
            P = above
            L = 2 * P + m
            # c0(eps) = prod_{k=1}^{G} f0(r + eps + k)
            c0 = [mp.mpf(1)] + [mp.mpf(0)] * (L - 1)
            for k in range(1, G + 1):
                c0 = _eps_mul(c0, _poly_taylor(g[0], to_mp(r) + k, L), L)
            coeffs = _eps_recurrence(g, to_mp(r), c0, n_terms, L, P + m)
            for j in range(P, P + m):
                parts = []
                for i in range(j + 1):
                    ser = tuple(coeffs[K][j - i] / math.factorial(i) for K in range(n_terms))
                    parts.append(ser)
                parts = _drop_negligible_logs(parts)
                sols.append(RegularSolution(center, r, tuple(parts), radius_hint if radius_hint is not None else mp.inf))
            above += m
    return sols


def _eps_recurrence(g, rho, c0, n_terms, L, keep):
    """Coefficients ``c_K(eps)`` (lists of length >= ``keep``) of the generic
    solution ``x^(rho+eps) sum_K c_K(eps) x^K``."""
    T = len(g) - 1
    tay_cache: dict = {}

    def gtay(t, K):
        key = (t, K)
        v = tay_cache.get(key)
        if v is None:
            v = _poly_taylor(g[t], rho + K, L)
            tay_cache[key] = v
        return v

    tol = mp.mpf(10) ** (-(mp.mp.dps // 3))
    cs = [c0]
    for K in range(1, n_terms):
        acc = [mp.mpf(0)] * L
        for t in range(1, min(T, K) + 1):
            prev = cs[K - t]
            gt = gtay(t, K - t)
            prod = _eps_mul(prev, gt, L)
            for i in range(L):
                acc[i] += prod[i]
        den = gtay(0, K)
        # valuation of f0(rho + eps + K) at eps = 0
        v = 0
        while v < L and abs(den[v]) < tol * max(1, abs(den[-1]) if den else 1):
            v += 1
        if v >= L:
            raise NotRegularSingular("indicial polynomial vanishes identically along the recurrence")
        num = [-a for a in acc[v:]] + [mp.mpf(0)] * v
        dshift = den[v:] + [mp.mpf(0)] * v
        inv = _series_inverse_lead(dshift, L)
        cs.append(_eps_mul(num, inv, L))
    return cs


def holomorphic_basis(ode: LinearODE, z0, n_terms: int, radius_hint=None) -> list:
    """Solutions ``f_j`` with ``f_j^(k)(z0) = delta_jk`` for ``0 <= j, k < order``."""
    if ode.is_singular(z0):
        raise SingularExpansionPoint("holomorphic basis requested at a singular point", z0=str(z0))
    d = ode.order
    local = ode.local_coefficients(z0)
    # solve p_0 f^(d) = -sum_{j>=1} p_j f^(d-j) coefficientwise
    exact = is_exact(z0)
    conv = (lambda c: c) if exact else to_mp
    P = [[conv(c) for c in cs] for cs in local]
    lead_inv = 1 / P[0][0]
    out = []
    for j in range(d):
        f = [Fraction(0) if exact else mp.mpf(0)] * n_terms
        f[j] = Fraction(1, math.factorial(j)) if exact else mp.mpf(1) / math.factorial(j)
        for N in range(d, n_terms):
            # coefficient of x^(N-d) in L(f) = 0
            t = N - d
            s = 0
            for jj, cs in enumerate(P):
                m = d - jj
                for i, c in enumerate(cs):
                    if i > t or c == 0:
                        continue
                    idx = t - i + m  # f index
                    if idx >= N:
                        continue
                    s += c * f[idx] * _falling_int(idx, m)
            f[N] = -s * lead_inv / _falling_int(N, d)
        out.append(PowerSeries(f, z0, radius_hint))
    return out


def _falling_int(n: int, m: int) -> int:
    """n (n-1) ... (n-m+1)."""
    r = 1
    for u in range(m):
        r *= n - u
    return r


def holomorphic_solutions(ode: LinearODE, z0, n_terms: int, radius_hint=None) -> list:
    """:func:`holomorphic_basis` wrapped as :class:`RegularSolution` objects."""
    return [
        RegularSolution(z0, 0, (tuple(to_mp(c) for c in s.coeffs),), radius_hint if radius_hint is not None else mp.inf)
        for s in holomorphic_basis(ode, z0, n_terms, radius_hint)
    ]


def residual(ode: LinearODE, sol: RegularSolution, z) -> object:
    """``L(sol)(z)`` evaluated numerically (for testing)."""
    d = ode.order
    derivs = [sol]
    for _ in range(d):
        derivs.append(derivs[-1].derivative())
    zv = to_mp(z)
    return sum(p(zv) * derivs[d - j].evaluate(zv) for j, p in enumerate(ode.coeffs))


def relative_residual(ode: LinearODE, sol: RegularSolution, z) -> object:
    """``|L(sol)(z)|`` divided by the largest term ``|p_j(z) sol^(m)(z)|``.

    Near a singular point the individual terms of ``L(sol)`` are large (log
    solutions and high derivatives), so cancellation to working precision
    is measured relative to them.
    """
    d = ode.order
    derivs = [sol]
    for _ in range(d):
        derivs.append(derivs[-1].derivative())
    zv = to_mp(z)
    terms = [p(zv) * derivs[d - j].evaluate(zv) for j, p in enumerate(ode.coeffs)]
    scale = max(abs(t) for t in terms)
    return abs(sum(terms)) / scale if scale else abs(sum(terms))
