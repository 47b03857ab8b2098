"""Built-in example threefolds, Moebius pullbacks and reference data.

The catalog contains the four Type I self-products, the five Type II
products ``E1 x E1∘phi`` (``phi`` a Moebius map permuting the three
non-``I1`` fibers of the ``(I1, I2, I3, I6)`` surface), and the three
Type III modular self-products over ``X1(N)``, ``N in {7, 8, 10}``.

Every example carries the published reference values it should reproduce:
lattice bases, spanning vectors, modular-form period constants together
with the rational combinations expressing the lattice basis in them, and
(for one Type II example) the full interval tables.  The data lives in
``data/examples.json`` and ``data/reference.json``; decimals are kept as
strings at their stored precision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path

import mpmath as mp

from .errors import InvalidMobius, InvalidSurface, UnknownExample
from .numerics import RatPoly, to_fraction
from .surface import SigmaPoint, WeierstrassSurface

TYPE_TAGS = ("I", "II", "III")


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def parse_complex(pair) -> mp.mpc:
    """``[re, im]`` decimal strings (or ``"re|im"``) -> ``mpc`` at current precision."""
    if isinstance(pair, str):
        pair = pair.split("|")
    re_, im_ = pair
    return mp.mpc(mp.mpf(re_), mp.mpf(im_))


def stored_digits(pair) -> int:
    """Number of significant digits of a stored decimal pair (the larger part)."""
    if isinstance(pair, str):
        pair = pair.split("|")
    best = 0
    for s in pair:
        mant = s.lstrip("-+").split("e")[0].replace(".", "").lstrip("0")
        best = max(best, len(mant))
    return best


def _point_from_record(rec) -> SigmaPoint:
    if isinstance(rec, str):
        return SigmaPoint.infinity() if rec == "inf" else SigmaPoint.rational(Fraction(rec))
    lo, hi = (Fraction(x) for x in rec["interval"])
    return SigmaPoint(tuple(int(c) for c in rec["minpoly"]), lo, hi, rec.get("label", "?"), 0)


def _surface_from_record(rec, name: str = "") -> WeierstrassSurface:
    return WeierstrassSurface(
        RatPoly([Fraction(c) for c in rec["g2"]]),
        RatPoly([Fraction(c) for c in rec["g3"]]),
        int(rec.get("k", 1)),
        name,
    )


# ---------------------------------------------------------------------------
# Moebius pullback
# ---------------------------------------------------------------------------

def _pull_form(p: RatPoly, degree: int, a, b, c, d) -> RatPoly:
    """``P(a z + b, c z + d)`` for the binary form ``P(X, Y) = sum p_i X^i Y^(D-i)``."""
    num = RatPoly([b, a])
    den = RatPoly([d, c])
    out = RatPoly([0])
    for i, coef in enumerate(p.coeffs):
        if coef:
            out = out + coef * (num**i) * (den ** (degree - i))
    return out


def mobius_pullback(s: WeierstrassSurface, mobius) -> WeierstrassSurface:
    """Pull ``s`` back along ``phi(z) = (a z + b) / (c z + d)``.

    The new surface has ``g2'(z) = (cz+d)^(4k) g2(phi(z))`` and
    ``g3'(z) = (cz+d)^(6k) g3(phi(z))``: the denominators are cleared by the
    4th/6th powers, i.e. the coefficients are substituted into the binary
    forms ``g2(X, Y)``, ``g3(X, Y)``.  Its fiber over ``z`` is the fiber of
    ``s`` over ``phi(z)``.
    """
    try:
        a, b, c, d = (to_fraction(x) for x in mobius)
    except (TypeError, ValueError) as exc:
        raise InvalidMobius("Moebius map must be four rational numbers (a, b, c, d)") from exc
    if a * d - b * c == 0:
        raise InvalidMobius("degenerate Moebius map: ad - bc = 0", map=(str(a), str(b), str(c), str(d)))
    k = s.k
    g2 = _pull_form(s.g2, 4 * k, a, b, c, d)
    g3 = _pull_form(s.g3, 6 * k, a, b, c, d)
    name = f"{s.name}∘({a}z+{b})/({c}z+{d})" if s.name else ""
    return WeierstrassSurface(g2, g3, k, name)


def scaling_factor(s: WeierstrassSurface, t: WeierstrassSurface) -> Fraction | None:
    """``lam`` with ``t.g2 = lam^2 s.g2`` and ``t.g3 = lam^3 s.g3``, or ``None``.

    Surfaces related this way (``x -> lam x``, ``y -> lam^(3/2) y``) are
    isomorphic over the algebraic closure and have identical fibers; their
    periods differ by the constant factor ``lam^(-1/2)``.
    """
    if s.k != t.k:
        return None

    def ratio(p: RatPoly, q: RatPoly):
        r = None
        n = max(len(p.coeffs), len(q.coeffs))
        for i in range(n):
            x, y = p.coeff(i), q.coeff(i)
            if x == 0 and y == 0:
                continue
            if x == 0 or y == 0:
                return False
            if r is None:
                r = y / x
            elif r != y / x:
                return False
        return r

    r2 = ratio(s.g2, t.g2)
    r3 = ratio(s.g3, t.g3)
    if r2 is False or r3 is False:
        return None
    if r2 is None and r3 is None:
        return Fraction(1)
    if r2 is None:
        return None if r3 is None else _cube_root(r3)
    if r3 is None:
        return None
    lam = r3 / r2
    return lam if lam * lam == r2 else None


def _cube_root(x: Fraction):
    for sign in (1, -1):
        n = round(abs(x.numerator) ** (1 / 3)) * sign
        dd = round(x.denominator ** (1 / 3))
        for dn in (-1, 0, 1):
            cand = Fraction(n + dn * sign, dd) if dd else None
            if cand is not None and cand**3 == x:
                return cand
    return None


# ---------------------------------------------------------------------------
# reference data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Combination:
    """``alpha * pi^2 omega1 + beta * pi^2 omega2`` with Gaussian-rational ``alpha, beta``."""

    alpha: tuple  # (re, im) Fractions
    beta: tuple
    note: str = ""

    @classmethod
    def from_record(cls, rec) -> "Combination":
        al = tuple(Fraction(x) for x in rec["omega1"])
        be = tuple(Fraction(x) for x in rec["omega2"])
        return cls(al, be, rec.get("note", ""))

    def evaluate(self, pi2_omega1, pi2_omega2):
        al = mp.mpc(mp.mpf(self.alpha[0].numerator) / self.alpha[0].denominator,
                    mp.mpf(self.alpha[1].numerator) / self.alpha[1].denominator)
        be = mp.mpc(mp.mpf(self.beta[0].numerator) / self.beta[0].denominator,
                    mp.mpf(self.beta[1].numerator) / self.beta[1].denominator)
        return al * pi2_omega1 + be * pi2_omega2

    def __str__(self) -> str:
        def c(z):
            re, im = z
            if im == 0:
                return f"{re}"
            if re == 0:
                return f"{im}i"
            return f"({re}+{im}i)"

        return f"{c(self.alpha)}·π²ω₁ + {c(self.beta)}·π²ω₂"


@dataclass(frozen=True)
class ModularReference:
    """Weight-4 newform periods ``pi^2 omega_1``, ``pi^2 omega_2`` and lattice combinations.

    ``combinations`` are the combinations as stored with the reference
    results (verbatim, including transcription slips); ``corrected`` holds
    the repaired combinations where the stored ones are known to be off.
    """

    label: str
    pi2_omega1: tuple
    pi2_omega2: tuple
    combinations: tuple
    corrected: tuple = ()
    applies_to: dict = field(default_factory=dict)

    @classmethod
    def from_record(cls, rec) -> "ModularReference":
        return cls(
            rec["label"],
            tuple(rec["pi2_omega1"]),
            tuple(rec["pi2_omega2"]),
            tuple(Combination.from_record(c) for c in rec["basis_combinations"]),
            tuple(Combination.from_record(c) for c in rec.get("corrected_combinations", ())),
            dict(rec.get("applies_to", {})),
        )

    def values(self, corrected: bool = False) -> list:
        """Numeric values of the combinations at the current precision."""
        w1, w2 = parse_complex(self.pi2_omega1), parse_complex(self.pi2_omega2)
        combos = self.corrected if (corrected and self.corrected) else self.combinations
        return [c.evaluate(w1, w2) for c in combos]


@dataclass(frozen=True)
class ExampleSpec:
    """One catalog example: the two surfaces, singular points and reference results."""

    id: str
    type_tag: str
    surface1: WeierstrassSurface
    surface2: WeierstrassSurface
    k: int
    sigma: tuple
    fibers: tuple  # ((n1, n2), point) per point of sigma, in sigma order
    references: dict
    modular_form: ModularReference | None = None
    mobius: tuple | None = None
    name: str = ""

    @property
    def weights(self) -> tuple:
        return tuple(range(2 * self.k - 1))

    @property
    def self_product(self) -> bool:
        a, b = self.surface1, self.surface2
        return (a.g2, a.g3, a.k) == (b.g2, b.g3, b.k)

    def fiber_orders(self, point: SigmaPoint) -> tuple:
        for (n1, n2), p in self.fibers:
            if p == point:
                return (n1, n2)
        return (0, 0)

    def lattice_reference(self, target: str) -> list:
        """Stored basis of the period lattice for ``target in {"x", "xhat"}`` (Types I, II)."""
        return list(self.references.get(target, []))

    def vectors(self, target: str) -> list:
        """Stored spanning vectors ``R_n`` / ``R^_n`` for Type III."""
        return list(self.references.get("vectors", {}).get(target, []))


def _build_sigma(rec) -> tuple:
    """Singular points of both surfaces (union), ordered, with the fiber orders."""
    s1 = _surface_from_record(rec["surface1"])
    s2 = _surface_from_record(rec["surface2"])
    orders: dict = {}
    points: dict = {}
    for j, s in enumerate((s1, s2)):
        for f in s.fibers:
            key = _point_key(f.location)
            points.setdefault(key, f.location)
            orders.setdefault(key, [0, 0])[j] = f.kodaira_n
    ordered = sorted(points.values(), key=SigmaPoint.sort_key)
    return tuple(ordered), tuple(((orders[_point_key(p)][0], orders[_point_key(p)][1]), p) for p in ordered)


def _point_key(p: SigmaPoint):
    if p.is_infinity:
        return ("inf",)
    with mp.workdps(40):
        return (p.minpoly, mp.nstr(mp.re(p.value()), 25))


@lru_cache(maxsize=None)
def _raw_examples() -> tuple:
    text = resources.files("schoenperiods").joinpath("data/examples.json").read_text()
    return tuple(json.loads(text)["examples"])


@lru_cache(maxsize=None)
def reference_tables() -> dict:
    """Full interval tables (q, M, r, Theta) stored for golden comparisons."""
    text = resources.files("schoenperiods").joinpath("data/reference.json").read_text()
    return json.loads(text)


@lru_cache(maxsize=None)
def _example(rec_index: int) -> ExampleSpec:
    rec = _raw_examples()[rec_index]
    s1 = _surface_from_record(rec["surface1"], rec["id"] + ":E1")
    s2 = _surface_from_record(rec["surface2"], rec["id"] + ":E2")
    sigma, fibers = _build_sigma(rec)
    modular = ModularReference.from_record(rec["modular"]) if rec.get("modular") else None
    return ExampleSpec(
        id=rec["id"],
        type_tag=rec["type"],
        surface1=s1,
        surface2=s2,
        k=int(rec["k"]),
        sigma=sigma,
        fibers=fibers,
        references=dict(rec["lattices"]),
        modular_form=modular,
        mobius=tuple(Fraction(x) for x in rec["mobius"]) if rec.get("mobius") else None,
        name=rec.get("name", ""),
    )


def stated_fibers(example_id: str) -> list:
    """The fiber list stored with the example for its second surface: ``[(n, SigmaPoint)]``."""
    for rec in _raw_examples():
        if rec["id"] == example_id:
            return [(int(n), _point_from_record(p)) for n, p in rec["fibers"]]
    raise UnknownExample(f"unknown example {example_id!r}", known=", ".join(example_ids()))


def example_ids() -> list:
    return [rec["id"] for rec in _raw_examples()]


def list_examples() -> list:
    """All catalog examples: 4 of Type I, 5 of Type II, 3 of Type III (in that order)."""
    return [_example(i) for i in range(len(_raw_examples()))]


def get_example(example_id: str) -> ExampleSpec:
    for i, rec in enumerate(_raw_examples()):
        if rec["id"] == example_id:
            return _example(i)
    raise UnknownExample(f"unknown example {example_id!r}", known=", ".join(example_ids()))


# ---------------------------------------------------------------------------
# external surface files
# ---------------------------------------------------------------------------

def load_surface_file(path) -> tuple:
    """Read a product definition from a JSON record.

    Format::

        {"g2": ["12", "24", ...], "g3": [...], "k": 1}                  # self-product
        {"surface1": {...}, "surface2": {...}, "id": "my-example"}     # general

    Coefficients are exact rationals (strings such as ``"27/4"``) in
    ascending powers of ``z``.  Returns ``(id, surface1, surface2)``.
    """
    try:
        rec = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidSurface(f"cannot read surface file: {exc}", path=str(path)) from exc
    try:
        if "surface1" in rec:
            s1 = _surface_from_record(rec["surface1"], "E1")
            s2 = _surface_from_record(rec.get("surface2", rec["surface1"]), "E2")
        else:
            s1 = _surface_from_record(rec, "E")
            s2 = s1
    except (KeyError, ValueError, ZeroDivisionError) as exc:
        raise InvalidSurface(f"malformed surface record: {exc}", path=str(path)) from exc
    return rec.get("id", Path(path).stem), s1, s2
