"""Weierstrass surfaces: fibers, J-invariant, periods and seed series."""

from __future__ import annotations

from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schoenperiods import catalog
from schoenperiods.errors import InvalidSeedCenter, InvalidSurface, NonSemistablePoint
from schoenperiods.numerics import RatPoly, frac_mod, modular_primes
from schoenperiods.surface import (
    SigmaPoint,
    WeierstrassSurface,
    branch_signs,
    classify_fibers,
    elliptic_period,
    hypergeometric_period,
    j_invariant,
    ordered_roots,
    seed_period_series,
    seed_series_mod,
)


def _surfaces():
    seen, out = set(), []
    for ex in catalog.list_examples():
        for s in (ex.surface1, ex.surface2):
            if (s.g2, s.g3) not in seen:
                seen.add((s.g2, s.g3))
                out.append((ex.id, s))
    return out


SURFACES = _surfaces()
WORKED = catalog.get_example("type2-swap-bc")


def _same_point(p: SigmaPoint, q: SigmaPoint) -> bool:
    if p.is_infinity or q.is_infinity:
        return p.is_infinity and q.is_infinity
    with mp.workdps(30):
        return p.minpoly == q.minpoly and abs(mp.mpmathify(p.value()) - mp.mpmathify(q.value())) < 1e-20


@pytest.mark.parametrize("example_id", catalog.example_ids())
def test_classified_fibers_match_stated(example_id):
    ex = catalog.get_example(example_id)
    got = [(f.kodaira_n, f.location) for f in ex.surface2.fibers]
    want = catalog.stated_fibers(example_id)
    assert len(got) == len(want)
    for n, p in want:
        assert any(n == m and _same_point(p, q) for m, q in got), (n, p)


@pytest.mark.parametrize("name,s", SURFACES, ids=[n for n, _ in SURFACES])
def test_fiber_euler_numbers_sum_to_12k(name, s):
    assert sum(f.kodaira_n for f in s.fibers) == 12 * s.k


def test_additive_fiber_rejected():
    with pytest.raises(NonSemistablePoint):
        classify_fibers(WeierstrassSurface(RatPoly([0, 1]), RatPoly([0, 1])))


def test_invalid_surfaces():
    with pytest.raises(InvalidSurface):
        WeierstrassSurface(RatPoly([0, 0, 0, 0, 0, 1]), RatPoly([1]))  # deg g2 > 4k
    with pytest.raises(InvalidSurface):
        WeierstrassSurface(RatPoly([3]), RatPoly([1]))  # g2^3 = 27 g3^2


@settings(max_examples=20, deadline=None)
@given(st.fractions(min_value=-3, max_value=3, max_denominator=5).filter(lambda x: x != 0),
       st.fractions(min_value=-5, max_value=5, max_denominator=7))
def test_j_invariant_is_admissibly_invariant(u, z):
    s = WORKED.surface1
    t = WeierstrassSurface(s.g2 * RatPoly([u**4]), s.g3 * RatPoly([u**6]), s.k)
    if s.discriminant_poly(z) == 0:
        return
    assert j_invariant(s, z) == j_invariant(t, z)


@pytest.mark.parametrize("z", [Fraction(-3), Fraction(-1, 3), Fraction(1), Fraction(7)])
def test_closed_form_period_matches_quadrature(z):
    with mp.workdps(40):
        for u in (1, 2):
            elliptic_period(WORKED.surface2, z, u, check=True)


def test_roots_are_ordered():
    with mp.workdps(30):
        roots = ordered_roots(WORKED.surface1, Fraction(1))
        if roots.all_real:
            assert roots.r1 < roots.r2 < roots.r3
        else:
            assert mp.im(roots.r1) < mp.im(roots.r2) < mp.im(roots.r3)
        assert set(branch_signs(WORKED.surface1, Fraction(1))) <= {1, -1}


def test_hypergeometric_period_is_a_primitive_period():
    s = WORKED.surface1
    with mp.workdps(40):
        z = mp.mpf("-0.02")  # close to the I_n fiber over 0, |1/J| < 1
        h = hypergeometric_period(s, z)
        p1, p2 = elliptic_period(s, z, 1), elliptic_period(s, z, 2)
        best = min(
            abs(h / mp.mpc(0, 1) ** j - a * p1 - b * p2)
            for j in range(4)
            for a in range(-2, 3)
            for b in range(-2, 3)
            if (a, b) != (0, 0)
        )
        assert best < mp.mpf(10) ** -30 * abs(h)


def test_seed_series_matches_printed_expansion():
    seed = seed_period_series(WORKED.surface1, WORKED.surface2, 0, order=7)
    printed = [Fraction(1, 3), Fraction(-7, 18), Fraction(367, 648), Fraction(-5215, 5832),
               Fraction(416773, 279936), Fraction(-12911183, 5038848), Fraction(613914581, 136048896)]
    assert [c / 3 for c in seed.coeffs[:7]] == printed


def test_seed_series_mod_matches_exact():
    p = modular_primes(1)[0]
    exact = seed_period_series(WORKED.surface1, WORKED.surface2, 0, order=12, weight=1)
    modp = seed_series_mod(WORKED.surface1, WORKED.surface2, 0, 12, p, weight=1)
    assert [int(v) for v in modp[:12]] == [frac_mod(c, p) for c in exact.coeffs[:12]]


def test_seed_center_must_be_common_singular_fiber():
    with pytest.raises(InvalidSeedCenter):
        seed_period_series(WORKED.surface1, WORKED.surface2, 1, order=5)


def test_surface_record_round_trip():
    s = WORKED.surface2
    assert WeierstrassSurface.from_record(s.to_record()) == s
