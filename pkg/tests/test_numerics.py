"""Exact polynomials, power series, modular helpers and precision handling."""

from __future__ import annotations

from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schoenperiods.errors import InvalidParameter
from schoenperiods.numerics import (
    PRESETS,
    PowerSeries,
    PrecisionContext,
    RatPoly,
    crt_pair,
    fractional_power_series,
    frac_mod,
    hypergeometric_2f1,
    mod_hypergeometric,
    mod_mul,
    mod_power_series,
    modular_primes,
    rational_reconstruction,
    snap_rational,
)

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
polys = st.lists(fractions, min_size=1, max_size=6).map(RatPoly)


def test_presets():
    assert PRESETS["desk"] == (200, 140)
    assert PRESETS["paper"] == (1000, 350)
    ctx = PrecisionContext.preset("desk")
    assert ctx.key() == (200, 140)
    assert ctx.working_digits > ctx.digits
    with pytest.raises(InvalidParameter):
        PrecisionContext.preset("laptop")
    with pytest.raises(InvalidParameter):
        PrecisionContext(10, 100)


def test_workdps_restores_precision():
    before = mp.mp.dps
    with PrecisionContext(50, 20).workdps():
        assert mp.mp.dps == 50 + PrecisionContext(50, 20).guard
    assert mp.mp.dps == before


def test_ratpoly_basics():
    p = RatPoly([1, 2, 3])
    assert p.degree() == 2
    assert p(Fraction(1, 2)) == Fraction(1) + 1 + Fraction(3, 4)
    assert RatPoly([]).degree() == -1
    assert RatPoly([0, 0]).is_zero()
    assert p.derivative() == RatPoly([2, 6])
    q, r = (p * RatPoly([1, 1]) + RatPoly([5])).divmod(RatPoly([1, 1]))
    assert q == p and r == RatPoly([5])


def test_ratpoly_w_chart_of_form():
    # z^2 + 1 as a form of degree 4: X^2 Y^2 + Y^4 -> at [-1:w]: w^2 + w^4
    p = RatPoly([1, 0, 1], form_degree=4)
    w = p.w_chart()
    assert w == RatPoly([0, 0, 1, 0, 1])


@given(polys, fractions)
def test_taylor_shift_is_composition(p, c):
    shifted = p.taylor_shift(c)
    for x in (Fraction(0), Fraction(1, 3), Fraction(-2)):
        assert shifted(x) == p(x + c)


@given(polys, polys)
def test_ratpoly_ring_laws(p, q):
    x = Fraction(3, 7)
    assert (p * q)(x) == p(x) * q(x)
    assert (p + q)(x) == p(x) + q(x)
    assert (p * q).derivative() == p.derivative() * q + p * q.derivative()


def test_hypergeometric_series_matches_mpmath():
    f = hypergeometric_2f1(Fraction(1, 12), Fraction(5, 12), Fraction(1), 60)
    with mp.workdps(40):
        x = mp.mpf("0.1")
        assert abs(f.evaluate(x) - mp.hyp2f1(mp.mpf(1) / 12, mp.mpf(5) / 12, 1, x)) < mp.mpf(10) ** -35


def test_fractional_power_series():
    # (1 + z)^(1/2) squared is 1 + z
    f = PowerSeries([1, 1, 0, 0, 0, 0, 0, 0])
    root = fractional_power_series(f, Fraction(1, 2))
    sq = (root * root).truncate(8)
    assert sq.coeffs[:8] == (1, 1, 0, 0, 0, 0, 0, 0)


def test_power_series_integrate_and_differentiate():
    f = PowerSeries([1, 2, 3, 4])
    assert f.integrate_termwise().differentiate().coeffs[:4] == f.coeffs


def test_snap_rational():
    with mp.workdps(30):
        assert snap_rational(mp.mpf(1) / 3) == Fraction(1, 3)
        assert snap_rational(mp.mpf("0.5") + mp.mpf(10) ** -25) == Fraction(1, 2)
        assert snap_rational(mp.pi) is None


def test_modular_primes_and_reconstruction():
    primes = modular_primes(3)
    assert len(set(primes)) == 3
    x = Fraction(-355, 113)
    r, m = frac_mod(x, primes[0]), primes[0]
    r, m = crt_pair(r, m, frac_mod(x, primes[1]), primes[1])
    assert rational_reconstruction(r, m) == x


@settings(max_examples=25)
@given(st.fractions(min_value=-1, max_value=1, max_denominator=6))
def test_mod_series_agrees_with_exact(alpha):
    p = modular_primes(1)[0]
    f = PowerSeries([1, 3, -2, 5, 7, 1, 0, 2])
    exact = fractional_power_series(f, alpha)
    fm = np.array([frac_mod(Fraction(c), p) for c in f.coeffs], dtype=np.int64)
    got = mod_power_series(fm, alpha, p)
    assert [int(v) for v in got[:8]] == [frac_mod(c, p) for c in exact.coeffs[:8]]


def test_mod_hypergeometric_and_mul():
    p = modular_primes(1)[0]
    exact = hypergeometric_2f1(Fraction(1, 12), Fraction(5, 12), Fraction(1), 10)
    got = mod_hypergeometric(Fraction(1, 12), Fraction(5, 12), Fraction(1), 10, p)
    assert [int(v) for v in got] == [frac_mod(c, p) for c in exact.coeffs[:10]]
    sq = mod_mul(got, got, p, 10)
    ex2 = (exact * exact).truncate(10)
    assert [int(v) for v in sq] == [frac_mod(c, p) for c in ex2.coeffs[:10]]
