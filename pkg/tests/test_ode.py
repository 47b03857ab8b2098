"""Minimal-operator search, indicial data and local solution bases."""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schoenperiods import catalog, continuation
from schoenperiods.errors import NoODEFound, SingularExpansionPoint
from schoenperiods.numerics import RatPoly, hypergeometric_2f1
from schoenperiods.ode import (
    LinearODE,
    antiderivative_ode,
    find_min_ode,
    frobenius_basis,
    holomorphic_basis,
    holomorphic_solutions,
    indicial_polynomial,
    indicial_roots,
    relative_residual,
)

A, B, C = Fraction(1, 12), Fraction(5, 12), Fraction(1)
#: z(1-z) f'' + (c - (a+b+1) z) f' - ab f = 0
HYPERGEOMETRIC = LinearODE((RatPoly([0, 1, -1]), RatPoly([C, -(A + B + 1)]), RatPoly([-A * B])))


@pytest.fixture(scope="module")
def worked_operator():
    ex = catalog.get_example("type2-swap-bc")
    return continuation.operator_for_chart(ex.surface1, ex.surface2, 0, False)


def test_find_min_ode_recovers_hypergeometric_equation():
    seed = hypergeometric_2f1(A, B, C, 120)
    found = find_min_ode(seed)
    assert found.normalized() == HYPERGEOMETRIC.normalized()


def test_find_min_ode_reports_failure():
    seed = hypergeometric_2f1(A, B, C, 120)
    with pytest.raises(NoODEFound):
        find_min_ode(seed, max_order=1, max_deg=15)


def test_worked_operator_shape(worked_operator):
    L = worked_operator
    assert L.order == 4
    z = RatPoly([0, 1])
    lead = z * z * RatPoly([1, 4]) * RatPoly([360, 7, 14]) * RatPoly([1, 2]) ** 2 * RatPoly([9, 2]) ** 2 * RatPoly([-4, 1]) ** 2
    assert L.normalized().leading == lead


def test_indicial_roots():
    assert indicial_roots(HYPERGEOMETRIC, Fraction(0)) == [0, 0]
    assert sorted(indicial_roots(HYPERGEOMETRIC, Fraction(1))) == [0, Fraction(1, 2)]  # 0 and c - a - b
    assert indicial_polynomial(HYPERGEOMETRIC, Fraction(0)) == RatPoly([0, 0, 1])


def test_apparent_singularity_exponents(worked_operator):
    # z = -1/4 is a zero of the leading coefficient but not a singular fiber
    assert sorted(indicial_roots(worked_operator, Fraction(-1, 4))) == [0, 1, 2, 4]


def test_antiderivative_ode_annihilates_primitives():
    up = antiderivative_ode(HYPERGEOMETRIC)
    assert up.order == 3
    f = hypergeometric_2f1(A, B, C, 40)
    assert all(c == 0 for c in up.apply(f.integrate_termwise()).coeffs[:30])
    assert all(c == 0 for c in up.apply(hypergeometric_2f1(0, 0, 1, 40)).coeffs[:30])  # constants


def test_holomorphic_basis_initial_conditions():
    basis = holomorphic_basis(HYPERGEOMETRIC, Fraction(1, 3), 30)
    for j, f in enumerate(basis):
        for k in range(2):
            assert f.coeffs[k] * math.factorial(k) == (1 if j == k else 0)


def test_holomorphic_basis_rejects_singular_point():
    with pytest.raises(SingularExpansionPoint):
        holomorphic_basis(HYPERGEOMETRIC, Fraction(0), 10)


@pytest.mark.parametrize("z0", [Fraction(-9, 2), Fraction(-1, 2), Fraction(0), Fraction(4), Fraction(-1, 4)])
def test_frobenius_basis_residuals(worked_operator, z0):
    digits = 60
    with mp.workdps(digits):
        basis = frobenius_basis(worked_operator, z0, 150)
        assert len(basis) == 4
        for sol in basis:
            for h in ("0.01", "0.02"):
                assert relative_residual(worked_operator, sol, z0 + mp.mpf(h)) < mp.mpf(10) ** (-digits + 15)


@settings(max_examples=15, deadline=None)
@given(st.floats(min_value=0.01, max_value=0.4), st.floats(min_value=0.0, max_value=3.1))
def test_hypergeometric_frobenius_matches_mpmath(r, phi):
    with mp.workdps(40):
        sols = frobenius_basis(HYPERGEOMETRIC, Fraction(0), 120)
        z = r * mp.expjpi(phi / mp.pi)
        holo = [s for s in sols if s.log_degree == 0]
        assert len(holo) == 1 and holo[0].rho == 0
        ref = mp.hyp2f1(mp.mpf(1) / 12, mp.mpf(5) / 12, 1, z)
        assert abs(holo[0].evaluate(z) / holo[0].h[0][0] - ref) < mp.mpf(10) ** -30
        for s in sols:
            assert relative_residual(HYPERGEOMETRIC, s, z) < mp.mpf(10) ** -25


def test_holomorphic_solutions_residual():
    with mp.workdps(50):
        for s in holomorphic_solutions(HYPERGEOMETRIC, Fraction(1, 3), 150):
            assert relative_residual(HYPERGEOMETRIC, s, mp.mpf(1) / 3 + mp.mpf("0.05")) < mp.mpf(10) ** -40


def test_record_round_trip():
    assert LinearODE.from_record(HYPERGEOMETRIC.to_record()) == HYPERGEOMETRIC
