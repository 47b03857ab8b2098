"""Integer linear algebra, vanishing cycles and period lattices."""

from __future__ import annotations

import random
from math import gcd

import mpmath as mp
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from sympy import Matrix
from sympy.matrices.normalforms import invariant_factors

import oracles
from schoenperiods import zlattice as Z
from schoenperiods.errors import NotASublattice, NotLocalModel, OutsideSchoenHypotheses, PrecisionExhausted

small_ints = st.integers(min_value=-9, max_value=9)
matrices = st.integers(min_value=2, max_value=4).flatmap(
    lambda r: st.lists(st.lists(small_ints, min_size=4, max_size=4), min_size=r, max_size=r)
)
PAIRS = [(n, m) for n in range(11) for m in range(11)]


def _random_unimodular(rng: random.Random, n: int) -> list:
    U = Z.identity(n)
    for _ in range(3 * n):
        i, j = rng.sample(range(n), 2)
        c = rng.randint(-2, 2)
        U = [[U[r][k] + (c * U[j][k] if r == i else 0) for k in range(n)] for r in range(n)]
    return U


# -- exact linear algebra ----------------------------------------------------


@given(matrices)
def test_determinant_and_rank_match_sympy(rows):
    M = Matrix(rows)
    assert Z.rank(rows) == M.rank()
    if len(rows) == 4:
        assert Z.determinant(rows) == M.det()


@given(matrices)
def test_elementary_divisors_match_sympy(rows):
    want = [int(x) for x in invariant_factors(Matrix(rows)) if x != 0]
    assert [abs(x) for x in Z.elementary_divisors(rows) if x] == want


@settings(max_examples=50)
@given(matrices, st.integers(min_value=0, max_value=10**6))
def test_hnf_is_canonical(rows, seed):
    U = _random_unimodular(random.Random(seed), len(rows))
    mixed = [[sum(U[i][k] * rows[k][j] for k in range(len(rows))) for j in range(4)] for i in range(len(rows))]
    assert Z.hnf_rows(rows, 4) == Z.hnf_rows(mixed, 4)
    assert oracles.same_span(list(Z.hnf_rows(rows, 4)), rows)


@given(matrices)
def test_kernel_and_saturation_match_oracle(rows):
    K = Z.hnf_kernel(rows)
    assert oracles.same_span(list(K.basis), oracles.kernel(rows, 4))
    H = Z.Subgroup.span(4, rows)
    assert oracles.same_span(list(Z.saturate(H).basis), oracles.saturation(rows, 4))


@settings(max_examples=30)
@given(st.integers(min_value=0, max_value=10**6))
def test_unimodular_inverse(seed):
    U = _random_unimodular(random.Random(seed), 4)
    assert Z.matmul(U, Z.inverse_unimodular(U)) == Z.identity(4)


def test_subgroup_order_and_index():
    H = Z.Subgroup.span(2, [[2, 0], [0, 3]])
    G = Z.Subgroup.full(2)
    assert H < G and H.index_in(G) == 6
    assert H.contains_vector([4, 9]) and not H.contains_vector([1, 0])
    with pytest.raises(NotASublattice):
        G.index_in(H)


def test_lll_shortens():
    red = Z.lll_reduce([[1, 0, 0, 10**6], [0, 1, 0, 2 * 10**6 + 1], [0, 0, 1, 3 * 10**6 + 1]])
    assert max(abs(x) for x in red[0]) <= 3
    assert len(red) == 3 and abs(Z.determinant([r[:3] for r in red])) == 1


# -- vanishing cycles -----------------------------------------------------------


@pytest.mark.parametrize("n,m", PAIRS)
def test_vanishing_cycles_match_oracle(n, m):
    theta = Z.local_model(n, m)
    assert theta == oracles.monodromy(n, m)
    vx = Z.vanishing_cycles(theta, n, m, "x")
    assert oracles.same_span(list(vx.basis), oracles.vc_x(n, m))
    if not oracles.supported(n, m):
        with pytest.raises(OutsideSchoenHypotheses):
            Z.vanishing_cycles(theta, n, m, "xhat")
        return
    vh = Z.vanishing_cycles(theta, n, m, "xhat")
    assert oracles.same_span(list(vh.basis), oracles.vc_xhat(n, m))
    # inclusion chain im(T-1) <= VC'(X^) <= sat(im(T-1)), strict iff gcd != 1
    im = oracles.image_minus_identity(n, m)
    sat = oracles.saturation(im, 4)
    assert all(oracles.contains(vh.basis, v) for v in im)
    assert all(oracles.contains(sat, v) for v in vh.basis)
    strict = not oracles.same_span(im, list(vh.basis)) and not oracles.same_span(list(vh.basis), sat)
    assert strict == oracles.strict_chain_expected(n, m)
    # and the resolution never has more vanishing cycles than the singular model
    assert all(oracles.contains(vx.basis, v) for v in vh.basis)


@settings(max_examples=40)
@given(st.integers(min_value=1, max_value=10), st.integers(min_value=1, max_value=10),
       st.integers(min_value=0, max_value=10**6))
def test_vanishing_cycles_are_conjugation_covariant(n, m, seed):
    P = _random_unimodular(random.Random(seed), 4)
    Pi = Z.inverse_unimodular(P)
    theta = Z.matmul(P, Z.matmul(Z.local_model(n, m), Pi))
    for target in ("x", "xhat"):
        got = Z.vanishing_cycles(theta, n, m, target)
        want = Z.vanishing_cycles(Z.local_model(n, m), n, m, target).transformed(P)
        assert got == want


def test_wrong_local_model_rejected():
    with pytest.raises(NotLocalModel):
        Z.vanishing_cycles(Z.local_model(2, 3), 1, 1, "x")


def test_kronecker_factors():
    B1, B2 = Z.kronecker_factors(Z.local_model(3, 5))
    assert Z.fiber_type_of(B1) == 3 and Z.fiber_type_of(B2) == 5


def test_self_product_index_bound():
    assert Z.self_product_index_bound([1, 1, 2, 8], 2) == 16**2
    assert Z.self_product_index_bound([1, 2, 3, 6], 3) == 12**3


# -- period lattices ---------------------------------------------------------------

BASIS = [mp.mpc("13.8030652044679021961193422703"), mp.mpc(0, "21.5650087259302781487215564481")]


def _combos(basis, rows):
    return [sum(c * b for c, b in zip(r, basis)) for r in rows]


@settings(max_examples=25, deadline=None)
@given(st.lists(st.lists(st.integers(-6, 6), min_size=2, max_size=2), min_size=2, max_size=5))
def test_lattice_from_values_recovers_generated_module(rows):
    assume(Matrix(rows).rank() == 2)
    with mp.workdps(40):
        vals = _combos(BASIS, rows)
        lat = Z.lattice_from_values(vals, 28)
        assert lat.rank == 2
        g = 0
        for i in range(len(rows)):
            for j in range(i + 1, len(rows)):
                g = gcd(g, abs(rows[i][0] * rows[j][1] - rows[i][1] * rows[j][0]))
        # index of the generated module in the reference lattice is the gcd of 2x2 minors
        ref = Z.PeriodLattice(2, BASIS, digits=28)
        assert Z.lattice_index(lat, ref, 28) == g


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=-5, max_value=5).filter(bool), st.floats(min_value=-3, max_value=3))
def test_lattice_is_scale_equivariant(k, phi):
    with mp.workdps(40):
        vals = _combos(BASIS, [[1, 0], [3, 2], [1, 1]])
        lam = k * mp.expj(phi)
        a = Z.lattice_from_values(vals, 28)
        b = Z.lattice_from_values([lam * v for v in vals], 28)
        assert a.rank == b.rank == 2
        assert Z.same_module([lam * v for v in a.basis], b.basis, 25)


def test_rank_three_module_is_not_discrete():
    with mp.workdps(50):
        vals = [mp.mpf(1), mp.sqrt(2), mp.sqrt(3) * 1j, 1 + mp.sqrt(2)]
        lat = Z.lattice_from_values(vals, 40)
        assert lat.rank == 3


def test_precision_exhaustion_detected():
    with mp.workdps(60):
        # a relation with a 10^7 coefficient among six values is resolved at 50
        # digits but not at the reduced cross-check precision
        vals = [mp.mpf(1), mp.pi, mp.e, mp.sqrt(2), mp.sqrt(3), (1 + 10**7 * mp.pi) / 10**7]
        with pytest.raises(PrecisionExhausted):
            Z.lattice_from_values(vals, 50)


def test_express_in_basis_and_errors():
    with mp.workdps(40):
        v = 3 * BASIS[0] - 7 * BASIS[1]
        assert Z.express_in_basis(v, BASIS, 28) == [3, -7]
        with pytest.raises(NotASublattice):
            Z.express_in_basis(BASIS[0] / 2, BASIS, 28)


def test_common_relations_and_quotient():
    with mp.workdps(50):
        a = [mp.mpf(1), mp.sqrt(2)]
        b = [mp.pi, mp.e]
        vecs = [a, b, [x + 2 * y for x, y in zip(a, b)], [0, 0]]
        rel = Z.common_relations(vecs, 40)
        assert rel.rank == 2
        new, rows = Z.quotient_generators(vecs, 40)
        assert len(new) == 2
        assert Z.common_relations(new, 40).rank == 0
