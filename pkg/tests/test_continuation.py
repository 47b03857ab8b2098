"""Path planning, integer matrix recovery and one full low-precision run."""

from __future__ import annotations

import json
import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schoenperiods import catalog, continuation as C, zlattice as Z
from schoenperiods.errors import NotAdjacent
from schoenperiods.numerics import PrecisionContext

LOW = PrecisionContext(40, 80)
WORKED = catalog.get_example("type2-swap-bc")


# -- planning ------------------------------------------------------------------


def _check_plan(plan, sing):
    assert plan.centers[0] == complex(plan.a) and plan.centers[-1] == complex(plan.b)
    assert len(plan.matching) == len(plan.centers) - 1
    for c in plan.centers:
        assert c.imag >= 0
    R = [r / C.DISK_RADIUS_FACTOR for r in plan.radii]
    for i, (c, d) in enumerate(zip(plan.centers, plan.centers[1:])):
        assert abs(c - d) <= plan.theta * (R[i] + R[i + 1]) * (1 + 1e-9)
        m = plan.matching[i]
        # the matching point sits at the same relative radius in both disks
        assert math.isclose(abs(m - c) / R[i], abs(m - d) / R[i + 1], rel_tol=1e-9)
    for c, r in zip(plan.centers, plan.radii):
        for s in sing:
            if abs(s - c) > 1e-12:
                assert abs(s - c) >= r


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.complex_numbers(max_magnitude=6, allow_nan=False, allow_infinity=False), max_size=5),
    st.floats(min_value=0.1, max_value=0.4),
)
def test_plan_path_invariants(extra, theta):
    a, b = -1.0, 2.0
    sing = [complex(a), complex(b)] + [s for s in extra if abs(s.imag) > 0.05 or not (a - 0.05 < s.real < b + 0.05)]
    plan = C.plan_path(a, b, sing, theta=theta)
    _check_plan(plan, sing)


def test_plan_path_detours_over_apparent_singularity():
    plan = C.plan_path(-1, 1, [complex(-1), complex(1), complex(0.25)], theta=0.3)
    assert len(plan.detours) == 1 and plan.detours[0][0] == pytest.approx(0.25)
    assert any(c.imag > 0 for c in plan.centers)
    _check_plan(plan, [complex(-1), complex(1), complex(0.25)])


def test_plan_path_rejects_bad_intervals():
    with pytest.raises(NotAdjacent):
        C.plan_path(1, -1, [1, -1])
    with pytest.raises(NotAdjacent):
        C.plan_path(-1, 1, [1, -1], sigma=[-1, 0, 1])


def test_convergence_factor_is_clamped():
    assert C.THETA_MIN <= C.convergence_factor(PrecisionContext.preset("desk")) <= C.THETA_MAX
    assert C.convergence_factor(PrecisionContext(30, 2000)) == C.THETA_MAX


# -- integer matrices -------------------------------------------------------------


def _sl2(steps):
    # products of elementary matrices [[1, k], [0, 1]] and [[1, 0], [k, 1]]
    M = [[1, 0], [0, 1]]
    for upper, k in steps:
        E = [[1, k], [0, 1]] if upper else [[1, 0], [k, 1]]
        M = Z.matmul(M, E)
    return (M[0][0], M[0][1], M[1][0], M[1][1])


sl2 = st.lists(st.tuples(st.booleans(), st.integers(-3, 3)), max_size=4).map(_sl2)


@given(sl2)
def test_symmetric_square_round_trip(t):
    B = [[t[0], t[1]], [t[2], t[3]]]
    R = C.recover_from_sym2(C.sym2_matrix(B))
    assert R in (B, [[-x for x in r] for r in B])
    assert C.kron(R, R) == C.kron(B, B)


@given(sl2, sl2)
def test_kron_is_multiplicative(s, t):
    A = [[s[0], s[1]], [s[2], s[3]]]
    B = [[t[0], t[1]], [t[2], t[3]]]
    AB = Z.matmul(A, B)
    assert C.kron(AB, AB) == Z.matmul(C.kron(A, A), C.kron(B, B))


# -- one full run at low precision ---------------------------------------------------


@pytest.fixture(scope="module")
def worked_run(tmp_path_factory):
    cache = C.PartialsCache(tmp_path_factory.mktemp("cache"))
    prs = C.compute_partial_results(WORKED.surface1, WORKED.surface2, 0, LOW, cache=cache, example_id=WORKED.id)
    return prs, cache


def test_structural_identities(worked_run):
    prs, _ = worked_run
    assert prs.residuals["M_cycle"] == 0 and prs.residuals["Theta_cycle"] == 0
    assert prs.residuals["sum_r"] < mp.mpf(10) ** (-LOW.digits + 20)
    assert prs.residuals["lower_half_plane"] < mp.mpf(10) ** (-LOW.digits + 20)


def test_matrices_match_reference_tables(worked_run):
    prs, _ = worked_run
    tables = catalog.reference_tables()[WORKED.id]
    assert prs.M == tables["M"]
    assert prs.Theta == tables["Theta"]


def test_partials_agree_with_reference_tables(worked_run):
    prs, _ = worked_run
    tables = catalog.reference_tables()[WORKED.id]
    with mp.workdps(LOW.working_digits):
        for computed, stored in zip(prs.q, tables["q"]):
            for x, y in zip(computed, stored):
                ref = catalog.parse_complex(y)
                assert abs(x - ref) <= mp.mpf(10) ** -30 * abs(ref)


def test_monodromies_are_local_models(worked_run):
    prs, _ = worked_run
    for theta, p in zip(prs.Theta, prs.points):
        n, m = WORKED.fiber_orders(p)
        Z.check_local_model(Z.transpose(theta), n, m)


def test_period_module_independent_of_base_point(worked_run):
    prs, _ = worked_run
    with mp.workdps(LOW.working_digits):
        for target in ("xhat", "x"):
            vcs = [
                Z.vanishing_cycles(Z.transpose(prs.Theta[i]), *WORKED.fiber_orders(p), target)
                for i, p in enumerate(prs.points)
            ]
            lats = [Z.lattice_from_values(Z.assemble_period_module(prs, vcs, base), 28) for base in range(len(prs.points))]
            for lat in lats[1:]:
                assert Z.same_module(lats[0].basis, lat.basis, 25)


def test_cache_hits_reproduce_results(worked_run):
    prs, cache = worked_run
    assert len(cache.entries()) == len(prs.points)
    again = C.compute_partial_results(WORKED.surface1, WORKED.surface2, 0, LOW, cache=cache, example_id=WORKED.id)
    assert json.dumps(again.to_record(), sort_keys=True) == json.dumps(prs.to_record(), sort_keys=True)


def test_chart_agreement():
    label, qz, qw, diff = C.chart_agreement(WORKED.surface1, WORKED.surface2, 0, LOW)
    assert label == "-9/2->-1/2"
    assert diff < mp.mpf(10) ** -(LOW.digits // 2)
