"""Catalog of examples, reference data and Moebius pullbacks."""

from __future__ import annotations

import json
from fractions import Fraction

import mpmath as mp
import pytest

from schoenperiods import catalog
from schoenperiods.errors import InvalidMobius, InvalidSurface, UnknownExample
from schoenperiods.numerics import RatPoly
from schoenperiods.surface import SigmaPoint


def test_catalog_size_and_types():
    examples = catalog.list_examples()
    assert len(examples) == 12
    assert [e.type_tag for e in examples] == ["I"] * 4 + ["II"] * 5 + ["III"] * 3
    assert len(set(catalog.example_ids())) == 12


def test_type_iii_weights():
    x8 = catalog.get_example("typeIII-X1-8")
    assert x8.k == 2 and x8.weights == (0, 1, 2)
    x10 = catalog.get_example("typeIII-X1-10")
    assert x10.k == 3 and len(x10.weights) == 5
    vecs = x10.vectors("xhat")
    assert len(vecs) == 5 and all(len(v) == 10 for v in vecs)


def test_self_products():
    for ex in catalog.list_examples():
        assert ex.self_product == (ex.type_tag != "II")


def test_unknown_example():
    with pytest.raises(UnknownExample):
        catalog.get_example("typeIV-nowhere")


def test_worked_pullback_coefficients():
    e1 = catalog.get_example("type2-swap-bc").surface1
    pulled = catalog.mobius_pullback(e1, (-1, Fraction(-1, 2), 0, 1))
    assert pulled.g2 == RatPoly([Fraction(27, 4), 18, 90, 72, 12])


def test_identity_pullback():
    e1 = catalog.get_example("type2-swap-bc").surface1
    same = catalog.mobius_pullback(e1, (1, 0, 0, 1))
    assert (same.g2, same.g3, same.k) == (e1.g2, e1.g3, e1.k)


def test_pullback_fibers():
    e1 = catalog.get_example("type2-swap-bc").surface1
    pulled = catalog.mobius_pullback(e1, (-1, 0, 2, 1))  # z -> -z/(2z+1)
    got = {(f.kodaira_n, str(f.location)) for f in pulled.fibers}
    assert got == {(1, "-4/9"), (2, "inf"), (3, "0"), (6, "-1/2")}


def test_degenerate_mobius():
    e1 = catalog.get_example("type2-swap-bc").surface1
    with pytest.raises(InvalidMobius):
        catalog.mobius_pullback(e1, (1, 2, 2, 4))


@pytest.mark.parametrize("example_id", [i for i in catalog.example_ids() if i.startswith("type2")])
def test_stored_surfaces_are_pullbacks(example_id):
    ex = catalog.get_example(example_id)
    pulled = catalog.mobius_pullback(ex.surface1, ex.mobius)
    lam = catalog.scaling_factor(pulled, ex.surface2)
    assert lam is not None and lam > 0  # equal up to an admissible rescaling


def test_sigma_includes_algebraic_points():
    x10 = catalog.get_example("typeIII-X1-10")
    labels = {p.label for p in x10.sigma}
    assert {"1/2 - sqrt(5)/2", "1/2 + sqrt(5)/2", "3 - sqrt(5)", "sqrt(5) + 3"} <= labels


def test_fiber_orders_per_point():
    ex = catalog.get_example("type2-swap-bc")
    assert ex.fiber_orders(SigmaPoint.rational(0)) == ex.fiber_orders(SigmaPoint.rational(Fraction(0)))
    assert all(a + b > 0 for (a, b), _ in ex.fibers)


def test_reference_tables_shape():
    tables = catalog.reference_tables()["type2-swap-bc"]
    assert len(tables["q"]) == len(tables["r"]) == len(tables["M"]) == len(tables["Theta"]) == 5
    assert all(len(v) == 4 for v in tables["q"])
    assert all(catalog.stored_digits(x) >= 30 for row in tables["q"] for x in row)
    with mp.workdps(50):
        total = sum(sum(catalog.parse_complex(x) for x in row) for row in tables["r"])
        assert abs(total) < mp.mpf(10) ** -25  # the residues over all points sum to zero


def test_stored_modular_combination_of_first_example():
    ex = catalog.get_example("typeI-1128")
    mf = ex.modular_form
    with mp.workdps(40):
        values = mf.values()
        basis = [catalog.parse_complex(v) for v in ex.lattice_reference("xhat")]
        best = min(abs(v - b) for v in values for b in basis + [-b for b in basis])
        assert best < mp.mpf(10) ** -25
        zero = catalog.Combination((Fraction(0), Fraction(0)), (Fraction(0), Fraction(0)), "")
        assert zero.evaluate(catalog.parse_complex(mf.pi2_omega1), catalog.parse_complex(mf.pi2_omega2)) == 0


def test_corrected_combinations_are_recorded():
    be = catalog.get_example("type2-swap-be").modular_form
    assert be.corrected and be.corrected[0] != be.combinations[0]
    bce = catalog.get_example("type2-cycle-bce").modular_form
    bec = catalog.get_example("type2-cycle-bec").modular_form
    assert bce.corrected[0].alpha == tuple(4 * x for x in bec.combinations[0].alpha)


def test_load_surface_file(tmp_path):
    rec = {"g2": ["12", "0", "-3"], "g3": ["8", "1", "0", "2"], "k": 1}
    path = tmp_path / "e.json"
    path.write_text(json.dumps(rec))
    ident, s1, s2 = catalog.load_surface_file(path)
    assert ident == "e" and s1 == s2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InvalidSurface):
        catalog.load_surface_file(bad)
