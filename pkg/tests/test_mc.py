from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hsalg.cdga import exterior_algebra, parse_element
from hsalg.mc import (MaurerCartanFailure, SplittingData, SymplecticData, build_sk_complex, check_maurer_cartan,
                      check_symplectic_data, d_squared_defects, deform_family, extension_class, extension_form,
                      extension_form_alt, extension_form_weighted, filtration_E1, restricted_complex, sk_algebra,
                      symplectic_variation, twisted_d, verify_homogeneity)
from hsalg.models import REGISTRY, cat_torus, genus_g, heisenberg, heisenberg_model, load_builtin
from hsalg.universal import universal_symplectic

from conftest import nonzero_rationals, rationals

HEIS = heisenberg_model()
A, B, C = (HEIS.basis_element(x) for x in "abc")


def heis_data(p, q, u, v, r, s, defect=0):
    """Order-5 data on the Heisenberg model; MC holds iff defect == 0."""
    e1 = A * p + B * q
    e2 = A * u + B * v
    e3 = A * r + B * s + C * (-(p * v - q * u) + defect)
    return SplittingData(HEIS, HEIS.zero(), 4, (e1, e2, e3))


heis_params = st.tuples(*[rationals(3, 2)] * 6)


def test_heisenberg_mc_and_extension():
    h = heisenberg()
    rep = check_maurer_cartan(h.splitting)
    assert rep.passed
    res = extension_class(h.splitting)
    assert res.form == parse_element(h.model, "-2*a^c") and res.nonzero
    assert h.splitting.etas[2] == -h.model.basis_element("c")


def test_genus_mc_passes():
    assert check_maurer_cartan(genus_g(2, [(1, 2, 3, 4), (0, 1, 1, 0)]).splitting).passed


def test_mc_failure_residual():
    s = SplittingData(HEIS, HEIS.zero(), 2, (C,))
    rep = check_maurer_cartan(s)
    assert not rep.passed
    assert rep.failures()[1] == parse_element(HEIS, "a^b")
    with pytest.raises(MaurerCartanFailure):
        extension_class(s)


def test_extension_vanishes_with_zero_eta2():
    g = genus_g(1, [(1, 1, 0, 0)])
    assert extension_form(g.splitting).is_zero()


@pytest.mark.parametrize("g", [1, 2, 3])
def test_genus_extension_formula(g):
    params = [(Fraction(i + 1), Fraction(-i, 3), Fraction(2, i + 2), Fraction(i - 1)) for i in range(g)]
    b = genus_g(g, params)
    omega = b.model.basis_element("omega")
    expected = sum((x * z - y * w for x, y, w, z in params), Fraction(0))
    assert extension_form(b.splitting) == omega * expected


def test_split_case_copies():
    T = exterior_algebra([("u", 0), ("v", 0)], {})
    s = SplittingData(T, T.zero(), 3, (T.zero(), T.zero()))
    assert build_sk_complex(s).cohomology().dims == (0, 4, 8, 4)
    assert restricted_complex(s).dims == (1, 3, 3, 1)


def test_point_base():
    pt = exterior_algebra([], {})
    s = SplittingData(pt, pt.zero(), 1, ())
    rep = restricted_complex(s)
    assert rep.dims == (1, 1) and rep.extension.is_zero()
    e1 = filtration_E1(build_sk_complex(s))
    assert e1.matches


def test_torus_e1_columns():
    T = exterior_algebra([("u", 0), ("v", 0)], {})
    e1 = filtration_E1(build_sk_complex(SplittingData(T, T.zero(), 1, ())))
    assert e1.column(0) == {0: 0, 1: 1, 2: 2, 3: 1}
    assert e1.column(-1) == {1: 0, 2: 1, 3: 2, 4: 1}


def test_heisenberg_e1_against_twisted():
    e1 = filtration_E1(build_sk_complex(heisenberg().splitting))
    assert e1.matches
    # trivial connection: every column is the Heisenberg cohomology shifted
    for p in range(0, -5, -1):
        col = e1.column(p)
        assert [col[q] for q in sorted(col)][1:] == [1, 2, 2, 1]


def test_heisenberg_d_squared_zero_and_gysin():
    s = heisenberg().splitting
    assert d_squared_defects(sk_algebra(s)) == {}
    rep = restricted_complex(s)
    assert rep.holds and rep.extension == parse_element(s.base, "-2*a^c")


def test_corrupted_sk_witness():
    s = heis_data(1, 0, 0, 1, 0, 0, defect=1)
    with pytest.raises(MaurerCartanFailure) as info:
        build_sk_complex(s, require_mc=False)
    assert info.value.residuals


def test_cat_symplectic_closure():
    b = cat_torus(Fraction(3, 2))
    s, sd = b.splitting, b.symplectic
    rep = check_symplectic_data(sd)
    assert rep.passed and rep.closed_in_sk and rep.status == "pass"
    # d^{nabla^2} alpha_2 = 2 eta_1 ^ alpha_3
    assert twisted_d(s, sd.alphas[2], 2) == (s.eta(1) ^ sd.alphas[3]) * 2
    var = symplectic_variation(sd)
    assert var.nonzero
    assert str(var.variation) == "-a1^a2"


def test_all_alpha_zero_degenerate():
    b = cat_torus()
    m = b.model
    sd = SymplecticData(b.splitting, b.symplectic.beta, (m.zero(),) * 4)
    rep = check_symplectic_data(sd)
    assert rep.closure_ok and not rep.nondegenerate and rep.status == "degenerate"


def test_zero_extension_zero_variation():
    T = exterior_algebra([("p", 0), ("q", 0), ("r", 0)], {}, coframe=True)
    p, q, r = (T.basis_element(x) for x in "pqr")
    s = SplittingData(T, T.zero(), 1, ())
    sd = SymplecticData(s, q ^ r, (T.zero(), p))
    assert check_symplectic_data(sd).passed
    var = symplectic_variation(sd)
    assert var.variation.is_zero()


def test_universal_variation_is_minus_extension():
    u = universal_symplectic(1)
    var = u.variation()
    assert var.nonzero
    assert str(var.variation) == str(-extension_form(u.data.splitting))


def test_deform_trivial_scales():
    s = heisenberg().splitting
    z = deform_family(s, 0)
    assert all(e.is_zero() for e in z.splitting.etas) and z.extension.is_zero()
    one = deform_family(s, 1)
    assert one.splitting.etas == s.etas
    for c in (2, 3):
        assert deform_family(s, c).extension == extension_form(s) * c ** 4


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_builtin_natural_checks(name):
    b = load_builtin(name)
    assert check_maurer_cartan(b.splitting).passed
    assert restricted_complex(b.splitting).holds
    assert verify_homogeneity(b.splitting).holds
    if b.symplectic is not None:
        assert check_symplectic_data(b.symplectic).passed


# properties

@given(heis_params, st.sampled_from([0, 0, 1, -2, Fraction(1, 2)]))
def test_mc_iff_d_squared(params, defect):
    s = heis_data(*params, defect=defect)
    mc = check_maurer_cartan(s).passed
    assert mc == (defect == 0)
    assert mc == (not d_squared_defects(sk_algebra(s)))


@given(heis_params)
def test_extension_forms_agree(params):
    s = heis_data(*params)
    e = extension_form(s)
    assert e == extension_form_alt(s) == extension_form_weighted(s)


@given(heis_params, nonzero_rationals(4, 3))
def test_homogeneity(params, c):
    s = heis_data(*params)
    assert deform_family(s, c).extension == extension_form(s) * c ** s.k
    assert check_maurer_cartan(deform_family(s, c).splitting).passed


@given(st.integers(1, 2).flatmap(
    lambda g: st.lists(st.tuples(*[rationals(3, 2)] * 4), min_size=g, max_size=g)))
def test_gysin_genus(params):
    b = genus_g(len(params), params)
    rep = restricted_complex(b.splitting)
    assert rep.holds
    assert verify_homogeneity(b.splitting).holds


@given(heis_params)
def test_gysin_heisenberg(params):
    assert restricted_complex(heis_data(*params)).holds


@given(nonzero_rationals(4, 3), nonzero_rationals(3, 2))
def test_gysin_cat(lam, c):
    s = deform_family(cat_torus(lam).splitting, c).splitting
    assert restricted_complex(s).holds
