from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from hsalg.laurent import LaurentPoly, divide_exact, parse_laurent
from hsalg.linalg import Matrix, determinant
from hsalg.poisson import (FrameData, LaurentBivector, SingularForm, bareiss_adjugate, check_translation_invariance,
                           cofactor_adjugate, intro_bracket, invert_form, is_poisson, pfaffian, rank_drop_order,
                           schouten_jacobi, universal_frame, universal_form_algebraic, universal_form_coordinates,
                           universal_frame_data)

from conftest import rationals

V = ("u", "t")
P = lambda s, v=V: parse_laurent(s, v)


def const_matrix(rows, v):
    return [[LaurentPoly.constant(v, c) for c in row] for row in rows]


def test_laurent_examples():
    assert P("t^-4").partial("t") == P("-4*t^-5")
    assert P("3*u^3").partial("u") == P("9*u^2")
    assert P("u") * P("u^-1") == P("1")
    assert P("2u^2 - 1/3t") == P("2*u^2 - 1/3*t")
    with pytest.raises(ValueError):
        P("u^")


def test_jacobi_examples():
    v = ("a", "b", "c", "d")
    const = LaurentBivector.from_matrix(v, const_matrix([[0, 1, 2, 0], [-1, 0, 0, 3], [-2, 0, 0, 1], [0, -3, -1, 0]], v))
    assert schouten_jacobi(const) == {}
    assert is_poisson(intro_bracket())
    w = ("x1", "x2", "x3")
    q = LaurentBivector.from_entries(w, {("x1", "x2"): P("x1", w), ("x1", "x3"): P("x2", w)})
    assert schouten_jacobi(q)


def test_intro_bracket_properties():
    q = intro_bracket()
    assert q.bracket("x", "y") == P("3*u^3", q.vars)
    assert not q.bracket("u", "t")
    assert check_translation_invariance(q, ["x", "y"])
    assert not check_translation_invariance(q, ["u"])
    assert check_translation_invariance(q, [])
    rd = rank_drop_order(q, "t")
    assert rd.order == 4 and str(rd.pfaffian) == "3*u^4*t^4"


def test_translation_invariance_negative():
    w = ("x1", "x2")
    q = LaurentBivector.from_entries(w, {("x1", "x2"): P("x1", w)})
    assert not check_translation_invariance(q, ["x1"])


def test_standard_inversion_and_order():
    v = ("p", "q")
    om = const_matrix([[0, 1], [-1, 0]], v)
    ident = const_matrix([[1, 0], [0, 1]], v)
    q = invert_form(FrameData(v, ident, om))
    assert q.bracket("p", "q") == LaurentPoly.constant(v, -1)
    assert rank_drop_order(q, "p").order == 0


def test_block_diagonal_form():
    v = ("a", "b", "c", "d")
    om = const_matrix([[0, 2, 0, 0], [-2, 0, 0, 0], [0, 0, 0, 5], [0, 0, -5, 0]], v)
    ident = const_matrix([[int(i == j) for j in range(4)] for i in range(4)], v)
    q = invert_form(FrameData(v, ident, om))
    assert all(not q[i, j] for i in range(2) for j in range(2, 4))
    assert q.bracket("a", "b") == LaurentPoly.constant(v, Fraction(-1, 2))


def test_scaled_bivector_order():
    q = intro_bracket()
    t2 = P("t^2", q.vars)
    scaled = LaurentBivector.from_matrix(q.vars, [[x * t2 for x in row] for row in q.matrix])
    assert rank_drop_order(scaled, "t").order == 4 + 4


def test_singular_form_rejected():
    v = ("p", "q")
    zero = const_matrix([[0, 0], [0, 0]], v)
    ident = const_matrix([[1, 0], [0, 1]], v)
    with pytest.raises(SingularForm):
        invert_form(FrameData(v, ident, zero))


@pytest.mark.parametrize("n", [1, 2])
def test_universal_frame_two_routes(n):
    k = 2 * n + 1
    names, rho = universal_frame(k)
    assert universal_form_algebraic(k, names) == universal_form_coordinates(k, names, rho)


@pytest.mark.parametrize("n,order", [(1, 4), (2, 6)])
def test_universal_inversion(n, order):
    fd = universal_frame_data(n)
    q = invert_form(fd, "bareiss")
    assert q == invert_form(fd, "cofactor")
    assert schouten_jacobi(q) == {}
    assert rank_drop_order(q, "t").order == order


def test_bareiss_matches_cofactor():
    fd = universal_frame_data(1)
    d1, r1 = bareiss_adjugate(fd.omega, fd.vars)
    d2, r2 = cofactor_adjugate(fd.omega, fd.vars)
    # both give omega^{-1} = R / D
    for i in range(len(r1)):
        for j in range(len(r1)):
            assert r1[i][j] * d2 == r2[i][j] * d1


def test_bivector_json():
    q = intro_bracket()
    doc = q.to_json()
    assert doc["vars"] == ["u", "x", "y", "t"]
    assert LaurentBivector.from_json(doc) == q
    with pytest.raises(ValueError, match="unknown variable"):
        LaurentBivector.from_json({"vars": ["u"], "entries": [["u", "v", "1"]]})


# properties

VARS = ("u", "t")
monomials = st.tuples(rationals(3, 2), st.integers(-3, 3), st.integers(-3, 3))
polys = st.lists(monomials, max_size=4).map(
    lambda ms: sum((LaurentPoly.monomial(VARS, {"u": a, "t": b}, c) for c, a, b in ms), LaurentPoly(VARS, {})))


@given(polys, polys, polys)
def test_laurent_ring_axioms(p, q, r):
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert (p * q).partial("t") == p.partial("t") * q + p * q.partial("t")
    if q:
        assert divide_exact(p * q, q) == p
    assert parse_laurent(str(p), VARS) == p


E3 = universal_frame_data(1)
E3_Q = invert_form(E3)
E3_PF = pfaffian(E3_Q.matrix, E3_Q.vars)


@given(st.lists(st.lists(st.integers(-2, 2), min_size=4, max_size=4), min_size=4, max_size=4))
def test_rank_drop_invariant_under_frame_change(rows):
    c = Matrix(rows)
    det = determinant(c)
    assume(det != 0)
    v = E3.vars
    cm = const_matrix(rows, v)
    rho = [[sum((E3.rho[i][l] * cm[l][j] for l in range(4)), LaurentPoly(v, {})) for j in range(4)]
           for i in range(4)]
    q = invert_form(FrameData(v, rho, E3.omega))
    for i in range(4):
        for j in range(4):
            assert q[i, j] == -q[j, i]
    pf = pfaffian(q.matrix, v)
    assert pf == E3_PF * det
    assert rank_drop_order(q, "t").order == 4
