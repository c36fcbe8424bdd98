"""Exact polynomial ring with Laurent coefficients in epsilon."""
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from charfol.dsl import parse
from charfol.poly import CoordSystem, DimensionError, EpsCoeff, NotDivisible, Poly, eval_point, poly_arith

C2 = CoordSystem.standard(2)


def test_standard_coordinates():
    assert C2.names == ("z", "r", "th", "x1", "y1")
    assert CoordSystem.standard(3).names[-2:] == ("x2", "y2")
    assert C2.n == 2 and C2.dim == 5


def test_zero_is_canonical():
    z = Poly.var(C2, "z")
    assert (z - z).is_zero()
    assert (z - z) == Poly.zero(C2)
    assert len(Poly.zero(C2).raw_terms) == 0


def test_laurent_epsilon_coefficients():
    p = parse("e^-2*z^2 + e*z^2 - 3", C2)
    (coeff,) = [c for m, c in p.terms.items() if m[0] == 2]
    assert coeff == EpsCoeff({-2: 1, 1: 1})
    assert p.eps_range() == (-2, 1)


def test_eval_point_examples():
    p = parse("e^-2*z^2 + r^2 - 1 - e", C2)
    assert eval_point(p, [Fraction(1, 10), 1, 0, 0, 0], Fraction(1, 10)) == Fraction(9, 10)
    with pytest.raises(ZeroDivisionError):
        eval_point(p, [0, 0, 0, 0, 0], 0)
    with pytest.raises(DimensionError):
        eval_point(p, [0, 0], Fraction(1, 2))


def test_poly_arith_and_dimension_mismatch():
    a, b = parse("z+r", C2), parse("z-r", C2)
    assert poly_arith(a, b, "mul") == parse("z^2-r^2", C2)
    assert poly_arith(a, b, "sub") == parse("2*r", C2)
    with pytest.raises(DimensionError):
        poly_arith(a, Poly.var(CoordSystem.standard(3), "z"), "add")


def test_divide_exact():
    f = parse("(e^-2*z^2 + r - e)*(z - e*r)", C2)
    assert f.divide_exact(parse("z - e*r", C2)) == parse("e^-2*z^2 + r - e", C2)
    with pytest.raises(NotDivisible):
        parse("z^2 + 1", C2).divide_exact(parse("z - 1", C2))


def test_str_round_trips_through_the_parser():
    p = parse("(2*r^2-1)*e^-2*z - 3/2*x1*y1^3 + e", C2)
    assert parse(str(p), C2) == p


def test_diff_and_subs():
    p = parse("z^3*r + e^-1*z", C2)
    assert p.diff("z") == parse("3*z^2*r + e^-1", C2)
    assert p.subs({"z": parse("r-1", C2)}) == parse("(r-1)^3*r + e^-1*(r-1)", C2)
    assert p.subs_eps(Fraction(1, 2)) == parse("z^3*r + 2*z", C2)


monomial = st.tuples(st.integers(-2, 2), *[st.integers(0, 2)] * 5)
polys = st.dictionaries(monomial, st.fractions(min_value=-5, max_value=5, max_denominator=5),
                        max_size=4).map(lambda t: Poly(C2, t))


@settings(max_examples=150, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == Poly.zero(C2)


@settings(max_examples=150, deadline=None)
@given(polys, polys, st.fractions(min_value=-3, max_value=3, max_denominator=4),
       st.fractions(min_value=Fraction(1, 5), max_value=2, max_denominator=5))
def test_evaluation_is_a_ring_homomorphism(a, b, x, eps):
    pt = [x, 1 - x, 2, x * x, -1]
    assert (a * b).evaluate(pt, eps) == a.evaluate(pt, eps) * b.evaluate(pt, eps)
    assert (a + b).evaluate(pt, eps) == a.evaluate(pt, eps) + b.evaluate(pt, eps)


@settings(max_examples=100, deadline=None)
@given(polys, polys)
def test_leibniz_for_partial_derivatives(a, b):
    for name in ("z", "r"):
        assert (a * b).diff(name) == a.diff(name) * b + a * b.diff(name)
