"""Reduction modulo a defining polynomial."""
import pytest
from hypothesis import given, settings, strategies as st

from charfol.dsl import parse
from charfol.normal_form import NormalFormRule, RuleError, reduce_form, reduce_mod
from charfol.forms import Form
from charfol.poly import CoordSystem, Poly

C = CoordSystem(("z", "r", "th", "x1", "y1"))
F = parse("r^2 + e^-2*(z^2 + x1^2 + y1^2) - 1 - e", C)
RULE = NormalFormRule.from_polynomial(F)


def test_rule_rewrites_z_squared():
    assert RULE.var == "z" and RULE.power == 2
    assert RULE.reduce(parse("z^2", C)) == parse("e^2*(1 + e - r^2) - x1^2 - y1^2", C)
    assert RULE.reduce(F).is_zero()
    assert RULE.reduce(parse("z^3", C)).degree_in("z") == 1


def test_rule_for_linear_generator():
    rule = NormalFormRule.from_polynomial(parse("z", CoordSystem(("z", "x1", "y1"))))
    assert rule.reduce(parse("z*x1 + y1", rule.generator.coords)) == parse("y1", rule.generator.coords)


def test_rule_needs_a_unit_leading_coefficient():
    with pytest.raises(RuleError):
        NormalFormRule.from_polynomial(parse("r*z^2 + 1", C), "z")


def test_reduce_form_acts_coefficientwise():
    w = Form.function(F * parse("x1", C))
    assert reduce_form(RULE, w).is_zero()


monomial = st.tuples(st.integers(-1, 1), *[st.integers(0, 4), st.integers(0, 2), st.just(0),
                                            st.integers(0, 2), st.integers(0, 1)])
polys = st.dictionaries(monomial, st.integers(-3, 3), max_size=4).map(lambda t: Poly(C, t))


@settings(max_examples=100, deadline=None)
@given(polys, polys)
def test_reduction_is_an_idempotent_ring_map_killing_F(a, b):
    ra, rb = reduce_mod(RULE, a), reduce_mod(RULE, b)
    assert reduce_mod(RULE, ra) == ra
    assert ra.degree_in("z") < 2
    assert reduce_mod(RULE, a + b) == ra + rb
    assert reduce_mod(RULE, a * b) == reduce_mod(RULE, ra * rb)
    assert reduce_mod(RULE, a * F).is_zero()
    # a - reduce(a) lies in the ideal (F)
    (a - ra).divide_exact(F)
