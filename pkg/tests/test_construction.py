"""The explicit hypersurface, its field X and the ledger checks."""
from fractions import Fraction

import pytest

from charfol import construction as pc
from charfol.dsl import parse, parse_field
from charfol.forms import Form, ext_d, interior, lie_derivative, wedge, wedge_power, top_coefficient
from charfol.normal_form import reduce_form
from charfol.poly import Poly

EPS = Fraction(1, 10)


def test_n_must_exceed_one():
    with pytest.raises(pc.ConstructionError):
        pc.build(1)
    with pytest.raises(pc.ConstructionError):
        pc.build(2, mutation="no-such-token")


def test_x_display_parses_to_x(obj):
    assert parse_field(pc.x_display(obj.n), obj.coords) == obj.X


def test_beta_is_contact(obj):
    vol = top_coefficient(wedge(obj.beta, wedge_power(ext_d(obj.beta), obj.n)))
    assert not vol.is_zero()


@pytest.mark.parametrize("check", ["verify_tangency", "verify_beta_x", "verify_iota_dbeta"])
def test_exact_identities(obj, check):
    result = getattr(pc, check)(obj)
    assert result.passed, result.residual
    assert result.residual_terms() == 0


def test_identities_by_hand(obj):
    """Re-derive the four identities directly, without the verify_* helpers."""
    P = lambda t: parse(t, obj.coords)  # noqa: E731
    k = P("2*e^-2*(2*r^2-1)*z")
    q = P("2*r^4-2*r^2+1")
    dF = ext_d(Form.function(obj.F))
    assert interior(obj.X, dF).as_poly() == k * obj.F
    assert interior(obj.X, obj.beta).as_poly() == q * obj.F
    assert interior(obj.X, ext_d(obj.beta)) == k * obj.beta - q * dF
    assert reduce_form(obj.rule, lie_derivative(obj.X, obj.beta) - k * obj.beta).is_zero()


def test_boundary_substitution_and_sturm(obj):
    for eps in (Fraction(1, 10), Fraction(1, 100)):
        check = pc.verify_boundary(obj, eps)
        assert check.passed and check.details["sturm_positive"]
    with pytest.raises(pc.ConstructionError):
        pc.verify_boundary(obj, Fraction(1, 5))


def test_admissible_interval_endpoints():
    lo, hi, _ = pc.admissible_interval(EPS)
    # roots of (1 + e^2) r^2 - 2 r + 1 - e^2 (1 + e) = 0
    e = 0.1
    a, b, c = 1 + e * e, -2.0, 1 - e * e * (1 + e)
    disc = (b * b - 4 * a * c) ** 0.5
    assert float(lo) == pytest.approx((-b - disc) / (2 * a), abs=1e-14)
    assert float(hi) == pytest.approx((-b + disc) / (2 * a), abs=1e-14)
    assert 0.9571 < float(lo) < 0.9572 and 1.0230 < float(hi) < 1.0231


def test_reduced_system(obj):
    sys = pc.reduce_system(obj)
    P = lambda t: parse(t, pc.REDUCED_COORDS)  # noqa: E731
    assert sys.components == (P("(r^2-1)^2+(2*r^2-1)*(e^-2*z^2-e)"), P("e^-2*r*(r^2-1)*z"),
                              P("e^-2*(2*r^2-1)*z*rho"))
    assert pc.verify_reduction(obj).passed
    fi = pc.verify_first_integral(sys)
    assert fi.passed and fi.certificate == "symbolic"
    assert fi.details["identically_zero_before_reduction"]


def test_first_integral_fallback_detects_a_bad_field():
    bad = pc.reduce_system(pc.build(2, mutation="r-sign"))
    check = pc.verify_first_integral(bad, fallback_steps=2000)
    assert check.certificate == "trajectory" and not check.passed


def test_special_orbits(obj):
    check = pc.verify_special_orbits(obj, EPS)
    assert check.passed, check.details
    orb = pc.SpecialOrbits.at(EPS)
    assert float(orb.r0) == pytest.approx(0.87654864152793, abs=1e-13)
    assert float(orb.n0) == pytest.approx(0.0575901449065324, abs=1e-15)
    assert float(orb.c_sep) == pytest.approx(1.86332495807108, abs=1e-13)
    assert orb.sphere_dimension(obj.n) == 2 * obj.n - 3


def test_liouville_form_is_conformally_natural(obj2):
    f = parse("1 + r^2*z - e*x1", obj2.coords)
    assert pc.conformal_identity_residual(obj2.coords, obj2.n, f).is_zero()


@pytest.mark.parametrize("token", sorted(pc.MUTATIONS))
def test_each_mutation_breaks_an_exact_identity_or_the_dynamics(token):
    obj = pc.build(2, mutation=token)
    checks = [pc.verify_tangency(obj), pc.verify_beta_x(obj), pc.verify_iota_dbeta(obj),
              pc.verify_reduction(obj), pc.verify_special_orbits(obj, EPS)]
    assert not all(c.passed for c in checks)


def test_higher_dimension_smoke():
    obj = pc.build(4)
    assert all(c.passed for c in (pc.verify_tangency(obj), pc.verify_beta_x(obj), pc.verify_iota_dbeta(obj)))
