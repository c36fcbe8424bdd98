"""The text language for polynomials, forms and fields."""
import pytest

from charfol.dsl import DSLParseError, infer_coords, parse, parse_field, parse_form, parse_many
from charfol.forms import Form, VecField
from charfol.poly import CoordSystem, Poly


def test_coordinate_inference_is_canonical():
    assert infer_coords(["y1*dx2 + theta + z", "r"]).names == ("z", "r", "th", "y1", "x2")
    coords, (beta, F) = parse_many("dz + x1*dy1 - y1*dx1", "z")
    assert coords.names == ("z", "x1", "y1")
    assert isinstance(beta, Form) and isinstance(F, Poly)


def test_values_of_each_kind():
    c = CoordSystem(("z", "r", "th"))
    assert isinstance(parse("e^-2*z^2", c), Poly)
    assert parse_form("(2*r^2-1)*dz + r^2*(r^2-1)*dth", c).degree == 1
    assert parse_form("dz^dr", c) == -parse_form("dr*dz", c)
    X = parse_field("z*d/dr + d/dtheta", c)
    assert isinstance(X, VecField) and X["th"] == Poly.const(c, 1)
    assert parse("z/2", c) * 2 == parse("z", c)
    assert parse("z/e^2", c) == parse("e^-2*z", c)


@pytest.mark.parametrize("text, line, col", [
    ("z +* r", 1, 4),
    ("z + (r", 1, 7),
    ("2*dz*d/dr", 1, 5),
    ("z^r", 1, 2),
    ("z/r", 1, 2),
    ("foo+1", 1, 1),
    ("z\n + r $", 2, 6),
    ("dz^dz^", 1, 7),
    ("e^-1*z^-2", 1, 7),
    ("", 1, 1),
])
def test_parse_errors_carry_line_and_column(text, line, col):
    with pytest.raises(DSLParseError) as info:
        parse(text)
    assert (info.value.line, info.value.col) == (line, col)
    assert f"line {line}, column {col}" in str(info.value)


def test_kind_errors():
    with pytest.raises(TypeError):
        parse_field("z")
    with pytest.raises(TypeError):
        parse_form("d/dz")
