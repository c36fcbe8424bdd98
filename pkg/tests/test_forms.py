"""Exterior algebra: wedge, d, interior product, Lie derivative."""
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from charfol.dsl import parse, parse_field, parse_form
from charfol.forms import (Form, VecField, ext_d, interior, lie_derivative, random_form,
                           top_coefficient, wedge, wedge_power)
from charfol.poly import CoordSystem, Poly

C2 = CoordSystem.standard(2)


@pytest.mark.parametrize("n", [2, 3])
def test_d_squared_vanishes_on_random_forms(n):
    coords = CoordSystem.standard(n)
    rng = np.random.default_rng(1000 + n)
    for degree in range(coords.dim - 1):
        for _ in range(1000):
            a = random_form(coords, degree, rng)
            assert ext_d(ext_d(a)).is_zero()


def test_wedge_examples():
    dz, dr = Form.d(C2, "z"), Form.d(C2, "r")
    assert wedge(dz, dr) == -wedge(dr, dz)
    assert wedge(dz, dz).is_zero()
    # wedge past the top degree is the zero form, not an error
    top = parse_form("dz^dr^dth^dx1^dy1", C2)
    assert wedge(top, dz).is_zero()
    assert top_coefficient(top) == Poly.const(C2, 1)


def test_graded_commutativity_and_leibniz():
    rng = np.random.default_rng(7)
    for _ in range(60):
        p, q = int(rng.integers(0, 3)), int(rng.integers(0, 3))
        a, b = random_form(C2, p, rng), random_form(C2, q, rng)
        assert wedge(a, b) == (-1) ** (p * q) * wedge(b, a)
        assert ext_d(wedge(a, b)) == wedge(ext_d(a), b) + (-1) ** p * wedge(a, ext_d(b))


def _random_field(coords, rng):
    comps = [random_form(coords, 0, rng, n_terms=2).as_poly() for _ in coords.names]
    return VecField(coords, comps)


def test_interior_is_an_antiderivation():
    rng = np.random.default_rng(11)
    for _ in range(60):
        p, q = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        a, b = random_form(C2, p, rng), random_form(C2, q, rng)
        X = _random_field(C2, rng)
        lhs = interior(X, wedge(a, b))
        rhs = wedge(interior(X, a), b) + (-1) ** p * wedge(a, interior(X, b))
        assert lhs == rhs
        assert interior(X, interior(X, a)).is_zero() if p >= 2 else True


def test_interior_rejects_functions():
    with pytest.raises(ValueError):
        interior(VecField.basis(C2, "z"), Form.function(Poly.var(C2, "z")))


def test_lie_derivative_of_functions_and_radial_example():
    X = parse_field("x1*d/dx1 + y1*d/dy1", C2)
    f = parse("x1^2 + y1^2", C2)
    assert lie_derivative(X, Form.function(f)).as_poly() == 2 * f
    lam = parse_form("x1*dy1 - y1*dx1", C2)
    assert lie_derivative(X, lam) == 2 * lam


def test_lie_derivative_commutes_with_d():
    rng = np.random.default_rng(5)
    for _ in range(40):
        a = random_form(C2, int(rng.integers(0, 3)), rng)
        X = _random_field(C2, rng)
        assert lie_derivative(X, ext_d(a)) == ext_d(lie_derivative(X, a))


def test_dbeta_power_is_a_volume_form():
    beta = parse_form("dz + x1*dy1 - y1*dx1", CoordSystem(("z", "x1", "y1")))
    assert top_coefficient(wedge(beta, wedge_power(ext_d(beta), 1))) == Poly.const(beta.coords, 2)


# -- Cartan's formula against a numerical pullback by the flow -------------------

def _flow_with_jacobian(X, p, t, eps, steps=40):
    """RK4 for the flow of X and its variational equation."""
    N = len(p)
    comps = X.components
    grads = [[c.diff(j) for j in range(N)] for c in comps]

    def rhs(state):
        x, J = state[:N], state[N:].reshape(N, N)
        fx = np.array([float(c.evaluate(x, eps)) for c in comps])
        A = np.array([[float(g.evaluate(x, eps)) for g in row] for row in grads])
        return np.concatenate([fx, (A @ J).ravel()])

    y = np.concatenate([np.array(p, dtype=float), np.eye(N).ravel()])
    h = t / steps
    for _ in range(steps):
        k1 = rhs(y)
        k2 = rhs(y + h / 2 * k1)
        k3 = rhs(y + h / 2 * k2)
        k4 = rhs(y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y[:N], y[N:].reshape(N, N)


@pytest.mark.parametrize("degree", [1, 2])
def test_cartan_formula_matches_flow_pullback(degree):
    coords = CoordSystem(("z", "r", "th"))
    rng = np.random.default_rng(40 + degree)
    eps = 0.5
    h = 1e-5  # central difference; error ~ h^2 * third derivative
    for _ in range(5):
        a = random_form(coords, degree, rng, n_terms=3, max_exp=2)
        X = VecField(coords, [random_form(coords, 0, rng, n_terms=2, max_exp=1).as_poly() for _ in range(3)])
        p = rng.uniform(-0.5, 0.5, 3)
        xp, Jp = _flow_with_jacobian(X, p, h, eps)
        xm, Jm = _flow_with_jacobian(X, p, -h, eps)
        L = lie_derivative(X, a)
        for idx in combinations(range(3), degree):
            vecs = [np.eye(3)[i] for i in idx]
            plus = float(a.evaluate_on([Jp @ v for v in vecs], xp, eps))
            minus = float(a.evaluate_on([Jm @ v for v in vecs], xm, eps))
            numeric = (plus - minus) / (2 * h)
            exact = float(L.evaluate_on(vecs, p, eps))
            assert abs(numeric - exact) < 1e-6 * (1 + abs(exact))
