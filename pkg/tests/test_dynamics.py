"""Zeros, indices, types and trajectories of the reduced field."""
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from charfol import dynamics as dyn
from charfol.construction import SpecialOrbits

EPS = Fraction(1, 10)
EXPECTED = {"pole z<0": ("source", 1), "pole z>0": ("sink", 1), "P-": ("sink", 1),
            "P+": ("source", 1), "hyperbolic": ("saddle", -1)}


def test_five_zeros_match_closed_forms(zeros):
    closed = dyn.closed_form_zeros(EPS)
    assert set(zeros) == set(closed)
    for label, sp in zeros.items():
        err = max(abs(a - b) for a, b in zip(sp.point, closed[label]))
        assert err < mpmath.mpf("1e-10"), label


def test_frozen_decimal_values(zeros):
    z, r, rho = zeros["hyperbolic"].as_floats()
    # eight-decimal reference values (r0 = 0.876548641..., so 1e-8 rather than half a unit)
    assert (z, r, rho) == pytest.approx((0.0, 0.87654865, 0.05759014), abs=1e-8)
    assert r == pytest.approx(0.8765486415279303, abs=1e-14)
    assert zeros["pole z>0"].as_floats()[0] == pytest.approx(0.104880885, abs=5e-10)
    # z on P+- is e*sqrt(e) = e^(3/2)
    assert zeros["P+"].as_floats()[0] == pytest.approx(0.1 ** 1.5, abs=1e-15)
    assert zeros["P+"].as_floats()[0] == pytest.approx(0.0316227766, abs=5e-11)


def test_types_and_indices(zeros):
    for label, (kind, index) in EXPECTED.items():
        assert (zeros[label].kind, zeros[label].index) == (kind, index), label


def test_jacobian_and_winding_number_agree(zeros):
    for sp in zeros.values():
        det = sp.eigenvalues[0] * sp.eigenvalues[1]
        assert int(mpmath.sign(mpmath.re(det))) == sp.index


def test_saddle_lies_on_the_separatrix_leaf(zeros):
    assert zeros["hyperbolic"].leaf_C == pytest.approx(float(SpecialOrbits.at(EPS).c_sep), abs=1e-12)


def test_index_sum_on_the_reflection_extended_sphere(reduced, zeros):
    total, details = dyn.extended_index_sum(reduced, list(zeros.values()))
    assert total == 2
    assert len(details) == 2 + 2 * 2 + 4  # poles, P+- with their r-mirror, four images of H


def test_index_with_explicit_radius_and_guards(reduced, zeros):
    sp = zeros["pole z>0"]
    assert dyn.poincare_index(reduced, sp, radius="0.001", eps=EPS) == 1
    with pytest.raises(ValueError):
        dyn.poincare_index(reduced, zeros["P+"], radius="0.04", eps=EPS, others=list(zeros.values()))


def test_eps_range_is_enforced(reduced):
    with pytest.raises(ValueError):
        dyn.find_zeros_2d(reduced, Fraction(1, 5))


def test_other_eps(reduced):
    eps = Fraction(1, 20)
    pts = dyn.analyse(reduced, eps)
    closed = dyn.closed_form_zeros(eps)
    assert len(pts) == 5
    for sp in pts:
        assert max(abs(a - b) for a, b in zip(sp.point, closed[sp.label])) < 1e-10
        assert (sp.kind, sp.index) == EXPECTED[sp.label]


def test_conservation_along_rk4(reduced):
    start = dyn.point_on_sphere(EPS, z=0, r=Fraction(95, 100))
    traj = dyn.integrate(reduced, start, EPS, steps=10_000, h=1e-4)
    assert not traj.clipped and len(traj.points) == 10_001
    assert traj.drift_per_time < 1e-10
    assert traj.c_drift < 1e-8
    assert traj.leaf_residual < 1e-12


def test_leaf_residual_stays_small_into_the_sink(reduced):
    # with h = 1e-3 the orbit reaches P- where C = N/D is 0/0; the unreduced
    # leaf equation N - C0*D stays satisfied all the way in
    start = dyn.point_on_sphere(EPS, z=0, r=Fraction(95, 100))
    traj = dyn.integrate(reduced, start, EPS, steps=10_000, h=1e-3)
    assert traj.drift_per_time < 1e-10
    assert traj.leaf_residual < 1e-12
    assert np.allclose(traj.points[-1], [-0.1 ** 1.5, 1.0, 0.0], atol=1e-9)


def test_unstable_manifold_of_the_saddle_follows_the_separatrix(reduced, zeros):
    cs = dyn.CompiledSystem(reduced, EPS, 50)
    sp = zeros["hyperbolic"]
    d = dyn.unstable_direction(cs, sp)
    c_sep = float(SpecialOrbits.at(EPS).c_sep)
    for sign in (1, -1):
        start = np.array(sp.as_floats()) + sign * 1e-7 * d
        start = dyn._project(cs, start)
        traj = dyn.integrate(cs, start, EPS, steps=3000, h=1e-3)
        res = np.abs(cs.N(*traj.points.T) - c_sep * cs.D(*traj.points.T))
        assert res.max() < 1e-6


def test_trajectory_from_a_zero_is_a_point(reduced, zeros):
    traj = dyn.integrate(reduced, zeros["pole z>0"].as_floats(), EPS, steps=100, h=1e-3)
    assert len(traj.points) == 1


def test_start_must_be_on_the_sphere(reduced):
    with pytest.raises(ValueError):
        dyn.integrate(reduced, (0.0, 0.5, 0.5), EPS)
    with pytest.raises(ValueError):
        dyn.point_on_sphere(EPS, z=0.2, r=1)
