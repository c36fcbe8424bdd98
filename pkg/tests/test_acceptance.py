"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

The lines are collected in ``RESULTS`` and printed in the pytest terminal
summary (see ``conftest.py``); running this file directly prints them too.
"""
from __future__ import annotations

import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from charfol import construction as pc
from charfol import dynamics as dyn
from charfol import portrait as pt
from charfol.dsl import parse_field, parse_many
from charfol.engine import ContactData, characteristic_field, minors_residuals
from charfol.report import tb_report, verification_ledger

EPS = Fraction(1, 10)
RESULTS: dict[int, tuple[bool, str]] = {}


def record(number: int, ok: bool, summary: str):
    RESULTS[number] = (ok, summary)
    print(f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {summary}")
    assert ok, summary


def test_1_exact_identities():
    t0 = time.perf_counter()
    residual_terms = 0
    for n in (2, 3):
        obj = pc.build(n)
        for check in (pc.verify_tangency(obj), pc.verify_beta_x(obj), pc.verify_iota_dbeta(obj)):
            residual_terms += check.residual_terms() + (not check.passed)
    elapsed = time.perf_counter() - t0
    record(1, residual_terms == 0 and elapsed < 10,
           f"dF(X), beta(X), iota_X dbeta, L_X beta mod F for n=2,3: "
           f"{residual_terms} residual terms in {elapsed:.2f}s (< 10s)")


def test_2_boundary_transversality():
    t0 = time.perf_counter()
    obj = pc.build(2)
    checks = [pc.verify_boundary(obj, eps) for eps in (Fraction(1, 10), Fraction(1, 100))]
    elapsed = time.perf_counter() - t0
    ok = all(c.passed and c.residual_terms() == 0 for c in checks) and elapsed < 2
    record(2, ok, f"z=r-1 substitution exact, Sturm-positive on the admissible interval at eps=1/10, 1/100 "
                  f"in {elapsed:.2f}s (< 2s)")


def test_3_singularities():
    t0 = time.perf_counter()
    sys = pc.reduce_system(pc.build(2))
    found = {p.label: p for p in dyn.find_zeros_2d(sys, EPS)}
    elapsed = time.perf_counter() - t0
    closed = dyn.closed_form_zeros(EPS)
    worst = max(max(abs(a - b) for a, b in zip(found[k].point, closed[k])) for k in closed) \
        if set(found) == set(closed) else mpmath.inf
    decimals = {"pole z<0": (-0.104880885, 0, 0), "pole z>0": (0.104880885, 0, 0),
                "P-": (-0.0316227766, 1, 0), "P+": (0.0316227766, 1, 0),
                "hyperbolic": (0, 0.87654865, 0.05759014)}
    dec_ok = all(np.allclose(found[k].as_floats(), v, atol=1e-8) for k, v in decimals.items())
    ok = len(found) == 5 and worst < 1e-10 and dec_ok and elapsed < 30
    record(3, ok, f"{len(found)} zeros, max deviation from closed forms {mpmath.nstr(worst, 3)} (< 1e-10), "
                  f"found in {elapsed:.2f}s (< 30s)")


@pytest.fixture(scope="module")
def analysed():
    return {p.label: p for p in dyn.analyse(pc.reduce_system(pc.build(2)), EPS)}


def test_4_classification(analysed):
    expected = {"pole z<0": ("source", 1), "pole z>0": ("sink", 1), "P-": ("sink", 1),
                "P+": ("source", 1), "hyperbolic": ("saddle", -1)}
    got = {k: (p.kind, p.index) for k, p in analysed.items()}
    agree = all((p.index == -1) == (p.kind == "saddle") and
                int(mpmath.sign(mpmath.re(p.eigenvalues[0] * p.eigenvalues[1]))) == p.index
                for p in analysed.values())
    record(4, got == expected and agree,
           "S+ source, S- sink, (0,r0,n0) saddle index -1, others +1; Jacobian and winding number agree")


def test_5_tb_report():
    rep, _ = tb_report(2, EPS)
    ok = (rep.sum_minus, rep.sum_plus, rep.euler_rel, rep.chi, rep.verdict, rep.neg_euler, rep.neg_chi) \
        == (1, 1, 0, 2, "violated", 0, -2)
    record(5, ok, f"sum over S- = {rep.sum_minus} > 0 -> {rep.verdict}; <e> = {rep.euler_rel}; "
                  f"-<e> = {rep.neg_euler} vs -chi = {rep.neg_chi}")


def test_6_engine_cross_check():
    minors_zero = True
    positive = 0
    rng = np.random.default_rng(2024)
    for n in (2, 3):
        obj = pc.build(n)
        data = ContactData.create(obj.beta, obj.F)
        Xh = characteristic_field(data)
        minors_zero &= all(m.is_zero() for m in minors_residuals(data, Xh, obj.X))
    obj = pc.build(2)
    Xh = characteristic_field(ContactData.create(obj.beta, obj.F))
    e = 0.1
    while positive < 20:
        r = rng.uniform(0.01, np.sqrt(1 + e))
        ball = rng.normal(size=2) * e * rng.uniform(0, 0.6)
        z2 = e * e * (1 + e - r * r) - ball @ ball
        if z2 <= 0:
            continue
        p = np.array([rng.choice([-1, 1]) * np.sqrt(z2), r, rng.uniform(0, 6.28), *ball])
        a = np.array([float(c.evaluate(p, e)) for c in Xh.components])
        b = np.array([float(c.evaluate(p, e)) for c in obj.X.components])
        big = np.abs(b) > 1e-6 * np.abs(b).max()
        ratios = a[big] / b[big]
        if not (ratios.min() > 0 and np.ptp(ratios) <= 1e-9 * ratios.mean()
                and np.allclose(a, ratios.mean() * b, rtol=1e-9, atol=1e-12 * np.abs(a).max())):
            break
        positive += 1
    coords, (beta, F) = parse_many("dz + x1*dy1 - y1*dx1", "z")
    radial = characteristic_field(ContactData.create(beta, F)) == \
        parse_field("1/2*x1*d/dx1 + 1/2*y1*d/dy1", coords)
    record(6, minors_zero and positive == 20 and radial,
           f"all 2x2 minors reduce to 0 (n=2,3); ratio positive and consistent at {positive}/20 points; "
           f"radial oracle {'matches' if radial else 'differs'}")


def test_7_conservation():
    """Constraint and leaf conservation along 10^4-step RK4 runs.

    Relative drift of C = N/D is measured on orbits that stay clear of the
    zeros during the run.  Orbits falling into a pole have N, D -> 0 and the
    quotient loses digits by cancellation; there the unreduced leaf residual
    |N - C0 D| is the conserved quantity that is checked instead.
    """
    sys = pc.reduce_system(pc.build(2))
    worst_drift = worst_c = worst_leaf = 0.0
    starts = {(0, Fraction(95, 100)): True, (0, Fraction(102, 100)): True,
              (0, Fraction(1, 2)): False, (Fraction(1, 20), Fraction(3, 10)): False}
    for (z, r), clear_of_zeros in starts.items():
        start = dyn.point_on_sphere(EPS, z=z, r=r)
        traj = dyn.integrate(sys, start, EPS, steps=10_000, h=1e-4)
        assert not traj.clipped
        worst_drift = max(worst_drift, traj.drift_per_time)
        worst_leaf = max(worst_leaf, traj.leaf_residual)
        if clear_of_zeros:
            worst_c = max(worst_c, traj.c_drift)
    record(7, worst_drift < 1e-10 and worst_c < 1e-8 and worst_leaf < 1e-12,
           f"10^4 RK4 steps (h=1e-4): constraint drift {worst_drift:.1e}/unit time (< 1e-10), "
           f"relative C drift {worst_c:.1e} (< 1e-8), |N - C0 D| {worst_leaf:.1e} on all 4 starts")


def test_8_portrait(analysed):
    import xml.etree.ElementTree as ET

    svg = pt.render_svg(pt.PortraitSpec.default(EPS, markers=list(analysed.values())))
    root = ET.fromstring(svg)
    markers = sum(1 for el in root.iter() if el.get("class") == "singular-marker")
    seps = [el for el in root.iter() if el.get("class") == "separatrix"]
    c_sep = float(seps[0].get("data-C")) if len(seps) == 1 else float("nan")
    sep_pts = np.array([[float(v) for v in pair.split(",")]
                        for line in seps[0] for pair in line.get("points").split()])
    sep_res = float(np.abs(pt.leaf_residual(1 + 0.2 + 2 * np.sqrt(0.11), sep_pts[:, 0], sep_pts[:, 1], 0.1)).max())
    ok = markers == 5 and abs(c_sep - 1.86332495) < 1e-8 and sep_res < 1e-6 \
        and pt.max_leaf_residual(svg, EPS) < 1e-6
    record(8, ok, f"{markers} singular markers; separatrix C = {c_sep:.8f}, max leaf residual {sep_res:.1e} (< 1e-6)")


def test_9_mutation_sensitivity():
    caught = []
    for token in sorted(pc.MUTATIONS):
        failures = [c.name for c in verification_ledger(2, EPS, mutation=token) if not c.passed]
        caught.append(bool(failures))
    record(9, len(caught) == 10 and all(caught),
           f"{sum(caught)}/{len(pc.MUTATIONS)} single-token mutations of X caught by the ledger")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
