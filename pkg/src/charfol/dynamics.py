"""Numerics of the reduced field X' on the quarter-sphere.

Zeros are found by Gauss-Newton from a grid of seeds (float64, vectorised)
and polished at BigFloat precision.  Indices come from angle accumulation
around small circles, types from a central-difference Jacobian; both work in
a local chart (two of z, r, rho) where the third coordinate is solved from
the constraint.  Evaluating the polynomial field at negative r or rho is the
reflection-extended field, so points on the boundary arcs are interior for
those computations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .construction import ReducedSystem, SpecialOrbits
from .poly import Poly, as_scalar
from .numerics import bigfloat, working_dps

COORD_NAMES = ("z", "r", "rho")


def compile_poly(p: Poly, eps, convert=float):
    """Evaluator ``f(z, r, rho)`` for a polynomial at fixed epsilon.

    ``convert`` maps exact coefficients into the working number type; the
    returned function accepts scalars or numpy arrays.
    """
    q = p.subs_eps(eps)
    terms = [(convert(c), key[1:]) for key, c in q.raw_terms.items()]

    def f(*xs):
        total = 0
        for c, exps in terms:
            v = c
            for x, e in zip(xs, exps):
                if e:
                    v = v * x**e
            total = total + v
        return total

    return f


@dataclass
class CompiledSystem:
    """Float and BigFloat evaluators of X', its Jacobian and the constraint."""

    sys: ReducedSystem
    eps: Fraction
    dps: int

    def __post_init__(self):
        mpc = lambda c: mpmath.mpf(c.numerator) / c.denominator  # noqa: E731
        polys = list(self.sys.components) + [self.sys.constraint]
        self.f64 = [compile_poly(p, self.eps) for p in polys]
        self.jac64 = [[compile_poly(p.diff(j), self.eps) for j in range(3)] for p in polys]
        with mpmath.workdps(self.dps):
            self.fmp = [compile_poly(p, self.eps, mpc) for p in polys]
            self.jacmp = [[compile_poly(p.diff(j), self.eps, mpc) for j in range(3)] for p in polys]
        N, D = self.sys.first_integral()
        self.N, self.D = compile_poly(N, self.eps), compile_poly(D, self.eps)
        with mpmath.workdps(self.dps):
            self.Nmp, self.Dmp = compile_poly(N, self.eps, mpc), compile_poly(D, self.eps, mpc)

    def field(self, z, r, rho):
        return [f(z, r, rho) for f in self.f64[:3]]

    def field_mp(self, z, r, rho):
        return [f(z, r, rho) for f in self.fmp[:3]]

    def constraint(self, z, r, rho):
        return self.f64[3](z, r, rho)

    def leaf_parameter(self, z, r, rho=0.0):
        return self.N(z, r, rho) / self.D(z, r, rho)


@dataclass
class SingularPoint:
    point: tuple  # (z, r, rho) as BigFloats
    eps: Fraction
    kind: str | None = None
    index: int | None = None
    sign: str | None = None
    label: str = ""
    leaf_C: object = None
    eigenvalues: tuple = ()
    jacobian_note: str = ""

    def as_floats(self) -> tuple[float, float, float]:
        return tuple(float(v) for v in self.point)

    def to_json(self) -> dict:
        return {"label": self.label, "z": mpmath.nstr(self.point[0], 15),
                "r": mpmath.nstr(self.point[1], 15), "rho": mpmath.nstr(self.point[2], 15),
                "kind": self.kind, "index": self.index, "sign": self.sign,
                "C": None if self.leaf_C is None else mpmath.nstr(self.leaf_C, 15),
                "eigenvalues": [mpmath.nstr(v, 10) for v in self.eigenvalues]}


class ZeroSearchError(RuntimeError):
    pass


def point_on_sphere(eps, z=0, r=None, rho=None):
    """Complete a point of the quarter-sphere from two of its coordinates (floats)."""
    e = float(eps)
    z = float(z)
    if rho is None:
        rr = float(r)
        val = e * e * (1 + e - rr * rr) - z * z
        if val < 0:
            raise ValueError("point is off the quarter-sphere")
        return (z, rr, math.sqrt(val))
    rho = float(rho)
    val = 1 + e - (z * z + rho * rho) / (e * e)
    if val < 0:
        raise ValueError("point is off the quarter-sphere")
    return (z, math.sqrt(val), rho)


def _seeds(eps: float, grid: int) -> np.ndarray:
    zmax = eps * math.sqrt(1 + eps)
    zs = np.linspace(-zmax, zmax, grid)
    seeds = []
    # (z, r) chart
    rs = np.linspace(0, math.sqrt(1 + eps), grid)
    Z, R = np.meshgrid(zs, rs, indexing="ij")
    rho2 = eps**2 * (1 + eps - R**2) - Z**2
    ok = rho2 >= 0
    seeds.append(np.stack([Z[ok], R[ok], np.sqrt(rho2[ok])], axis=1))
    # (z, rho) chart
    rhos = np.linspace(0, zmax, grid)
    Z, P = np.meshgrid(zs, rhos, indexing="ij")
    r2 = 1 + eps - (Z**2 + P**2) / eps**2
    ok = r2 >= 0
    seeds.append(np.stack([Z[ok], np.sqrt(r2[ok]), P[ok]], axis=1))
    return np.concatenate(seeds)


def _residuals_and_jacobians(cs: CompiledSystem, x: np.ndarray):
    z, r, rho = x[:, 0], x[:, 1], x[:, 2]
    F = np.stack([np.broadcast_to(f(z, r, rho), z.shape) for f in cs.f64], axis=1)
    J = np.stack([np.stack([np.broadcast_to(g(z, r, rho), z.shape) for g in row], axis=1)
                  for row in cs.jac64], axis=1)
    return F, J


def _gauss_newton_batch(cs: CompiledSystem, x: np.ndarray, iters: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Damped Gauss-Newton on the over-determined system (X', G) = 0."""
    eye = np.eye(3)
    for _ in range(iters):
        F, J = _residuals_and_jacobians(cs, x)
        JT = np.transpose(J, (0, 2, 1))
        A = JT @ J
        damping = 1e-14 * (np.trace(A, axis1=1, axis2=2) + 1e-300)
        A = A + damping[:, None, None] * eye
        step = np.linalg.solve(A, np.einsum("nji,nj->ni", J, F)[..., None])[..., 0]
        x = x - step
        x = np.where(np.isfinite(x), x, 0.0)
    F, _ = _residuals_and_jacobians(cs, x)
    return x, np.linalg.norm(F, axis=1)


def _polish(cs: CompiledSystem, x0, iters: int = 100):
    with mpmath.workdps(cs.dps + 10):
        x = mpmath.matrix([mpmath.mpf(float(v)) for v in x0])
        tol = mpmath.mpf(10) ** (-(cs.dps + 5))
        for _ in range(iters):
            F = mpmath.matrix([f(x[0], x[1], x[2]) for f in cs.fmp])
            J = mpmath.matrix([[g(x[0], x[1], x[2]) for g in row] for row in cs.jacmp])
            JT = J.T
            step = mpmath.lu_solve(JT * J, JT * F)
            x = x - step
            if mpmath.norm(step) < tol:
                break
        F = mpmath.matrix([f(x[0], x[1], x[2]) for f in cs.fmp])
        res = mpmath.norm(F)
    with mpmath.workdps(cs.dps):
        return tuple(+v for v in x), +res


def find_zeros_2d(sys: ReducedSystem, eps, grid: int = 200, dps: int | None = None,
                  expected: int = 5) -> list[SingularPoint]:
    """All zeros of X' on the closed quarter-sphere (z, r >= 0, rho >= 0)."""
    eps = as_scalar(eps)
    if not (0 < eps <= Fraction(1, 10)):
        raise ValueError("eps must satisfy 0 < eps <= 1/10")
    dps = working_dps(dps)
    cs = CompiledSystem(sys, eps, dps)
    e = float(eps)
    with np.errstate(all="ignore"):
        x, res = _gauss_newton_batch(cs, _seeds(e, grid))
    good = x[(res < 1e-9) & np.all(np.isfinite(x), axis=1)]
    # fold onto the quarter: the zero set is symmetric under r -> -r, rho -> -rho
    good = good.copy()
    good[:, 1:] = np.abs(good[:, 1:])
    _, first = np.unique(np.round(good, 7), axis=0, return_index=True)
    candidates = good[np.sort(first)]
    points: list[SingularPoint] = []
    tol = mpmath.mpf("1e-12")
    for c in candidates:
        pt, res = _polish(cs, c)
        if res > tol:
            continue
        with mpmath.workdps(dps):
            pt = (pt[0], abs(pt[1]), abs(pt[2]))
        if any(max(abs(a - b) for a, b in zip(pt, q.point)) < 1e-8 for q in points):
            continue
        points.append(SingularPoint(pt, eps))
    points.sort(key=lambda s: (float(s.point[1]), float(s.point[0])))
    if len(points) < expected:
        raise ZeroSearchError(f"found {len(points)} zeros of X' at eps = {eps}, expected {expected}")
    for sp in points:
        _label(sp, cs)
    return points


def _label(sp: SingularPoint, cs: CompiledSystem):
    z, r, rho = (float(v) for v in sp.point)
    if r < 1e-9 and rho < 1e-9:
        sp.label = "pole z<0" if z < 0 else "pole z>0"
    elif rho < 1e-9:
        sp.label = "P+" if z > 0 else "P-"
    else:
        sp.label = "hyperbolic"
    with mpmath.workdps(cs.dps):
        D = cs.Dmp(*sp.point)
        if abs(D) > mpmath.mpf("1e-20"):
            sp.leaf_C = cs.Nmp(*sp.point) / D


# -- local charts --------------------------------------------------------------

@dataclass(frozen=True)
class Chart:
    """Graph chart solving coordinate ``solved`` from the constraint."""

    solved: int
    sign: int
    free: tuple[int, int]


def choose_chart(cs: CompiledSystem, point) -> Chart:
    grad = [abs(float(g(*point))) for g in cs.jacmp[3]]
    solved = int(np.argmax(grad))
    free = tuple(i for i in range(3) if i != solved)
    sign = 1 if float(point[solved]) >= 0 else -1
    return Chart(solved, sign, free)


def _lift(cs: CompiledSystem, chart: Chart, u, v):
    """Point (z, r, rho) over chart coordinates (u, v)."""
    e = mpmath.mpf(cs.eps.numerator) / cs.eps.denominator
    pt = [None, None, None]
    pt[chart.free[0]], pt[chart.free[1]] = u, v
    z, r, rho = pt
    if chart.solved == 0:
        val = e**2 * (1 + e - r**2) - rho**2
    elif chart.solved == 1:
        val = 1 + e - (z**2 + rho**2) / e**2
    else:
        val = e**2 * (1 + e - r**2) - z**2
    if val < 0:
        raise ValueError("chart left the surface")
    pt[chart.solved] = chart.sign * mpmath.sqrt(val)
    return pt


def _chart_field(cs: CompiledSystem, chart: Chart, u, v):
    pt = _lift(cs, chart, u, v)
    comps = cs.field_mp(*pt)
    return comps[chart.free[0]], comps[chart.free[1]]


def default_radius(sp: SingularPoint, others: Sequence[SingularPoint] = ()) -> mpmath.mpf:
    """eps/20, shrunk below a third of the distance to the nearest other zero."""
    r = mpmath.mpf(sp.eps.numerator) / sp.eps.denominator / 20
    for q in others:
        if q is sp:
            continue
        d = mpmath.sqrt(sum((a - b) ** 2 for a, b in zip(sp.point, q.point)))
        r = min(r, d / 3)
    return r


def poincare_index(sys_or_cs, p: SingularPoint, radius=None, eps=None, samples: int = 720,
                   others: Sequence[SingularPoint] = (), dps: int | None = None) -> int:
    """Winding number of X'/|X'| around a circle about ``p`` in a local chart."""
    cs = _as_compiled(sys_or_cs, eps if eps is not None else p.eps, dps)
    radius = default_radius(p, others) if radius is None else mpmath.mpf(radius)
    for q in others:
        if q is p:
            continue
        d = mpmath.sqrt(sum((a - b) ** 2 for a, b in zip(p.point, q.point)))
        if d < 2 * radius:
            raise ValueError(f"another zero lies within 2*radius of {p.label or p.point}")
    chart = choose_chart(cs, p.point)
    with mpmath.workdps(cs.dps):
        u0, v0 = p.point[chart.free[0]], p.point[chart.free[1]]
        total = mpmath.mpf(0)
        prev = None
        first = None
        for k in range(samples + 1):
            t = 2 * mpmath.pi * k / samples
            a, b = _chart_field(cs, chart, u0 + radius * mpmath.cos(t), v0 + radius * mpmath.sin(t))
            if abs(a) + abs(b) < mpmath.mpf(10) ** (-(cs.dps // 2)):
                raise ValueError("field vanishes on the sampling circle")
            ang = mpmath.atan2(b, a)
            if prev is None:
                first = ang
            else:
                d = ang - prev
                while d > mpmath.pi:
                    d -= 2 * mpmath.pi
                while d <= -mpmath.pi:
                    d += 2 * mpmath.pi
                total += d
            prev = ang
        _ = first
        return int(mpmath.nint(total / (2 * mpmath.pi)))


def _as_compiled(sys_or_cs, eps, dps) -> CompiledSystem:
    if isinstance(sys_or_cs, CompiledSystem):
        return sys_or_cs
    return CompiledSystem(sys_or_cs, as_scalar(eps), working_dps(dps))


def jacobian(cs: CompiledSystem, p: SingularPoint, step=mpmath.mpf("1e-10")):
    """Central-difference Jacobian of the chart field at ``p``."""
    chart = choose_chart(cs, p.point)
    with mpmath.workdps(cs.dps):
        u0, v0 = p.point[chart.free[0]], p.point[chart.free[1]]
        h = mpmath.mpf(step)
        fu_p = _chart_field(cs, chart, u0 + h, v0)
        fu_m = _chart_field(cs, chart, u0 - h, v0)
        fv_p = _chart_field(cs, chart, u0, v0 + h)
        fv_m = _chart_field(cs, chart, u0, v0 - h)
        J = [[(fu_p[0] - fu_m[0]) / (2 * h), (fv_p[0] - fv_m[0]) / (2 * h)],
             [(fu_p[1] - fu_m[1]) / (2 * h), (fv_p[1] - fv_m[1]) / (2 * h)]]
    return J, chart


def classify(sys_or_cs, p: SingularPoint, eps=None, dps: int | None = None,
             borderline=1e-9) -> str | None:
    """'source', 'sink', 'saddle' or 'rotational' from the 2x2 Jacobian.

    Returns None (deferring to the index) when an eigenvalue is within
    ``borderline`` of zero.
    """
    cs = _as_compiled(sys_or_cs, eps if eps is not None else p.eps, dps)
    J, _ = jacobian(cs, p)
    with mpmath.workdps(cs.dps):
        tr = J[0][0] + J[1][1]
        det = J[0][0] * J[1][1] - J[0][1] * J[1][0]
        disc = tr * tr - 4 * det
        if disc >= 0:
            s = mpmath.sqrt(disc)
            l1, l2 = (tr - s) / 2, (tr + s) / 2
            p.eigenvalues = (l1, l2)
            if min(abs(l1), abs(l2)) < borderline:
                p.jacobian_note = "degenerate"
                return None
            if l1 > 0 and l2 > 0:
                return "source"
            if l1 < 0 and l2 < 0:
                return "sink"
            return "saddle"
        s = mpmath.sqrt(-disc)
        p.eigenvalues = (mpmath.mpc(tr / 2, -s / 2), mpmath.mpc(tr / 2, s / 2))
        if abs(tr / 2) < borderline:
            return "rotational"
        return "source" if tr > 0 else "sink"


def analyse(sys: ReducedSystem, eps, dps: int | None = None, grid: int = 200) -> list[SingularPoint]:
    """Find, classify and index every zero of X' at ``eps``."""
    eps = as_scalar(eps)
    cs = CompiledSystem(sys, eps, working_dps(dps))
    points = find_zeros_2d(sys, eps, grid=grid, dps=dps)
    for sp in points:
        sp.kind = classify(cs, sp)
        sp.index = poincare_index(cs, sp, others=points)
    return points


def mirror_images(sp: SingularPoint) -> list[SingularPoint]:
    """Distinct images of a zero under r -> -r and rho -> -rho."""
    out = []
    seen = set()
    for sr in (1, -1):
        for sh in (1, -1):
            pt = (sp.point[0], sr * sp.point[1], sh * sp.point[2])
            key = tuple(round(float(v), 12) + 0.0 for v in pt)
            if key in seen:
                continue
            seen.add(key)
            out.append(SingularPoint(pt, sp.eps, label=f"{sp.label} image"))
    return out


def extended_index_sum(sys: ReducedSystem, points: Sequence[SingularPoint], dps=None) -> tuple[int, list]:
    """Sum of indices over the reflection-extended surface (an ellipsoid S^2)."""
    cs = CompiledSystem(sys, points[0].eps, working_dps(dps))
    images = [img for sp in points for img in mirror_images(sp)]
    details = []
    total = 0
    for img in images:
        idx = poincare_index(cs, img, others=images)
        details.append((img.point, idx))
        total += idx
    return total, details


# -- trajectories ----------------------------------------------------------------

@dataclass
class Trajectory:
    points: np.ndarray
    clipped: bool = False
    constraint_drift: float = 0.0
    drift_per_time: float = 0.0
    c_drift: float = 0.0
    leaf_residual: float = 0.0
    c_values: np.ndarray = field(default_factory=lambda: np.empty(0))


def _project(cs: CompiledSystem, x: np.ndarray, iters: int = 3) -> np.ndarray:
    for _ in range(iters):
        g = cs.constraint(*x)
        grad = np.array([f(*x) for f in cs.jac64[3]], dtype=float)
        nn = grad @ grad
        if nn == 0:
            break
        x = x - g * grad / nn
    return x


def integrate(sys_or_cs, start, eps, steps: int = 10_000, h: float = 1e-3,
              stop_tol: float = 1e-14) -> Trajectory:
    """RK4 on X' with orthogonal projection back onto the constraint each step."""
    eps = as_scalar(eps)
    cs = sys_or_cs if isinstance(sys_or_cs, CompiledSystem) else CompiledSystem(sys_or_cs, eps, working_dps(None))
    x = np.array([float(v) for v in start], dtype=float)
    if abs(cs.constraint(*x)) > 1e-10:
        raise ValueError("start point does not satisfy the constraint to 1e-10")

    def f(y):
        return np.array(cs.field(*y), dtype=float)

    if np.linalg.norm(f(x)) < stop_tol:
        c0 = _leaf_c(cs, x)
        return Trajectory(x[None, :], c_values=np.array([c0]))
    pts = [x.copy()]
    clipped = False
    worst = abs(cs.constraint(*x))
    for _ in range(steps):
        k1 = f(x)
        k2 = f(x + 0.5 * h * k1)
        k3 = f(x + 0.5 * h * k2)
        k4 = f(x + h * k3)
        y = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        y = _project(cs, y)
        if y[1] < 0 or y[2] < 0:
            clipped = True
            break
        x = y
        worst = max(worst, abs(cs.constraint(*x)))
        pts.append(x.copy())
    arr = np.array(pts)
    cvals = np.array([_leaf_c(cs, p) for p in arr])
    finite = cvals[np.isfinite(cvals)]
    c_drift = 0.0
    if finite.size:
        c_drift = float(np.max(np.abs(finite - finite[0])) / max(abs(finite[0]), 1e-300))
    # |N - C0 D| stays well conditioned where C = N/D is 0/0 (at P+-)
    leaf_res = 0.0
    if np.isfinite(cvals[0]):
        leaf_res = float(np.max(np.abs(cs.N(*arr.T) - cvals[0] * cs.D(*arr.T))))
    duration = max(h * (len(arr) - 1), h)
    return Trajectory(arr, clipped, worst, worst / duration, c_drift, leaf_res, cvals)


def _leaf_c(cs: CompiledSystem, p) -> float:
    D = cs.D(*p)
    return cs.N(*p) / D if D != 0 else math.inf


def unstable_direction(cs: CompiledSystem, p: SingularPoint) -> np.ndarray:
    """Unstable eigenvector of a saddle, lifted to (z, r, rho)."""
    J, chart = jacobian(cs, p)
    A = np.array([[float(v) for v in row] for row in J])
    w, V = np.linalg.eig(A)
    k = int(np.argmax(w.real))
    du = V[:, k].real
    # lift the chart direction through the graph of the solved coordinate
    base = np.array([float(v) for v in p.point])
    eps_h = 1e-7
    moved = _lift(cs, chart, p.point[chart.free[0]] + eps_h * du[0], p.point[chart.free[1]] + eps_h * du[1])
    d = (np.array([float(v) for v in moved]) - base) / eps_h
    return d / np.linalg.norm(d)


def closed_form_zeros(eps, dps=None) -> dict[str, tuple]:
    """The five zeros of X' from their closed forms, as BigFloats."""
    eps = as_scalar(eps)
    dps = working_dps(dps)
    orb = SpecialOrbits.at(eps, dps)
    with mpmath.workdps(dps):
        e = bigfloat(eps, dps)
        s = e * mpmath.sqrt(1 + e)
        zero = mpmath.mpf(0)
        return {
            "pole z<0": (-s, zero, zero),
            "pole z>0": (s, zero, zero),
            "P-": (-orb.z_p, mpmath.mpf(1), zero),
            "P+": (orb.z_p, mpmath.mpf(1), zero),
            "hyperbolic": (zero, orb.r0, orb.n0),
        }
