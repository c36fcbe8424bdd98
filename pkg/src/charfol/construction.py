"""The TB-violating hypersurface in U x B^{2n-2} and its verification ledger.

Everything here is built from the overtwisted form
``alpha' = (2r^2-1) dz + r^2(r^2-1) dth`` stabilised by the Liouville form
``sum x_i dy_i - y_i dx_i`` on the ball factor, the ellipsoid
``F = r^2 + e^-2 (z^2 + |x|^2 + |y|^2) - 1 - e`` and the explicit field ``X``
tangent to it.  The ``verify_*`` functions check each displayed identity as
an exact polynomial identity, returning a :class:`Check`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath

from .dsl import parse
from .forms import Form, VecField, ext_d, interior, lie_derivative
from .normal_form import NormalFormRule, reduce_form
from .numerics import UniPoly, bigfloat, isolate_roots, refine, sturm_positive, working_dps
from .poly import CoordSystem, Poly, as_scalar


class ConstructionError(ValueError):
    pass


# -- mutations of X used as sensitivity controls ------------------------------
# token -> (component, replacement DSL text)
_X_TEXT = {
    "r": "e^-2*r*(r^2-1)*z",
    "th": "1+2*e-2*e^-2*z^2",
    "z": "(r^2-1)^2+(2*r^2-1)*(e^-2*z^2-e)",
    "radial": "e^-2*(2*r^2-1)*z",
    "rotation": "e^-2*(2*r^4-2*r^2+1)",
}

MUTATIONS: dict[str, tuple[str, str]] = {
    "dtheta+1": ("th", "2+2*e-2*e^-2*z^2"),
    "r-sign": ("r", "-e^-2*r*(r^2-1)*z"),
    "theta-2eps-sign": ("th", "1-2*e-2*e^-2*z^2"),
    "theta-z2-sign": ("th", "1+2*e+2*e^-2*z^2"),
    "z-square-sign": ("z", "-(r^2-1)^2+(2*r^2-1)*(e^-2*z^2-e)"),
    "z-lambda-sign": ("z", "(r^2-1)^2-(2*r^2-1)*(e^-2*z^2-e)"),
    "z-eps-sign": ("z", "(r^2-1)^2+(2*r^2-1)*(e^-2*z^2+e)"),
    "radial-sign": ("radial", "-e^-2*(2*r^2-1)*z"),
    "rotation-sign": ("rotation", "-e^-2*(2*r^4-2*r^2+1)"),
    "rotation-const-sign": ("rotation", "e^-2*(2*r^4-2*r^2-1)"),
}


@dataclass(frozen=True)
class HypersurfaceData:
    n: int
    coords: CoordSystem
    lam: Poly
    mu: Poly
    alpha_prime: Form
    beta: Form
    F: Poly
    X: VecField
    boundary_fn: Poly
    mutation: str | None = None

    @property
    def lambda_mu(self) -> tuple[Poly, Poly]:
        return self.lam, self.mu

    @property
    def rule(self) -> NormalFormRule:
        return NormalFormRule.from_polynomial(self.F, "z")

    @property
    def dF(self) -> Form:
        return ext_d(Form.function(self.F))

    def ball_coords(self) -> list[tuple[str, str]]:
        return [(f"x{i}", f"y{i}") for i in range(1, self.n)]


def _ball_sum(coords: CoordSystem, n: int, fn: Callable[[str, str], object]):
    total = None
    for i in range(1, n):
        term = fn(f"x{i}", f"y{i}")
        total = term if total is None else total + term
    return total


def build(n: int, mutation: str | None = None) -> HypersurfaceData:
    """All objects of the construction in dimension ``2n+1`` (``n >= 2``)."""
    if n < 2:
        raise ConstructionError(f"the construction needs n > 1 (got n = {n})")
    coords = CoordSystem.standard(n)
    P = lambda text: parse(text, coords)  # noqa: E731
    lam = P("2*r^2-1")
    mu = P("r^2*(r^2-1)")
    dz, dth = Form.d(coords, "z"), Form.d(coords, "th")
    alpha_prime = lam * dz + mu * dth
    liouville = _ball_sum(coords, n, lambda x, y: P(x) * Form.d(coords, y) - P(y) * Form.d(coords, x))
    beta = alpha_prime + liouville
    sq = _ball_sum(coords, n, lambda x, y: P(x) ** 2 + P(y) ** 2)
    F = P("r^2") + Poly.eps(coords, -2) * (P("z^2") + sq) - P("1+e")

    texts = dict(_X_TEXT)
    if mutation is not None:
        if mutation not in MUTATIONS:
            raise ConstructionError(f"unknown mutation {mutation!r}; choose from {sorted(MUTATIONS)}")
        comp, text = MUTATIONS[mutation]
        texts[comp] = text
    radial, rotation = P(texts["radial"]), P(texts["rotation"])
    comps = {"r": P(texts["r"]), "th": P(texts["th"]), "z": P(texts["z"])}
    for x, y in [(f"x{i}", f"y{i}") for i in range(1, n)]:
        comps[x] = radial * P(x) - rotation * P(y)
        comps[y] = radial * P(y) + rotation * P(x)
    X = VecField.from_dict(coords, comps)

    for name, obj in [("lambda", lam), ("mu", mu), ("F", F)] + [(f"X^{k}", v) for k, v in comps.items()]:
        if not obj.free_of("th"):
            raise ConstructionError(f"{name} depends on th")
    for idx, f in beta.terms.items():
        if not f.free_of("th"):
            raise ConstructionError("beta has a th-dependent coefficient")
    return HypersurfaceData(n, coords, lam, mu, alpha_prime, beta, F, X,
                            P("r-z-1"), mutation)


def x_display(n: int) -> str:
    """The field X written in the DSL, one term per coordinate direction."""
    xs = " + ".join(f"x{i}*d/dx{i}+y{i}*d/dy{i}" for i in range(1, n))
    rot = " + ".join(f"-y{i}*d/dx{i}+x{i}*d/dy{i}" for i in range(1, n))
    return (f"e^-2*r*(r^2-1)*z*d/dr + (1+2*e-2*e^-2*z^2)*d/dth"
            f" + ((r^2-1)^2+(2*r^2-1)*(e^-2*z^2-e))*d/dz"
            f" + e^-2*(2*r^2-1)*z*({xs})"
            f" + e^-2*(2*r^4-2*r^2+1)*({rot})")


# -- checks --------------------------------------------------------------------

@dataclass
class Check:
    name: str
    anchor: str
    passed: bool
    residual: object = None
    certificate: str = "exact"
    details: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def residual_terms(self) -> int:
        r = self.residual
        if r is None:
            return 0
        if isinstance(r, (Poly, Form)):
            return len(r.terms)
        if isinstance(r, (list, tuple)):
            return sum(len(x.terms) if isinstance(x, (Poly, Form)) else int(bool(x)) for x in r)
        return int(bool(r))

    def to_json(self) -> dict:
        return {"name": self.name, "identity": self.anchor, "status": self.status,
                "residual_terms": self.residual_terms(), "certificate": self.certificate}


def _P(obj: HypersurfaceData, text: str) -> Poly:
    return parse(text, obj.coords)


def verify_tangency(obj: HypersurfaceData) -> Check:
    """dF(X) - 2e^-2(2r^2-1) z F == 0 with no reduction."""
    lhs = obj.dF(obj.X)
    residual = lhs - _P(obj, "2*e^-2*(2*r^2-1)*z") * obj.F
    return Check("tangency dF(X)", "dF(X) = 2e^-2(2r^2-1)z F", residual.is_zero(), residual)


def verify_beta_x(obj: HypersurfaceData) -> Check:
    bx = obj.beta(obj.X)
    residual = bx - _P(obj, "2*r^4-2*r^2+1") * obj.F
    reduced = obj.rule.reduce(bx)
    return Check("beta(X)", "beta(X) = (2r^4-2r^2+1) F",
                 residual.is_zero() and reduced.is_zero(), residual,
                 details={"reduced_beta_x_terms": len(reduced.terms)})


def verify_iota_dbeta(obj: HypersurfaceData) -> Check:
    """iota_X d beta identity, plus L_X beta = 2e^-2(2r^2-1)z beta modulo (F)."""
    dbeta = ext_d(obj.beta)
    k = _P(obj, "2*e^-2*(2*r^2-1)*z")
    residual = interior(obj.X, dbeta) - k * obj.beta + _P(obj, "2*r^4-2*r^2+1") * obj.dF
    # L_X beta - k beta = F d(2r^4-2r^2+1), so it vanishes coefficientwise mod (F)
    lie = reduce_form(obj.rule, lie_derivative(obj.X, obj.beta) - k * obj.beta)
    return Check("iota_X d beta", "iota_X dbeta = 2e^-2(2r^2-1)z beta - (2r^4-2r^2+1) dF",
                 residual.is_zero() and lie.is_zero(), [residual, lie],
                 details={"lie_derivative_mod_F": str(lie)})


def boundary_expression(coords: CoordSystem) -> Poly:
    return parse("(r-1)^2*(e^-2*(-r^2+r+1)-(r+1)^2)+e*(2*r^2-1)", coords)


def admissible_interval(eps) -> tuple[Fraction, Fraction, list]:
    """Rational outer bounds of {r : (r-1)^2 <= e^2 (1+e-r^2)}."""
    eps = as_scalar(eps)
    x = UniPoly.x()
    one = UniPoly([1])
    q = (x - one) * (x - one) - UniPoly([eps * eps * (1 + eps)]) + x * x * (eps * eps)
    roots = isolate_roots(q)
    if len(roots) != 2:
        raise ConstructionError(f"admissible interval degenerate at eps = {eps}")
    roots = [refine(q, rt, Fraction(1, 10**15)) for rt in roots]
    return roots[0].lo, roots[1].hi, roots


def verify_boundary(obj: HypersurfaceData, eps) -> Check:
    """(dr - dz)(X) on z = r - 1: exact identity, then Sturm positivity."""
    eps = as_scalar(eps)
    if not (0 < eps <= Fraction(1, 10)):
        raise ConstructionError("eps must satisfy 0 < eps <= 1/10")
    drdz = Form.d(obj.coords, "r") - Form.d(obj.coords, "z")
    on_boundary = drdz(obj.X).subs({"z": _P(obj, "r-1")})
    residual = on_boundary - boundary_expression(obj.coords)
    exact_ok = residual.is_zero()
    positive = False
    lo = hi = None
    try:
        lo, hi, _ = admissible_interval(eps)
        p = UniPoly.from_poly(on_boundary, "r", eps)
        positive = not p.is_zero() and sturm_positive(p, lo, hi)
    except ValueError:
        positive = False
    return Check("boundary transversality", "(dr-dz)(X)|dSigma = (r-1)^2{e^-2(-r^2+r+1)-(r+1)^2}+e(2r^2-1) > 0",
                 exact_ok and positive, residual, certificate="exact+sturm",
                 details={"eps": str(eps), "interval": [float(lo), float(hi)] if lo is not None else None,
                          "sturm_positive": positive})


# -- quotient by the rotations ----------------------------------------------

REDUCED_COORDS = CoordSystem(("z", "r", "rho"))


@dataclass(frozen=True)
class ReducedSystem:
    """Push-forward of X to the quarter-sphere in (z, r, rho), rho = |(x, y)|.

    ``components`` are ``(dz(X), dr(X), d rho(X))``; the last is polynomial
    because ``X(rho^2) = k rho^2`` with ``k`` free of the ball coordinates.
    """

    coords: CoordSystem
    components: tuple[Poly, Poly, Poly]
    rho_sq_rate: Poly
    theta_rate: Poly
    constraint: Poly

    @property
    def rule(self) -> NormalFormRule:
        return NormalFormRule.from_polynomial(self.constraint, "z")

    @property
    def field(self) -> VecField:
        return VecField(self.coords, self.components)

    def first_integral(self) -> tuple[Poly, Poly]:
        """(N, D) with the leaf parameter C = N / D."""
        return (parse("e^-2*z^2+r^2-1-e", self.coords), parse("r^2*(r^2-1)", self.coords))


class ReductionError(ValueError):
    pass


def reduce_system(obj: HypersurfaceData) -> ReducedSystem:
    ball = [name for pair in obj.ball_coords() for name in pair]
    dz_x, dr_x, dth_x = obj.X["z"], obj.X["r"], obj.X["th"]
    for label, comp in (("dz(X)", dz_x), ("dr(X)", dr_x), ("dth(X)", dth_x)):
        if not comp.free_of("th", *ball):
            raise ReductionError(f"{label} depends on th or the ball coordinates")
    sq = _ball_sum(obj.coords, obj.n, lambda x, y: _P(obj, x) ** 2 + _P(obj, y) ** 2)
    rate = 2 * _ball_sum(obj.coords, obj.n,
                         lambda x, y: _P(obj, x) * obj.X[x] + _P(obj, y) * obj.X[y])
    try:
        k = rate.divide_exact(sq)
    except ArithmeticError as err:
        raise ReductionError("X(rho^2) is not a multiple of rho^2") from err
    if not k.free_of("th", *ball):
        raise ReductionError("X(rho^2)/rho^2 depends on th or the ball coordinates")

    def down(p: Poly) -> Poly:
        return p.change_coords(REDUCED_COORDS)

    rho = Poly.var(REDUCED_COORDS, "rho")
    comps = (down(dz_x), down(dr_x), down(k) * rho / 2)
    constraint = parse("r^2+e^-2*(z^2+rho^2)-1-e", REDUCED_COORDS)
    return ReducedSystem(REDUCED_COORDS, comps, down(k) * rho**2, down(dth_x), constraint)


def verify_reduction(obj: HypersurfaceData) -> Check:
    try:
        sys = reduce_system(obj)
    except ReductionError as err:
        return Check("push-forward X'", "X' well defined on the quarter-sphere", False,
                     str(err), certificate="exact")
    expected = parse("2*e^-2*(2*r^2-1)*z*rho^2", REDUCED_COORDS)
    residual = sys.rho_sq_rate - expected
    return Check("push-forward X'", "X' well defined on the quarter-sphere; X(rho^2) = 2e^-2(2r^2-1)z rho^2",
                 residual.is_zero(), residual,
                 details={"dz": str(sys.components[0]), "dr": str(sys.components[1]),
                          "drho": str(sys.components[2])})


def verify_first_integral(sys: ReducedSystem, eps=Fraction(1, 10), fallback_steps: int = 10_000) -> Check:
    """C = N / D constant along X': symbolic certificate, numeric fallback."""
    N, D = sys.first_integral()
    Xp = sys.field
    raw = Xp(N) * D - N * Xp(D)
    residual = sys.rule.reduce(raw)
    anchor = "F' = {e^-2 z^2 = (C r^2 - 1)(r^2 - 1) + e}"
    if residual.is_zero():
        return Check("first integral", anchor, True, residual, certificate="symbolic",
                     details={"identically_zero_before_reduction": raw.is_zero()})
    from .dynamics import integrate, point_on_sphere

    start = point_on_sphere(eps, z=0, r=Fraction(95, 100))
    traj = integrate(sys, start, eps, steps=fallback_steps, h=1e-3)
    ok = traj.c_drift < 1e-8 and not traj.clipped
    return Check("first integral", anchor, ok, residual, certificate="trajectory",
                 details={"c_drift": traj.c_drift})


# -- special orbits --------------------------------------------------------------

def _hyperbolic_closed_form(eps, dps=None):
    dps = working_dps(dps)
    with mpmath.workdps(dps):
        e = bigfloat(as_scalar(eps), dps)
        s = mpmath.sqrt(e * (1 + e))
        r0 = mpmath.sqrt(1 + e - s)
        n0 = mpmath.sqrt(e**2 * s)
        c_sep = 1 + 2 * e + 2 * s
    return r0, n0, c_sep


@dataclass(frozen=True)
class SpecialOrbits:
    """Periodic orbits P+-, the set H of periodic orbits, and their radicals.

    Radicals are stored as exact defining relations plus BigFloat values:
    ``z^2 = e^3`` on P+-, ``(r0^2 - 1 - e)^2 = e(1+e)`` with ``r0^2 < 1+e``,
    ``n0^4 = e^5 (1+e)``.  H is {0} x S^1(r0) x S^{2n-3}(n0).
    """

    eps: Fraction
    z_p: mpmath.mpf
    r0: mpmath.mpf
    n0: mpmath.mpf
    c_sep: mpmath.mpf
    relations: tuple[str, ...] = (
        "z^2 = e^3 on P+-",
        "(r0^2 - 1 - e)^2 = e(1+e), r0^2 < 1 + e",
        "n0^4 = e^5 (1 + e)",
    )

    @classmethod
    def at(cls, eps, dps=None) -> "SpecialOrbits":
        eps = as_scalar(eps)
        r0, n0, c = _hyperbolic_closed_form(eps, dps)
        with mpmath.workdps(working_dps(dps)):
            e = bigfloat(eps, dps)
            zp = e * mpmath.sqrt(e)
        return cls(eps, zp, r0, n0, c)

    @property
    def hyperbolic_point(self):
        return (mpmath.mpf(0), self.r0, self.n0)

    def sphere_dimension(self, n: int) -> int:
        return 2 * n - 3


def _sphere_samples(n: int, radius, count: int = 8):
    """``count`` points on S^{2n-3}(radius) in R^{2n-2} (deterministic)."""
    dim = 2 * n - 2
    pts = []
    for k in range(count):
        v = [mpmath.cos(k + j * 0.7) + (j + 1) * mpmath.sin(2 * k + 1) for j in range(dim)]
        norm = mpmath.sqrt(sum(c * c for c in v))
        pts.append([radius * c / norm for c in v])
    return pts


def verify_special_orbits(obj: HypersurfaceData, eps, dps=None) -> Check:
    eps = as_scalar(eps)
    if not (0 < eps <= Fraction(1, 10)):
        raise ConstructionError("eps must satisfy 0 < eps <= 1/10")
    coords = obj.coords
    ball = [name for pair in obj.ball_coords() for name in pair]
    # (i) exact: r = 1, x = y = 0, z^2 = e^3
    at_p = {"r": Poly.const(coords, 1)}
    at_p.update({b: Poly.zero(coords) for b in ball})
    orbit_rule = NormalFormRule.from_polynomial(parse("z^2-e^3", coords), "z")
    red = lambda p: orbit_rule.reduce(p.subs(at_p))  # noqa: E731
    dr, dz, fval, dth = red(obj.X["r"]), red(obj.X["z"]), red(obj.F), red(obj.X["th"])
    exact_ok = dr.is_zero() and dz.is_zero() and fval.is_zero() and dth == Poly.const(coords, 1)

    # (ii) numeric on H at eps
    dps = working_dps(dps)
    orbits = SpecialOrbits.at(eps, dps)
    worst = mpmath.mpf(0)
    min_angular = mpmath.inf
    with mpmath.workdps(dps):
        e = bigfloat(eps, dps)
        for k, ballpt in enumerate(_sphere_samples(obj.n, orbits.n0)):
            point = [mpmath.mpf(0), orbits.r0, mpmath.mpf(k) / 3] + ballpt
            vals = obj.X.evaluate(point, e)
            comp = dict(zip(coords.names, vals))
            rho_rate = 2 * sum(point[3 + j] * vals[3 + j] for j in range(len(ballpt)))
            worst = max(worst, abs(comp["z"]), abs(comp["r"]), abs(rho_rate), abs(obj.F.evaluate(point, e)))
            angular = mpmath.sqrt(comp["th"] ** 2 + sum(v * v for v in vals[3:]))
            min_angular = min(min_angular, angular)
    numeric_ok = worst < mpmath.mpf("1e-10") and min_angular > mpmath.mpf("1e-3")

    # P+ inside Sigma (r - z <= 1), P- outside; S+- inside
    zp = orbits.z_p
    with mpmath.workdps(dps):
        e = bigfloat(eps, dps)
        s_pm = e * mpmath.sqrt(1 + e)
        membership = {
            "P+ in Sigma": bool(1 - zp <= 1),
            "P- not in Sigma": bool(1 + zp > 1),
            "S+ in Sigma": bool(0 + s_pm <= 1),
            "S- in Sigma": bool(0 - s_pm <= 1),
        }
    ok = exact_ok and numeric_ok and all(membership.values())
    return Check("periodic orbits P+-, H", "P+- = {+-e sqrt(e)} x S^1(1) x {0}; H = p^-1(0, r0, n0)",
                 ok, [dr, dz, fval, dth - 1], certificate="exact+numeric",
                 details={"max_residual_on_H": float(worst), "min_angular_speed": float(min_angular),
                          "r0": mpmath.nstr(orbits.r0, 15), "n0": mpmath.nstr(orbits.n0, 15),
                          **membership})


def conformal_identity_residual(coords: CoordSystem, n: int, f: Poly) -> Form:
    """f^2 sum(x dy - y dx) - sum(f x d(f y) - f y d(f x)); zero for every f."""
    lhs = None
    rhs = None
    for i in range(1, n):
        x, y = Poly.var(coords, f"x{i}"), Poly.var(coords, f"y{i}")
        dx, dy = Form.d(coords, f"x{i}"), Form.d(coords, f"y{i}")
        term_l = f * f * (x * dy - y * dx)
        term_r = (f * x) * ext_d(Form.function(f * y)) - (f * y) * ext_d(Form.function(f * x))
        lhs = term_l if lhs is None else lhs + term_l
        rhs = term_r if rhs is None else rhs + term_r
    return lhs - rhs
