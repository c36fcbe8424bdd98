"""Characteristic foliations of level-set hypersurfaces in contact manifolds.

The characteristic field of ``Sigma = {F = 0}`` in ``(M^{2n+1}, beta)`` is the
field ``X*`` fixed by the volume-form equation

    iota_{X*} (beta ^ (d beta)^n) = n beta ^ dF ^ (d beta)^(n-1).

Contracting with ``beta`` and ``dF`` shows ``beta(X*) = dF(X*) = 0``
identically, and ``iota_{X*} d beta`` lies in ``span(beta, dF)`` along
``Sigma``.
"""
from __future__ import annotations

import json
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .forms import Form, VecField, ext_d, interior, top_coefficient, wedge, wedge_power
from .normal_form import NormalFormRule, RuleError, reduce_form
from .poly import NotDivisible, Poly

KINDS = ("source", "sink", "saddle", "rotational")


class DegenerateFormError(ValueError):
    """beta ^ (d beta)^n vanishes identically."""


class NonContactError(ArithmeticError):
    """The linear system for the characteristic field is singular."""


class NotATangencyError(ValueError):
    pass


class UnclassifiedRecordError(ValueError):
    pass


@dataclass(frozen=True)
class ContactData:
    beta: Form
    F: Poly
    rule: NormalFormRule

    @classmethod
    def create(cls, beta: Form, F: Poly, var: str | None = None) -> "ContactData":
        if beta.degree != 1:
            raise ValueError("beta must be a 1-form")
        if beta.coords != F.coords:
            raise ValueError("beta and F live in different coordinate systems")
        if beta.coords.dim % 2 == 0:
            raise ValueError("contact manifolds are odd-dimensional")
        try:
            rule = NormalFormRule.from_polynomial(F, var)
        except RuleError as err:
            raise ValueError(f"F does not give a normal-form rule: {err}") from err
        return cls(beta, F, rule)

    @property
    def n(self) -> int:
        return self.beta.coords.n

    @property
    def coords(self):
        return self.beta.coords

    @property
    def dbeta(self) -> Form:
        return ext_d(self.beta)

    @property
    def dF(self) -> Form:
        return ext_d(Form.function(self.F))

    def volume(self) -> Form:
        return wedge(self.beta, wedge_power(self.dbeta, self.n))


def contact_check(data: ContactData) -> Poly:
    """Top coefficient of ``beta ^ (d beta)^n``; raises if identically zero."""
    w = top_coefficient(data.volume())
    if w.is_zero():
        raise DegenerateFormError("beta ^ (d beta)^n is identically zero")
    return w


def characteristic_rhs(data: ContactData) -> Form:
    n = data.n
    return n * wedge(data.beta, wedge(data.dF, wedge_power(data.dbeta, n - 1)))


def _to_sympy(p: Poly, symbols, eps_symbol):
    import sympy

    expr = sympy.Integer(0)
    for key, c in p.raw_terms.items():
        term = sympy.Rational(c.numerator, c.denominator) * eps_symbol ** key[0]
        for s, e in zip(symbols, key[1:]):
            if e:
                term *= s**e
        expr += term
    return expr


def _from_sympy(expr, coords, symbols, eps_symbol) -> Poly:
    import sympy

    poly = sympy.Poly(sympy.expand(expr), eps_symbol, *symbols)
    terms = {}
    for monom, c in poly.terms():
        c = sympy.Rational(c)
        terms[tuple(monom)] = Fraction(int(c.p), int(c.q))
    return Poly(coords, terms)


def _volume_factors(w: Poly) -> list[tuple[Poly, int]]:
    """Irreducible factors of the volume coefficient (with multiplicity)."""
    import sympy

    syms = sympy.symbols(" ".join(f"v{i}" for i in range(w.coords.dim)) + " ", seq=True)
    e = sympy.Symbol("e")
    lo = w.eps_range()[0]
    shifted = w * Poly.eps(w.coords, -lo)
    _, factors = sympy.factor_list(_to_sympy(shifted, syms, e))
    return [(_from_sympy(f, w.coords, syms, e), int(m)) for f, m in factors]


def characteristic_field_parts(data: ContactData) -> tuple[VecField, Poly]:
    """Polynomial field ``Xh`` and denominator ``D`` with ``X* = Xh / D``.

    ``X*`` solves ``iota_X Omega = n beta ^ dF ^ (d beta)^(n-1)``.  With
    ``Omega = w dx_0 ^ ... ^ dx_N`` the solution is
    ``X*^i = (-1)^i eta_i / w`` where ``eta_i`` is the coefficient of the
    2n-form on the complementary index tuple.  Every factor of ``w`` that
    divides all ``eta_i`` is cancelled exactly; what is left over is ``D``.
    """
    w = contact_check(data)
    eta = characteristic_rhs(data)
    N = data.coords.dim
    comps = []
    for i in range(N):
        c = eta.coefficient(tuple(j for j in range(N) if j != i))
        comps.append(-c if i % 2 else c)
    try:
        return VecField(data.coords, [c.divide_exact(w) for c in comps]), Poly.const(data.coords, 1)
    except NotDivisible:
        pass
    denom = w
    for f, m in _volume_factors(w):
        if not f.variables():
            continue
        for _ in range(m):
            try:
                trial = [c.divide_exact(f) for c in comps]
            except NotDivisible:
                break
            comps = trial
            denom = denom.divide_exact(f)
    # leftover constant (and epsilon) content goes into the field
    lead_key = max(denom.raw_terms, key=lambda k: (sum(k[1:]), k[1:], k[0]))
    unit = Poly(data.coords, {lead_key[:1] + (0,) * N: denom.raw_terms[lead_key]})
    if not denom.variables():
        unit = denom
    denom = denom.divide_exact(unit)
    comps = [c.divide_exact(unit) for c in comps]
    return VecField(data.coords, comps), denom


def characteristic_field(data: ContactData) -> VecField:
    """Polynomial representative of the characteristic field.

    Equal to ``X*`` when the volume coefficient divides the right-hand side;
    otherwise ``D * X*`` with the leftover denominator ``D`` from
    :func:`characteristic_field_parts` (positively proportional to ``X*``
    wherever ``D > 0``).
    """
    return characteristic_field_parts(data)[0]


def membership_residual(data: ContactData, X: VecField) -> Form:
    """``reduce(iota_X d beta ^ beta ^ dF)``: zero iff ``iota_X dbeta`` is in span(beta, dF) on Sigma."""
    w = wedge(interior(X, data.dbeta), wedge(data.beta, data.dF))
    return reduce_form(data.rule, w)


def minors_residuals(data: ContactData, X: VecField, Y: VecField) -> list[Poly]:
    """All 2x2 minors of the component rows of X and Y, reduced mod (F)."""
    out = []
    N = data.coords.dim
    for i in range(N):
        for j in range(i + 1, N):
            m = X.components[i] * Y.components[j] - X.components[j] * Y.components[i]
            out.append(data.rule.reduce(m))
    return out


def leray_orientation(data: ContactData) -> Form:
    """2n-form ``iota_{grad F} Omega``; restricted to T Sigma it is a positive
    multiple of the Leray form ``Omega / dF``."""
    grad = VecField(data.coords, [data.F.diff(i) for i in range(data.coords.dim)])
    return interior(grad, data.volume())


def surface_orientation(data: ContactData) -> Form:
    """Orientation of Sigma for which the characteristic field is positive.

    Positive ``X`` means ``iota_X dvol = beta ^ (d beta)^(n-1)`` on
    ``T Sigma``.  The Leray form ``L`` (``dF ^ L = Omega``) gives
    ``iota_{X*} L = n beta ^ (d beta)^(n-1)``, so ``L`` itself is the
    orientation.
    """
    return leray_orientation(data)


# -- tangency bookkeeping ---------------------------------------------------

@dataclass
class TangencyRecord:
    point: tuple
    sign: str | None = None
    index: int | None = None
    kind: str | None = None

    @property
    def classified(self) -> bool:
        return self.sign in ("+", "-") and self.index is not None


def _num(x) -> float:
    return float(x)


def _tangent_basis(grad: np.ndarray) -> np.ndarray:
    """Orthonormal basis (rows) of the hyperplane orthogonal to ``grad``."""
    _, _, vt = np.linalg.svd(grad.reshape(1, -1))
    return vt[1:]


def tangency_sign(data: ContactData, p, orientation_form: Form, eps,
                  tol: float = 1e-9, probe: float = 1e-6) -> str:
    """'+' iff (d beta)^n orients ker beta = T Sigma like ``orientation_form``.

    Where both top forms degenerate at ``p`` (coordinate singularities such
    as r = 0 in polar coordinates) the ratio is taken at nearby points.
    """
    point = p.point if isinstance(p, TangencyRecord) else tuple(p)
    eps = float(eps)
    N = data.coords.dim
    pt = np.array([_num(v) for v in point], dtype=float)
    b = np.array([_num(data.beta.coefficient((i,)).evaluate(pt, eps)) for i in range(N)])
    g = np.array([_num(data.F.diff(i).evaluate(pt, eps)) for i in range(N)])
    nb, ng = np.linalg.norm(b), np.linalg.norm(g)
    if nb == 0 or ng == 0:
        raise NotATangencyError("beta or dF vanishes at the point")
    cos = abs(b @ g) / (nb * ng)
    if 1 - cos > tol:
        raise NotATangencyError(f"dF and beta are not proportional (1 - |cos| = {1 - cos:.3g})")

    dbn = wedge_power(data.dbeta, data.n)

    def ratio_at(q):
        gq = np.array([_num(data.F.diff(i).evaluate(q, eps)) for i in range(N)])
        basis = _tangent_basis(gq)
        a = float(dbn.evaluate_on(basis, list(q), eps))
        o = float(orientation_form.evaluate_on(basis, list(q), eps))
        return a, o

    a, o = ratio_at(pt)
    scale = 1e-12
    if abs(a) < scale or abs(o) < scale:
        best = None
        for i in range(N):
            for s in (1, -1):
                q = pt.copy()
                q[i] += s * probe
                aq, oq = ratio_at(q)
                mag = min(abs(aq), abs(oq))
                if best is None or mag > best[0]:
                    best = (mag, aq, oq)
        if best is None or best[0] < scale * probe:
            raise NotATangencyError("orientation forms degenerate near the point")
        _, a, o = best
    return "+" if a * o > 0 else "-"


@dataclass
class TBReport:
    sum_minus: int
    sum_plus: int
    euler_rel: int
    chi: int
    verdict: str
    neg_euler: int = field(init=False)
    neg_chi: int = field(init=False)

    def __post_init__(self):
        self.neg_euler = -self.euler_rel
        self.neg_chi = -self.chi

    def to_json(self) -> dict:
        return {"sum_minus": self.sum_minus, "sum_plus": self.sum_plus,
                "euler_rel": self.euler_rel, "chi": self.chi, "verdict": self.verdict}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def summary(self) -> str:
        head = (f"VIOLATED: sum_{{S-}} Ind = {self.sum_minus} > 0" if self.verdict == "violated"
                else f"holds: sum_{{S-}} Ind = {self.sum_minus} <= 0")
        return (f"{head}\n"
                f"<e,[Sigma,dSigma]> = {self.sum_plus}-{self.sum_minus} = {self.euler_rel}\n"
                f"-<e> = {self.neg_euler} vs -chi(Sigma) = {self.neg_chi}")


def tb_evaluate(records: Iterable[TangencyRecord], chi: int) -> TBReport:
    """Thurston-Bennequin bookkeeping over classified tangency records."""
    plus = minus = 0
    for rec in records:
        if not rec.classified:
            raise UnclassifiedRecordError(f"record at {rec.point} is not classified")
        if rec.sign == "+":
            plus += rec.index
        else:
            minus += rec.index
    verdict = "violated" if minus > 0 else "holds"
    return TBReport(minus, plus, plus - minus, int(chi), verdict)
