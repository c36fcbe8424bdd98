"""Exact univariate polynomials, Sturm sequences and real-root isolation."""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .poly import Poly, as_scalar

DEFAULT_DPS = 50
MIN_DPS = 30


def working_dps(dps: int | None = None) -> int:
    """Working precision in decimal digits (CHARFOL_PRECISION overrides the default)."""
    if dps is None:
        dps = int(os.environ.get("CHARFOL_PRECISION", DEFAULT_DPS))
    if dps < MIN_DPS:
        raise ValueError(f"precision must be at least {MIN_DPS} digits, got {dps}")
    return dps


def bigfloat(x, dps: int | None = None) -> mpmath.mpf:
    with mpmath.workdps(working_dps(dps)):
        if isinstance(x, Fraction):
            return mpmath.mpf(x.numerator) / x.denominator
        return mpmath.mpf(x)


@dataclass(frozen=True)
class UniPoly:
    """Dense univariate polynomial, coefficients low to high."""

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Sequence):
        cs = [as_scalar(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def from_poly(cls, p: Poly, var: str, eps=None) -> "UniPoly":
        return cls(p.to_univariate(var, eps))

    @classmethod
    def x(cls) -> "UniPoly":
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1]

    def __call__(self, x):
        acc = x * 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_mp(self, x: mpmath.mpf) -> mpmath.mpf:
        acc = mpmath.mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * x + mpmath.mpf(c.numerator) / c.denominator
        return acc

    def __add__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return UniPoly([x + y for x, y in zip(a, b)])

    def __neg__(self):
        return UniPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, UniPoly):
            return UniPoly([c * as_scalar(other) for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return UniPoly([])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def derivative(self) -> "UniPoly":
        return UniPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(len(rem) - len(other.coeffs) + 1, 0)
        while len(rem) >= len(other.coeffs) and any(rem):
            shift = len(rem) - len(other.coeffs)
            f = rem[-1] / other.lead
            q[shift] = f
            for i, c in enumerate(other.coeffs):
                rem[shift + i] -= f * c
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        return UniPoly(q), UniPoly(rem)

    def monic(self) -> "UniPoly":
        return self * (1 / self.lead)

    def __eq__(self, other):
        return isinstance(other, UniPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __str__(self):
        terms = []
        for i, c in reversed(list(enumerate(self.coeffs))):
            if c:
                terms.append(f"{c}*x^{i}" if i else str(c))
        return " + ".join(terms) or "0"


def gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic() if not a.is_zero() else a


def squarefree_part(p: UniPoly) -> UniPoly:
    g = gcd(p, p.derivative())
    return p.divmod(g)[0].monic()


def squarefree_decomposition(p: UniPoly) -> list[tuple[UniPoly, int]]:
    """Yun's algorithm: ``p = lead * prod a_i^i`` with squarefree, coprime ``a_i``."""
    if p.is_zero():
        raise ValueError("zero polynomial")
    out = []
    f = p.monic()
    a = gcd(f, f.derivative())
    b = f.divmod(a)[0]
    c = f.derivative().divmod(a)[0]
    d = c - b.derivative()
    i = 1
    while b.degree > 0:
        a = gcd(b, d)
        if a.degree > 0:
            out.append((a, i))
        b = b.divmod(a)[0]
        c = d.divmod(a)[0]
        d = c - b.derivative()
        i += 1
    return out


def sturm_chain(p: UniPoly) -> list[UniPoly]:
    chain = [p, p.derivative()]
    while not chain[-1].is_zero():
        rem = chain[-2].divmod(chain[-1])[1]
        if rem.is_zero():
            break
        chain.append(-rem)
    return [q for q in chain if not q.is_zero()]


def sign_variations(chain: Sequence[UniPoly], x: Fraction) -> int:
    signs = [s for s in ((q(x) > 0) - (q(x) < 0) for q in chain) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p: UniPoly, lo, hi, chain=None) -> int:
    """Distinct real roots in the half-open interval (lo, hi]."""
    lo, hi = as_scalar(lo), as_scalar(hi)
    chain = chain or sturm_chain(squarefree_part(p))
    return sign_variations(chain, lo) - sign_variations(chain, hi)


def sturm_positive(p: UniPoly, lo, hi) -> bool:
    """True iff ``p`` has no real root on ``[lo, hi]`` and is positive there."""
    if p.is_zero():
        raise ValueError("sturm_positive on the zero polynomial")
    lo, hi = as_scalar(lo), as_scalar(hi)
    if not lo < hi:
        raise ValueError("need lo < hi")
    if p(lo) == 0 or p(hi) == 0:
        return False
    if count_roots(p, lo, hi) != 0:
        return False
    return p((lo + hi) / 2) > 0


def cauchy_bound(p: UniPoly) -> Fraction:
    return 1 + max(abs(c / p.lead) for c in p.coeffs[:-1]) if p.degree > 0 else Fraction(1)


@dataclass(frozen=True)
class RootInterval:
    """Open interval (lo, hi) holding exactly one root, or the exact root lo == hi."""

    lo: Fraction
    hi: Fraction
    multiplicity: int = 1

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __float__(self):
        return float(self.mid)


def _isolate_squarefree(s: UniPoly) -> list[tuple[Fraction, Fraction]]:
    if s.degree <= 0:
        return []
    chain = sturm_chain(s)
    B = cauchy_bound(s)
    out: list[tuple[Fraction, Fraction]] = []

    def rec(lo, hi, count):
        # count = roots in (lo, hi]; hi is never a root here
        if count == 0:
            return
        if count == 1:
            out.append((lo, hi))
            return
        mid = (lo + hi) / 2
        if s(mid) == 0:
            left = sign_variations(chain, lo) - sign_variations(chain, mid) - 1
            out.append((mid, mid))
            _split_off(lo, mid, left)
            rec(mid, hi, count - left - 1)
            return
        left = sign_variations(chain, lo) - sign_variations(chain, mid)
        rec(lo, mid, left)
        rec(mid, hi, count - left)

    def _split_off(lo, root, count):
        # roots of s in (lo, root): pick a cut below root that is not a root
        if count == 0:
            return
        cut = root
        step = (root - lo) / 2
        while True:
            cut = root - step
            if s(cut) != 0 and sign_variations(chain, cut) - sign_variations(chain, root) == 1:
                break
            step /= 2
        rec(lo, cut, count)

    rec(-B, B, sign_variations(chain, -B) - sign_variations(chain, B))
    return sorted(out)


def isolate_roots(p: UniPoly) -> list[RootInterval]:
    """Disjoint isolating intervals for every real root, with multiplicity."""
    if p.is_zero():
        raise ValueError("isolate_roots on the zero polynomial")
    s = squarefree_part(p)
    factors = squarefree_decomposition(p)
    result = []
    for lo, hi in _isolate_squarefree(s):
        mult = None
        while mult is None:
            hits = [m for a, m in factors if _has_root(a, lo, hi)]
            if len(hits) == 1:
                mult = hits[0]
            else:
                lo, hi = refine_interval(s, lo, hi, (hi - lo) / 4)
        result.append(RootInterval(lo, hi, mult))
    return result


def _has_root(a: UniPoly, lo, hi) -> bool:
    if lo == hi:
        return a(lo) == 0
    # roots in the open interval (lo, hi)
    return count_roots(a, lo, hi) - (a(hi) == 0) > 0


def refine_interval(s: UniPoly, lo: Fraction, hi: Fraction, width) -> tuple[Fraction, Fraction]:
    """Bisect an isolating interval of a squarefree ``s`` down to ``width``."""
    width = as_scalar(width)
    if lo == hi:
        return lo, hi
    slo = s(lo)
    while hi - lo > width:
        mid = (lo + hi) / 2
        sm = s(mid)
        if sm == 0:
            return mid, mid
        if (sm > 0) == (slo > 0):
            lo, slo = mid, sm
        else:
            hi = mid
    return lo, hi


def refine(p: UniPoly, root: RootInterval, width) -> RootInterval:
    lo, hi = refine_interval(squarefree_part(p), root.lo, root.hi, width)
    return RootInterval(lo, hi, root.multiplicity)


def root_value(p: UniPoly, root: RootInterval, dps: int | None = None) -> mpmath.mpf:
    """Root as a BigFloat accurate to the working precision."""
    dps = working_dps(dps)
    r = refine(p, root, Fraction(1, 10 ** (dps + 5)))
    return bigfloat(r.mid, dps)
