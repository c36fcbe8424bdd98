"""Sparse multivariate polynomials with Laurent-in-epsilon coefficients.

A :class:`Poly` lives in a fixed :class:`CoordSystem`.  Its coefficients are
finite Laurent series in a formal parameter ``e`` (epsilon) over the
rationals.  Internally every term is keyed by ``(k, e_0, ..., e_{N-1})`` where
``k`` is the (possibly negative) power of epsilon and ``e_i`` are the
nonnegative coordinate exponents; the value is a nonzero
:class:`fractions.Fraction`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

Scalar = Fraction


def as_scalar(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot use {value!r} as an exact scalar")


@dataclass(frozen=True)
class CoordSystem:
    """Ordered coordinate names of an odd-dimensional ambient space."""

    names: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate coordinate names in {self.names}")

    @classmethod
    def standard(cls, n: int) -> "CoordSystem":
        """(z, r, th, x1, y1, ..., x_{n-1}, y_{n-1}) on M^3 x R^{2n-2}."""
        if n < 1:
            raise ValueError("n must be >= 1")
        names = ["z", "r", "th"]
        for i in range(1, n):
            names += [f"x{i}", f"y{i}"]
        return cls(tuple(names))

    @property
    def dim(self) -> int:
        return len(self.names)

    @property
    def n(self) -> int:
        """Half of (dim - 1); only meaningful for odd dimensions."""
        return (self.dim - 1) // 2

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown coordinate {name!r} in {self.names}") from None

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)


class DimensionError(ValueError):
    """Operands live in different coordinate systems."""


class NotDivisible(ArithmeticError):
    pass


def _fmt_scalar(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_eps(k: int) -> str:
    if k == 1:
        return "e"
    return f"e^{k}"


class EpsCoeff:
    """Finite Laurent series ``sum_k c_k e^k`` with rational ``c_k``."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, object] | None = None):
        clean = {}
        for k, c in (terms or {}).items():
            c = as_scalar(c)
            if c:
                clean[int(k)] = c
        self._terms = clean

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def _coerce(self, other) -> "EpsCoeff":
        if isinstance(other, EpsCoeff):
            return other
        return EpsCoeff({0: other})

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return EpsCoeff(out)

    __radd__ = __add__

    def __neg__(self):
        return EpsCoeff({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict[int, Fraction] = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                out[k1 + k2] = out.get(k1 + k2, 0) + c1 * c2
        return EpsCoeff(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            return self._terms == self._coerce(other)._terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __bool__(self):
        return bool(self._terms)

    def evaluate(self, eps):
        if not eps and any(k < 0 for k in self._terms):
            raise ZeroDivisionError("negative power of epsilon at eps = 0")
        zero = eps * 0
        return sum(((zero + c.numerator) / c.denominator * eps**k
                    for k, c in self._terms.items()), zero)

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for k in sorted(self._terms, reverse=True):
            c = self._terms[k]
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if k == 0:
                body = _fmt_scalar(mag)
            elif mag == 1:
                body = _fmt_eps(k)
            else:
                body = f"{_fmt_scalar(mag)}*{_fmt_eps(k)}"
            parts.append((sign, body))
        return _join_signed(parts)

    def __repr__(self):
        return f"EpsCoeff({str(self)!r})"


def _join_signed(parts: list[tuple[str, str]]) -> str:
    out = ""
    for i, (sign, body) in enumerate(parts):
        if i == 0:
            out = body if sign == "+" else f"-{body}"
        else:
            out += f" {sign} {body}"
    return out


Key = tuple  # (eps power, e_0, ..., e_{N-1})


class Poly:
    """Immutable sparse polynomial over Q[e, 1/e]."""

    __slots__ = ("coords", "_terms", "_hash")

    def __init__(self, coords: CoordSystem, terms: Mapping[Key, object] | None = None,
                 _trusted: bool = False):
        self.coords = coords
        if _trusted:
            self._terms = terms
        else:
            clean: dict[Key, Fraction] = {}
            N = coords.dim
            for key, c in (terms or {}).items():
                key = tuple(int(v) for v in key)
                if len(key) != N + 1:
                    raise DimensionError(f"exponent key {key} has wrong length for {coords.names}")
                if any(v < 0 for v in key[1:]):
                    raise ValueError(f"negative coordinate exponent in {key}")
                c = as_scalar(c)
                if c:
                    clean[key] = clean.get(key, 0) + c
            self._terms = {k: v for k, v in clean.items() if v}
        self._hash = None

    # -- constructors --------------------------------------------------
    @classmethod
    def zero(cls, coords: CoordSystem) -> "Poly":
        return cls(coords, {}, _trusted=True)

    @classmethod
    def const(cls, coords: CoordSystem, c=1, eps_power: int = 0) -> "Poly":
        c = as_scalar(c)
        if not c:
            return cls.zero(coords)
        return cls(coords, {(eps_power,) + (0,) * coords.dim: c}, _trusted=True)

    @classmethod
    def var(cls, coords: CoordSystem, name: str, power: int = 1) -> "Poly":
        exps = [0] * coords.dim
        exps[coords.index(name)] = power
        return cls(coords, {(0, *exps): Fraction(1)}, _trusted=True)

    @classmethod
    def eps(cls, coords: CoordSystem, power: int = 1) -> "Poly":
        return cls.const(coords, 1, power)

    @classmethod
    def from_eps_coeff(cls, coords: CoordSystem, coeff: EpsCoeff, monomial=None) -> "Poly":
        mono = tuple(monomial) if monomial is not None else (0,) * coords.dim
        return cls(coords, {(k, *mono): c for k, c in coeff.terms.items()})

    # -- views ---------------------------------------------------------
    @property
    def raw_terms(self) -> dict[Key, Fraction]:
        return dict(self._terms)

    @property
    def terms(self) -> dict[tuple[int, ...], EpsCoeff]:
        """Monomial exponent vector -> EpsCoeff."""
        grouped: dict[tuple[int, ...], dict[int, Fraction]] = {}
        for key, c in self._terms.items():
            grouped.setdefault(key[1:], {})[key[0]] = c
        return {m: EpsCoeff(t) for m, t in grouped.items()}

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def variables(self) -> set[str]:
        used = set()
        for key in self._terms:
            for i, e in enumerate(key[1:]):
                if e:
                    used.add(self.coords.names[i])
        return used

    def free_of(self, *names: str) -> bool:
        return not (self.variables() & set(names))

    def degree_in(self, name: str) -> int:
        i = self.coords.index(name) + 1
        return max((key[i] for key in self._terms), default=-1)

    def eps_range(self) -> tuple[int, int]:
        ks = [key[0] for key in self._terms]
        if not ks:
            return (0, 0)
        return min(ks), max(ks)

    # -- arithmetic ----------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.coords != self.coords:
                raise DimensionError(f"{self.coords.names} vs {other.coords.names}")
            return other
        if isinstance(other, EpsCoeff):
            return Poly.from_eps_coeff(self.coords, other)
        if isinstance(other, (int, Fraction, Rational)):
            return Poly.const(self.coords, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return Poly(self.coords, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.coords, {k: -c for k, c in self._terms.items()}, _trusted=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Key, Fraction] = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + c1 * c2
        return Poly(self.coords, {k: v for k, v in out.items() if v}, _trusted=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        # only exact scalars; polynomial division goes through divide_exact
        if isinstance(other, (int, Fraction, Rational)):
            other = as_scalar(other)
            return Poly(self.coords, {k: c / other for k, c in self._terms.items()}, _trusted=True)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = Poly.const(self.coords, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.coords, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coords == other.coords and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.coords, frozenset(self._terms.items())))
        return self._hash

    # -- calculus and substitution ------------------------------------
    def diff(self, name_or_index) -> "Poly":
        i = name_or_index if isinstance(name_or_index, int) else self.coords.index(name_or_index)
        out = {}
        for key, c in self._terms.items():
            e = key[i + 1]
            if e:
                k = list(key)
                k[i + 1] = e - 1
                out[tuple(k)] = c * e
        return Poly(self.coords, out, _trusted=True)

    def subs(self, mapping: Mapping[str, "Poly | int | Fraction"]) -> "Poly":
        """Simultaneous substitution of coordinates by polynomials."""
        idx = {self.coords.index(name): self._coerce(val) for name, val in mapping.items()}
        powers: dict[tuple[int, int], Poly] = {}

        def power(i, e):
            if (i, e) not in powers:
                powers[(i, e)] = idx[i] ** e
            return powers[(i, e)]

        result = Poly.zero(self.coords)
        for key, c in self._terms.items():
            keep = list(key)
            factor = None
            for i in idx:
                e = key[i + 1]
                if e:
                    keep[i + 1] = 0
                    p = power(i, e)
                    factor = p if factor is None else factor * p
            term = Poly(self.coords, {tuple(keep): c}, _trusted=True)
            result = result + (term if factor is None else term * factor)
        return result

    def subs_eps(self, eps) -> "Poly":
        """Specialise epsilon to an exact nonzero rational."""
        eps = as_scalar(eps)
        if not eps:
            raise ZeroDivisionError("eps must be nonzero")
        out: dict[Key, Fraction] = {}
        for key, c in self._terms.items():
            k = (0,) + key[1:]
            out[k] = out.get(k, 0) + c * eps ** key[0]
        return Poly(self.coords, {k: v for k, v in out.items() if v}, _trusted=True)

    def evaluate(self, point: Sequence, eps):
        """Evaluate at a point; exact when the inputs are Fractions/ints.

        Works with any numeric type closed under +,*,/ and integer powers
        (Fraction, float, mpmath.mpf).
        """
        if len(point) != self.coords.dim:
            raise DimensionError(f"point has {len(point)} coordinates, expected {self.coords.dim}")
        if isinstance(eps, int):
            eps = Fraction(eps)
        if not eps and any(key[0] < 0 for key in self._terms):
            raise ZeroDivisionError("eps = 0 with negative powers of epsilon present")
        zero = eps * 0
        total = zero
        for key, c in self._terms.items():
            v = (zero + c.numerator) / c.denominator
            if key[0]:
                v = v * eps ** key[0]
            for x, e in zip(point, key[1:]):
                if e:
                    v = v * x**e
            total = total + v
        return total

    def to_univariate(self, name: str, eps=None) -> list[Fraction]:
        """Dense coefficients (low to high) in one variable.

        All other coordinates must be absent; epsilon is specialised to
        ``eps`` when present.
        """
        p = self if eps is None else self.subs_eps(eps)
        i = self.coords.index(name)
        coeffs: dict[int, Fraction] = {}
        for key, c in p._terms.items():
            if key[0] != 0 or any(e for j, e in enumerate(key[1:]) if j != i):
                raise ValueError(f"polynomial is not univariate in {name}: {p}")
            coeffs[key[i + 1]] = coeffs.get(key[i + 1], 0) + c
        if not coeffs:
            return []
        return [coeffs.get(d, Fraction(0)) for d in range(max(coeffs) + 1)]

    def change_coords(self, coords: CoordSystem, rename: Mapping[str, str] | None = None) -> "Poly":
        """Re-embed into another coordinate system (by name)."""
        rename = dict(rename or {})
        target = []
        for i, name in enumerate(self.coords.names):
            target.append(coords.index(rename.get(name, name)) if self._uses(i) else None)
        out = {}
        for key, c in self._terms.items():
            exps = [0] * coords.dim
            for i, e in enumerate(key[1:]):
                if e:
                    exps[target[i]] += e
            out[(key[0], *exps)] = c
        return Poly(coords, out)

    def _uses(self, i: int) -> bool:
        return any(key[i + 1] for key in self._terms)

    # -- exact division ------------------------------------------------
    def divide_exact(self, other: "Poly") -> "Poly":
        """Quotient ``self / other`` in Q[e, 1/e][x]; raises NotDivisible."""
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return Poly.zero(self.coords)
        # shift epsilon powers to nonnegative and divide in Q[e][x] using a
        # graded order with e as an ordinary variable
        a_lo = self.eps_range()[0]
        b_lo = other.eps_range()[0]
        num = {(k[0] - a_lo,) + k[1:]: c for k, c in self._terms.items()}
        den = {(k[0] - b_lo,) + k[1:]: c for k, c in other._terms.items()}

        def order(key):
            return (sum(key), key[1:], key[0])

        lead = max(den, key=order)
        lc = den[lead]
        quot: dict[Key, Fraction] = {}
        rem = dict(num)
        while rem:
            top = max(rem, key=order)
            if any(t < l for t, l in zip(top, lead)):
                raise NotDivisible(f"{self} is not divisible by {other}")
            q_key = tuple(t - l for t, l in zip(top, lead))
            q_c = rem[top] / lc
            quot[q_key] = quot.get(q_key, 0) + q_c
            for k, c in den.items():
                kk = tuple(a + b for a, b in zip(k, q_key))
                v = rem.get(kk, 0) - q_c * c
                if v:
                    rem[kk] = v
                else:
                    rem.pop(kk, None)
        shift = a_lo - b_lo
        return Poly(self.coords, {(k[0] + shift,) + k[1:]: c for k, c in quot.items()})

    # -- printing ------------------------------------------------------
    def _mono_str(self, mono: tuple[int, ...]) -> str:
        parts = []
        for name, e in zip(self.coords.names, mono):
            if e == 1:
                parts.append(name)
            elif e:
                parts.append(f"{name}^{e}")
        return "*".join(parts)

    def sorted_monomials(self) -> list[tuple[int, ...]]:
        # graded lex, earlier coordinates heavier
        return sorted(self.terms, key=lambda m: (sum(m), m), reverse=True)

    def __str__(self):
        if not self._terms:
            return "0"
        terms = self.terms
        parts = []
        for mono in self.sorted_monomials():
            coeff = terms[mono]
            m = self._mono_str(mono)
            ct = coeff.terms
            if len(ct) == 1:
                (k, c), = ct.items()
                sign = "-" if c < 0 else "+"
                single = EpsCoeff({k: abs(c)})
                cs = str(single)
                if not m:
                    body = cs
                elif cs == "1":
                    body = m
                else:
                    body = f"{cs}*{m}"
            else:
                sign = "+"
                cs = f"({coeff})"
                body = cs if not m else f"{cs}*{m}"
            parts.append((sign, body))
        return _join_signed(parts)

    def __repr__(self):
        return f"Poly({str(self)!r})"


def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    """``add``/``sub``/``mul`` with an explicit dimension check."""
    if a.coords != b.coords:
        raise DimensionError(f"{a.coords.names} vs {b.coords.names}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def eval_point(p: Poly, coords: Iterable, eps) -> Fraction:
    """Exact rational evaluation; ``eps`` must be nonzero."""
    eps = as_scalar(eps)
    if not eps:
        raise ZeroDivisionError("eps must be nonzero")
    return p.evaluate([as_scalar(c) for c in coords], eps)
