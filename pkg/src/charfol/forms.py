"""Differential forms and vector fields with polynomial coefficients."""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .poly import CoordSystem, DimensionError, Poly, as_scalar


def _sort_sign(indices: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the permutation sorting ``indices`` (0 if any repeat)."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(idx)


class Form:
    """Homogeneous differential form ``sum_I f_I dx_I`` with increasing ``I``."""

    __slots__ = ("coords", "degree", "_terms")

    def __init__(self, coords: CoordSystem, degree: int,
                 terms: Mapping[tuple[int, ...], Poly] | None = None):
        self.coords = coords
        self.degree = degree
        clean: dict[tuple[int, ...], Poly] = {}
        for idx, f in (terms or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise ValueError(f"index {idx} does not have degree {degree}")
            if any(b <= a for a, b in zip(idx, idx[1:])):
                raise ValueError(f"index tuple {idx} is not strictly increasing")
            if not isinstance(f, Poly):
                f = Poly.const(coords, f)
            elif f.coords != coords:
                raise DimensionError("coefficient lives in another coordinate system")
            if not f.is_zero():
                clean[idx] = clean[idx] + f if idx in clean else f
        self._terms = {k: v for k, v in clean.items() if not v.is_zero()}

    @classmethod
    def zero(cls, coords: CoordSystem, degree: int) -> "Form":
        return cls(coords, degree)

    @classmethod
    def function(cls, f: Poly) -> "Form":
        return cls(f.coords, 0, {(): f})

    @classmethod
    def d(cls, coords: CoordSystem, name: str) -> "Form":
        """Basis 1-form ``d(name)``."""
        return cls(coords, 1, {(coords.index(name),): Poly.const(coords, 1)})

    @property
    def terms(self) -> dict[tuple[int, ...], Poly]:
        return dict(self._terms)

    def coefficient(self, idx) -> Poly:
        if idx and isinstance(idx[0], str):
            sign, idx = _sort_sign([self.coords.index(n) for n in idx])
        else:
            sign, idx = _sort_sign(idx)
        if sign == 0:
            return Poly.zero(self.coords)
        f = self._terms.get(idx, Poly.zero(self.coords))
        return f if sign > 0 else -f

    def is_zero(self) -> bool:
        return not self._terms

    def as_poly(self) -> Poly:
        """Value of a 0-form."""
        if self.degree != 0:
            raise ValueError("only 0-forms have a scalar value")
        return self._terms.get((), Poly.zero(self.coords))

    def map_coefficients(self, fn) -> "Form":
        return Form(self.coords, self.degree, {k: fn(v) for k, v in self._terms.items()})

    def _check(self, other: "Form"):
        if not isinstance(other, Form):
            raise TypeError(f"expected a Form, got {type(other).__name__}")
        if other.coords != self.coords:
            raise DimensionError(f"{self.coords.names} vs {other.coords.names}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction, Poly)) and self.degree == 0:
            other = Form.function(Poly.const(self.coords, other) if not isinstance(other, Poly) else other)
        self._check(other)
        if other.degree != self.degree:
            if other.is_zero():
                return self
            if self.is_zero():
                return other
            raise ValueError(f"cannot add forms of degree {self.degree} and {other.degree}")
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out[k] + v if k in out else v
        return Form(self.coords, self.degree, out)

    __radd__ = __add__

    def __neg__(self):
        return self.map_coefficients(lambda f: -f)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Form):
            return wedge(self, other)
        if isinstance(other, (int, Fraction)):
            other = as_scalar(other)
        elif isinstance(other, Poly):
            if other.coords != self.coords:
                raise DimensionError("scalar factor in another coordinate system")
        else:
            return NotImplemented
        return self.map_coefficients(lambda f: f * other)

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return self.coords == other.coords
        return (self.coords == other.coords and self.degree == other.degree
                and self._terms == other._terms)

    def __hash__(self):
        return hash((self.coords, self.degree, frozenset(self._terms.items())))

    def __call__(self, *vectors: "VecField") -> Poly:
        """Evaluate on ``degree`` vector fields."""
        if len(vectors) != self.degree:
            raise ValueError(f"a {self.degree}-form takes {self.degree} vector fields")
        out = self
        for v in vectors:
            out = interior(v, out)
        return out.as_poly()

    def evaluate(self, point: Sequence, eps) -> dict[tuple[int, ...], object]:
        return {k: f.evaluate(point, eps) for k, f in self._terms.items()}

    def evaluate_on(self, vectors, point: Sequence, eps):
        """Numeric value on tangent vectors (rows of ``vectors``) at ``point``."""
        import numpy as np

        V = np.asarray(vectors, dtype=object)
        total = eps * 0
        for idx, f in self._terms.items():
            sub = [[V[a][i] for i in idx] for a in range(self.degree)]
            total = total + f.evaluate(point, eps) * _det(sub)
        return total

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for idx in sorted(self._terms):
            f = self._terms[idx]
            basis = "^".join("d" + self.coords.names[i] for i in idx)
            fs = str(f)
            if not basis:
                parts.append(fs)
            elif fs == "1":
                parts.append(basis)
            elif fs == "-1":
                parts.append(f"-{basis}")
            else:
                parts.append(f"({fs})*{basis}")
        return " + ".join(parts)

    def __repr__(self):
        return f"Form({self.degree}, {str(self)!r})"


def _det(m):
    """Cofactor determinant for small matrices over any number type."""
    n = len(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = 0
    for j in range(n):
        if m[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


class VecField:
    """Coordinate vector field ``sum_i X^i d/dx_i``."""

    __slots__ = ("coords", "components")

    def __init__(self, coords: CoordSystem, components: Sequence[Poly]):
        comps = []
        for c in components:
            if not isinstance(c, Poly):
                c = Poly.const(coords, c)
            elif c.coords != coords:
                raise DimensionError("component lives in another coordinate system")
            comps.append(c)
        if len(comps) != coords.dim:
            raise DimensionError(f"need {coords.dim} components, got {len(comps)}")
        self.coords = coords
        self.components = tuple(comps)

    @classmethod
    def from_dict(cls, coords: CoordSystem, comps: Mapping[str, Poly]) -> "VecField":
        out = [Poly.zero(coords)] * coords.dim
        for name, f in comps.items():
            out[coords.index(name)] = out[coords.index(name)] + f
        return cls(coords, out)

    @classmethod
    def basis(cls, coords: CoordSystem, name: str) -> "VecField":
        return cls.from_dict(coords, {name: Poly.const(coords, 1)})

    def __getitem__(self, name) -> Poly:
        if isinstance(name, str):
            name = self.coords.index(name)
        return self.components[name]

    def __call__(self, f: Poly) -> Poly:
        """Directional derivative ``X(f)``."""
        total = Poly.zero(self.coords)
        for i, c in enumerate(self.components):
            if not c.is_zero():
                df = f.diff(i)
                if not df.is_zero():
                    total = total + c * df
        return total

    def __add__(self, other):
        if not isinstance(other, VecField) or other.coords != self.coords:
            return NotImplemented
        return VecField(self.coords, [a + b for a, b in zip(self.components, other.components)])

    def __neg__(self):
        return VecField(self.coords, [-a for a in self.components])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            return VecField(self.coords, [a * other for a in self.components])
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, VecField):
            return NotImplemented
        return self.coords == other.coords and self.components == other.components

    def __hash__(self):
        return hash((self.coords, self.components))

    def map_components(self, fn) -> "VecField":
        return VecField(self.coords, [fn(c) for c in self.components])

    def evaluate(self, point: Sequence, eps) -> list:
        return [c.evaluate(point, eps) for c in self.components]

    def __str__(self):
        parts = []
        for name, c in zip(self.coords.names, self.components):
            if c.is_zero():
                continue
            cs = str(c)
            parts.append(f"d/d{name}" if cs == "1" else f"({cs})*d/d{name}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"VecField({str(self)!r})"


def wedge(a: Form, b: Form) -> Form:
    """Graded-antisymmetric product; degree overflow gives the zero form."""
    a._check(b)
    deg = a.degree + b.degree
    N = a.coords.dim
    if deg > N:
        return Form.zero(a.coords, N)
    out: dict[tuple[int, ...], Poly] = {}
    for ia, fa in a._terms.items():
        for ib, fb in b._terms.items():
            sign, idx = _sort_sign(ia + ib)
            if not sign:
                continue
            prod = fa * fb
            if sign < 0:
                prod = -prod
            out[idx] = out[idx] + prod if idx in out else prod
    return Form(a.coords, deg, out)


def wedge_power(a: Form, k: int) -> Form:
    out = Form.function(Poly.const(a.coords, 1))
    for _ in range(k):
        out = wedge(out, a)
    return out


def ext_d(a: Form) -> Form:
    """Exterior derivative."""
    N = a.coords.dim
    if a.degree >= N:
        return Form.zero(a.coords, N)
    out: dict[tuple[int, ...], Poly] = {}
    for idx, f in a._terms.items():
        for j in range(N):
            if j in idx:
                continue
            dfj = f.diff(j)
            if dfj.is_zero():
                continue
            sign, key = _sort_sign((j,) + idx)
            val = dfj if sign > 0 else -dfj
            out[key] = out[key] + val if key in out else val
    return Form(a.coords, a.degree + 1, out)


def interior(X: VecField, a: Form) -> Form:
    """Contraction ``iota_X a`` into the first slot."""
    if X.coords != a.coords:
        raise DimensionError(f"{X.coords.names} vs {a.coords.names}")
    if a.degree == 0:
        raise ValueError("interior product of a 0-form is undefined")
    out: dict[tuple[int, ...], Poly] = {}
    for idx, f in a._terms.items():
        for m, i in enumerate(idx):
            xi = X.components[i]
            if xi.is_zero():
                continue
            key = idx[:m] + idx[m + 1:]
            val = xi * f
            if m % 2:
                val = -val
            out[key] = out[key] + val if key in out else val
    return Form(a.coords, a.degree - 1, out)


def lie_derivative(X: VecField, a: Form) -> Form:
    """Cartan's formula ``iota_X d a + d iota_X a``."""
    if a.degree == 0:
        if a.coords.dim == 0:
            return a
        return Form.function(X(a.as_poly()))
    return interior(X, ext_d(a)) + ext_d(interior(X, a))


def volume_indices(coords: CoordSystem) -> tuple[int, ...]:
    return tuple(range(coords.dim))


def top_coefficient(a: Form) -> Poly:
    """Coefficient of a top-degree form on dx_0 ^ ... ^ dx_{N-1}."""
    if a.degree != a.coords.dim:
        raise ValueError(f"form of degree {a.degree} is not top-degree")
    return a.coefficient(volume_indices(a.coords))


def random_form(coords: CoordSystem, degree: int, rng, n_terms: int = 3,
                max_exp: int = 2) -> Form:
    """Small random form for property tests."""
    terms = {}
    choices = list(combinations(range(coords.dim), degree))
    for _ in range(n_terms):
        idx = choices[rng.integers(len(choices))]
        key = [int(rng.integers(-2, 2))] + [int(rng.integers(0, max_exp + 1)) for _ in coords.names]
        c = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))
        f = Poly(coords, {tuple(key): c})
        terms[idx] = terms[idx] + f if idx in terms else f
    return Form(coords, degree, terms)
