"""Tiny text language for polynomials, forms and vector fields.

Grammar (whitespace and newlines are free)::

    expr    := ["+"|"-"] term (("+"|"-") term)*
    term    := power (("*"|"/") power)*
    power   := unary ("^" (["-"] INT | unary))*
    unary   := "-" unary | atom
    atom    := INT | NAME | "d" NAME | "d/d" NAME | "(" expr ")"

``e`` is epsilon, ``dNAME`` the coordinate 1-form, ``d/dNAME`` the coordinate
vector field.  ``^`` is a power for polynomials and the wedge product between
forms.  Division is only by exact unit constants such as ``3`` or ``e^2``.

Examples::

    (2*r^2-1)*dz + r^2*(r^2-1)*dth
    e^-2*r*(r^2-1)*z*d/dr + (1+2*e-2*e^-2*z^2)*d/dth
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .forms import Form, VecField, wedge
from .poly import CoordSystem, Poly

ALIASES = {"theta": "th"}
_COORD_RE = re.compile(r"^(z|r|th|rho|[xy]\d+)$")


class DSLParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # NUM, NAME, VEC, OP, END
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(r"\s*(?:(d/d[A-Za-z_][A-Za-z0-9_]*)|(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))", re.S)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            break
        # track newlines skipped as whitespace
        for j in range(pos, m.start(m.lastindex) if m.lastindex else m.end()):
            if text[j] == "\n":
                line += 1
                line_start = j + 1
        if m.lastindex is None:
            pos = m.end()
            continue
        start = m.start(m.lastindex)
        col = start - line_start + 1
        vec, num, name, op = m.groups()
        if vec:
            tokens.append(Token("VEC", vec[3:], line, col))
        elif num:
            tokens.append(Token("NUM", num, line, col))
        elif name:
            tokens.append(Token("NAME", name, line, col))
        elif op in "+-*/^()":
            tokens.append(Token("OP", op, line, col))
        elif not op.isspace():
            raise DSLParseError(f"unexpected character {op!r}", line, col)
        pos = m.end()
    end_col = len(text) - line_start + 1
    tokens.append(Token("END", "", line, end_col))
    return tokens


def _canon(name: str) -> str:
    return ALIASES.get(name, name)


def _classify_name(name: str) -> tuple[str, str | None]:
    """('eps'|'coord'|'form'|'unknown', coordinate)."""
    if name == "e":
        return "eps", None
    c = _canon(name)
    if _COORD_RE.match(c):
        return "coord", c
    if name.startswith("d"):
        c = _canon(name[1:])
        if _COORD_RE.match(c):
            return "form", c
    return "unknown", None


def _coord_order(name: str):
    fixed = {"z": (0, 0), "r": (1, 0), "th": (2, 0), "rho": (3, 0)}
    if name in fixed:
        return fixed[name]
    return (4 + int(name[1:]) * 2, 0 if name[0] == "x" else 1)


def infer_coords(texts: Iterable[str]) -> CoordSystem:
    """Smallest canonical coordinate system covering every name used."""
    used = set()
    for text in texts:
        for tok in tokenize(text):
            if tok.kind == "VEC":
                kind, c = _classify_name(tok.text)
                if kind == "coord":
                    used.add(c)
            elif tok.kind == "NAME":
                kind, c = _classify_name(tok.text)
                if kind in ("coord", "form"):
                    used.add(c)
    return CoordSystem(tuple(sorted(used, key=_coord_order)))


class _Parser:
    def __init__(self, text: str, coords: CoordSystem):
        self.tokens = tokenize(text)
        self.i = 0
        self.coords = coords

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise DSLParseError(msg, tok.line, tok.col)

    def expect(self, text):
        tok = self.next()
        if tok.kind != "OP" or tok.text != text:
            self.error(f"expected {text!r}", tok)

    def parse(self):
        if self.peek().kind == "END":
            self.error("empty expression")
        value = self.expr()
        if self.peek().kind != "END":
            self.error(f"unexpected token {self.peek().text!r}")
        return value

    def expr(self):
        tok = self.peek()
        sign = 1
        if tok.kind == "OP" and tok.text in "+-":
            self.next()
            sign = -1 if tok.text == "-" else 1
        value = self.term()
        if sign < 0:
            value = -value
        while self.peek().kind == "OP" and self.peek().text in "+-":
            op = self.next()
            rhs = self.term()
            value = self.combine_add(value, rhs, op)
        return value

    def combine_add(self, a, b, op):
        try:
            return a + b if op.text == "+" else a - b
        except (TypeError, ValueError) as err:
            self.error(f"cannot combine terms: {err}", op)

    def term(self):
        value = self.power()
        while self.peek().kind == "OP" and self.peek().text in "*/":
            op = self.next()
            rhs = self.power()
            value = self.mul(value, rhs, op) if op.text == "*" else self.div(value, rhs, op)
        return value

    def mul(self, a, b, op):
        if isinstance(a, VecField) and isinstance(b, VecField):
            self.error("cannot multiply two vector fields", op)
        if isinstance(a, (Form, VecField)) and isinstance(b, (Form, VecField)) and type(a) is not type(b):
            self.error("cannot multiply a form by a vector field", op)
        if isinstance(a, Form) and isinstance(b, Form):
            return wedge(a, b)
        if isinstance(b, (Form, VecField)):
            return b * a
        return a * b

    def div(self, a, b, op):
        if not isinstance(b, Poly) or len(b) != 1 or b.variables():
            self.error("division only by a single nonzero constant term", op)
        (key, c), = b.raw_terms.items()
        inv = Poly.const(self.coords, 1 / c, -key[0])
        return self.mul(a, inv, op)

    def power(self):
        base = self.unary()
        while self.peek().kind == "OP" and self.peek().text == "^":
            op = self.next()
            tok = self.peek()
            if tok.kind == "NUM" or (tok.kind == "OP" and tok.text == "-"):
                neg = False
                if tok.kind == "OP":
                    self.next()
                    neg = True
                    tok = self.peek()
                if tok.kind != "NUM":
                    self.error("expected an integer exponent", tok)
                self.next()
                k = int(tok.text) * (-1 if neg else 1)
                base = self.raise_power(base, k, op)
            else:
                rhs = self.unary()
                if not (isinstance(base, Form) and isinstance(rhs, Form)):
                    self.error("'^' between non-forms needs an integer exponent", op)
                base = wedge(base, rhs)
        return base

    def raise_power(self, base, k, op):
        if not isinstance(base, Poly):
            self.error("only polynomials can be raised to a power", op)
        if k >= 0:
            return base**k
        if len(base) != 1 or base.variables():
            self.error("negative powers only of single constant terms like e", op)
        (key, c), = base.raw_terms.items()
        return Poly.const(self.coords, (1 / c) ** (-k), key[0] * k)

    def unary(self):
        tok = self.peek()
        if tok.kind == "OP" and tok.text == "-":
            self.next()
            return -self.unary()
        return self.atom()

    def atom(self):
        tok = self.next()
        if tok.kind == "NUM":
            return Poly.const(self.coords, Fraction(int(tok.text)))
        if tok.kind == "VEC":
            kind, c = _classify_name(tok.text)
            if kind != "coord" or c not in self.coords.names:
                self.error(f"unknown coordinate in vector d/d{tok.text}", tok)
            return VecField.basis(self.coords, c)
        if tok.kind == "NAME":
            kind, c = _classify_name(tok.text)
            if kind == "eps":
                return Poly.eps(self.coords, 1)
            if kind == "coord" and c in self.coords.names:
                return Poly.var(self.coords, c)
            if kind == "form" and c in self.coords.names:
                return Form.d(self.coords, c)
            self.error(f"unknown name {tok.text!r}", tok)
        if tok.kind == "OP" and tok.text == "(":
            value = self.expr()
            self.expect(")")
            return value
        if tok.kind == "END":
            self.error("unexpected end of input", tok)
        self.error(f"unexpected token {tok.text!r}", tok)


def parse(text: str, coords: CoordSystem | None = None):
    """Parse one expression into a Poly, Form or VecField."""
    if coords is None:
        coords = infer_coords([text])
    return _Parser(text, coords).parse()


def parse_many(*texts: str, coords: CoordSystem | None = None):
    """Parse several expressions into one shared coordinate system."""
    if coords is None:
        coords = infer_coords(texts)
    return coords, [_Parser(t, coords).parse() for t in texts]


def parse_form(text: str, coords: CoordSystem | None = None) -> Form:
    value = parse(text, coords)
    if isinstance(value, Poly):
        return Form.function(value)
    if not isinstance(value, Form):
        raise TypeError(f"expected a form, parsed {type(value).__name__}")
    return value


def parse_field(text: str, coords: CoordSystem | None = None) -> VecField:
    value = parse(text, coords)
    if not isinstance(value, VecField):
        raise TypeError(f"expected a vector field, parsed {type(value).__name__}")
    return value
