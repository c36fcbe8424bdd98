"""Normal forms modulo a principal ideal ``(F)`` with ``F = a*v^m + b``.

``a`` must be a unit (a single nonzero ``c*e^k``) and ``b`` must have
``v``-degree below ``m``.  The single rewriting ``v^m -> -b/a`` is then
confluent and strictly lowers the ``v``-degree, so no Groebner machinery is
needed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .forms import Form, VecField
from .poly import DimensionError, Poly


class RuleError(ValueError):
    pass


@dataclass(frozen=True)
class NormalFormRule:
    var: str
    power: int
    replacement: Poly
    generator: Poly
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @classmethod
    def from_polynomial(cls, F: Poly, var: str | None = None) -> "NormalFormRule":
        """Derive the rule from ``F``; ``var`` defaults to the first usable coordinate, preferring z."""
        candidates = [var] if var else (["z"] if "z" in F.coords.names else []) + list(F.coords.names)
        last_err = None
        for name in candidates:
            try:
                return cls._build(F, name)
            except RuleError as err:
                last_err = err
        raise RuleError(f"no coordinate gives a unit-leading rewrite for {F}: {last_err}")

    @classmethod
    def _build(cls, F: Poly, var: str) -> "NormalFormRule":
        m = F.degree_in(var)
        if m < 1:
            raise RuleError(f"{var} does not occur in {F}")
        i = F.coords.index(var) + 1
        lead = {k: c for k, c in F.raw_terms.items() if k[i] == m}
        if len(lead) != 1:
            raise RuleError(f"coefficient of {var}^{m} is not a unit")
        (key, c), = lead.items()
        if any(e for j, e in enumerate(key[1:]) if j != i - 1):
            raise RuleError(f"coefficient of {var}^{m} involves other coordinates")
        rest = F - Poly(F.coords, {key: c})
        # -b/a with a = c*e^k
        k = key[0]
        inv = Poly.const(F.coords, 1 / c, -k)
        return cls(var, m, -(rest * inv), F)

    def _rep_power(self, j: int) -> Poly:
        if j not in self._cache:
            self._cache[j] = self.replacement ** j
        return self._cache[j]

    def reduce(self, p: Poly) -> Poly:
        return reduce_mod(self, p)


def reduce_mod(rule: NormalFormRule, p: Poly) -> Poly:
    """Unique representative of ``p`` modulo ``(F)`` with ``var``-degree < power."""
    if p.coords != rule.generator.coords:
        raise DimensionError(f"{p.coords.names} vs {rule.generator.coords.names}")
    i = p.coords.index(rule.var) + 1
    m = rule.power
    kept: dict = {}
    # bucket terms by the number of var^m factors to substitute
    buckets: dict[int, dict] = {}
    for key, c in p.raw_terms.items():
        q, rem = divmod(key[i], m)
        if q == 0:
            kept[key] = c
        else:
            k = list(key)
            k[i] = rem
            buckets.setdefault(q, {})[tuple(k)] = c
    out = Poly(p.coords, kept)
    for q, terms in buckets.items():
        out = out + Poly(p.coords, terms) * rule._rep_power(q)
    if out.degree_in(rule.var) >= m:
        # replacement may itself carry var (only when it has var-degree < m,
        # products can climb back over m)
        return reduce_mod(rule, out)
    return out


def reduce_form(rule: NormalFormRule, a: Form) -> Form:
    return a.map_coefficients(rule.reduce)


def reduce_field(rule: NormalFormRule, X: VecField) -> VecField:
    return X.map_components(rule.reduce)
