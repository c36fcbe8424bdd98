"""Pipelines behind the command line: ledger, singular table, TB report, engine mode.

Every function returns plain data plus a JSON-ready dict; nothing here prints.
JSON output is deterministic (sorted keys, fixed number formatting, no
timestamps) and carries ``"schema": 1``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from . import construction as pc
from .dsl import parse_many
from .dynamics import SingularPoint, analyse
from .engine import (ContactData, TBReport, TangencyRecord, characteristic_field,
                     contact_check, membership_residual, surface_orientation, tangency_sign,
                     tb_evaluate)
from .forms import Form, interior
from .numerics import bigfloat, working_dps
from .poly import Poly, as_scalar

SCHEMA = 1
SURFACE_EULER_CHARACTERISTIC = 2  # Sigma ~ D^2 x S^(2n-2)


def dumps(payload: dict) -> str:
    """Canonical JSON text for ``payload`` (with the schema tag)."""
    return json.dumps({"schema": SCHEMA, **payload}, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    if isinstance(value, float):
        return float(f"{value:.12g}")
    if isinstance(value, mpmath.mpf):
        return mpmath.nstr(value, 15)
    return str(value)


# -- verification ledger --------------------------------------------------------

def verification_ledger(n: int, eps, mutation: str | None = None) -> list[pc.Check]:
    """The seven ledger entries for the construction in dimension ``2n+1``."""
    eps = as_scalar(eps)
    obj = pc.build(n, mutation=mutation)
    checks = [pc.verify_tangency(obj), pc.verify_beta_x(obj), pc.verify_iota_dbeta(obj),
              pc.verify_boundary(obj, eps)]
    red = pc.verify_reduction(obj)
    checks.append(red)
    if red.passed:
        checks.append(pc.verify_first_integral(pc.reduce_system(obj), eps))
    else:
        checks.append(pc.Check("first integral", "C = N/D constant along X'", False,
                               "reduction failed", certificate="none"))
    checks.append(pc.verify_special_orbits(obj, eps))
    return checks


def ledger_json(checks: list[pc.Check], n: int, eps, mutation=None) -> dict:
    return {
        "command": "verify", "n": n, "eps": str(as_scalar(eps)), "mutation": mutation,
        "all_pass": all(c.passed for c in checks),
        "ledger": [{**c.to_json(), "details": _jsonable(c.details)} for c in checks],
    }


# -- singular points and tangencies ------------------------------------------------

@dataclass
class SingularReport:
    n: int
    eps: Fraction
    points: list[SingularPoint]
    records: list[TangencyRecord] = field(default_factory=list)

    def to_json(self) -> dict:
        rows = [p.to_json() for p in self.points]
        return {"command": "singular", "n": self.n, "eps": str(self.eps), "count": len(rows),
                "points": rows}


def pole_point(obj: pc.HypersurfaceData, z) -> list:
    """Full-space point over a pole of the quarter-sphere (r = 0, ball = 0)."""
    pt = [mpmath.mpf(0)] * obj.coords.dim
    pt[obj.coords.index("z")] = z
    return pt


def singular_report(n: int, eps, dps: int | None = None) -> SingularReport:
    """Zeros of X' with type and index; the poles get their tangency sign.

    The poles are the only zeros of the characteristic field on Sigma (the
    other three zeros of X' are periodic orbits upstairs); their sign comes
    from comparing (d beta)^n with the orientation of Sigma.
    """
    eps = as_scalar(eps)
    obj = pc.build(n)
    sys = pc.reduce_system(obj)
    points = analyse(sys, eps, dps=dps)
    data = ContactData.create(obj.beta, obj.F, "z")
    orient = surface_orientation(data)
    records = []
    for sp in points:
        if not sp.label.startswith("pole"):
            continue
        pt = pole_point(obj, sp.point[0])
        sp.sign = tangency_sign(data, pt, orient, eps)
        records.append(TangencyRecord(tuple(pt), sp.sign, sp.index, sp.kind))
    return SingularReport(n, eps, points, records)


def tb_report(n: int, eps, dps: int | None = None) -> tuple[TBReport, SingularReport]:
    sing = singular_report(n, eps, dps)
    return tb_evaluate(sing.records, SURFACE_EULER_CHARACTERISTIC), sing


def tb_json(report: TBReport, sing: SingularReport) -> dict:
    return {"command": "tb", "n": sing.n, "eps": str(sing.eps), **report.to_json(),
            "neg_euler": report.neg_euler, "neg_chi": report.neg_chi,
            "records": [{"z": mpmath.nstr(r.point[0], 15), "sign": r.sign, "index": r.index,
                         "kind": r.kind} for r in sing.records]}


# -- generic engine mode -----------------------------------------------------------

@dataclass
class EngineResult:
    data: ContactData
    field: object
    volume: Poly
    membership_zero: bool
    tangent_zero: bool
    residuals: dict

    def to_json(self) -> dict:
        return {"command": "engine", "coords": list(self.data.coords.names),
                "field": {name: str(c) for name, c in zip(self.data.coords.names, self.field.components)},
                "volume_coefficient": str(self.volume),
                "membership_zero": self.membership_zero, "tangent_zero": self.tangent_zero,
                "all_pass": self.membership_zero and self.tangent_zero}


def engine_run(beta_src: str, f_src: str) -> EngineResult:
    """Characteristic field of ``{F = 0}`` for user-supplied DSL texts.

    Raises DSLParseError on malformed input and NonContactError /
    DegenerateFormError when beta is not contact.
    """
    coords, (beta, F) = parse_many(beta_src, f_src)
    if isinstance(beta, Poly) or not isinstance(beta, Form) or beta.degree != 1:
        raise TypeError("beta must parse to a 1-form")
    if not isinstance(F, Poly):
        raise TypeError("F must parse to a polynomial")
    if coords.dim % 2 == 0:
        # pad to odd dimension is not meaningful: contact needs 2n+1 coordinates
        raise ValueError(f"{coords.dim} coordinates in use; contact forms need an odd number")
    data = ContactData.create(beta, F)
    w = contact_check(data)
    X = characteristic_field(data)
    memb = membership_residual(data, X)
    tangent = [data.rule.reduce(interior(X, data.dF).as_poly()),
               data.rule.reduce(interior(X, data.beta).as_poly())]
    return EngineResult(data, X, w, memb.is_zero(), all(t.is_zero() for t in tangent),
                        {"membership": memb, "tangent": tangent})


def engine_numeric_check(beta_src: str, f_src: str, eps, samples: int = 5, seed: int = 0) -> bool:
    """Spot-check beta(X) = dF(X) = 0 at random points (numerically)."""
    import numpy as np

    res = engine_run(beta_src, f_src)
    rng = np.random.default_rng(seed)
    e = float(as_scalar(eps))
    for _ in range(samples):
        pt = rng.uniform(-1, 1, res.data.coords.dim)
        v = np.array([float(c.evaluate(pt, e)) for c in res.field.components])
        g = np.array([float(res.data.F.diff(i).evaluate(pt, e)) for i in range(len(pt))])
        if abs(v @ g) > 1e-9 * (1 + np.linalg.norm(v) * np.linalg.norm(g)):
            return False
    return True


def closed_form_summary(eps, dps=None) -> dict:
    """Closed-form radicals at ``eps`` for display."""
    orb = pc.SpecialOrbits.at(eps, dps)
    dps = working_dps(dps)
    with mpmath.workdps(dps):
        e = bigfloat(as_scalar(eps), dps)
        s = e * mpmath.sqrt(1 + e)
    return {"pole_z": mpmath.nstr(s, 15), "P_z": mpmath.nstr(orb.z_p, 15),
            "r0": mpmath.nstr(orb.r0, 15), "n0": mpmath.nstr(orb.n0, 15),
            "C_sep": mpmath.nstr(orb.c_sep, 15)}
