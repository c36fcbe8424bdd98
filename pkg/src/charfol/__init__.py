"""Characteristic foliations of hypersurfaces in contact manifolds.

Layers, bottom up:

* exterior core -- :mod:`.poly`, :mod:`.forms`, :mod:`.normal_form`, :mod:`.dsl`:
  exact polynomials with Laurent coefficients in epsilon, differential forms,
  vector fields and reduction modulo a defining polynomial.
* :mod:`.engine` -- characteristic field, tangency signs, TB bookkeeping.
* :mod:`.construction` -- the explicit hypersurface, its field ``X`` and the
  verification ledger.
* :mod:`.numerics`, :mod:`.dynamics` -- Sturm certificates, root isolation,
  zeros/indices/types of the reduced field, constrained RK4.
* :mod:`.report`, :mod:`.portrait`, :mod:`.cli` -- reports, SVG, command line.
"""
from .construction import MUTATIONS, build, reduce_system
from .dsl import DSLParseError, parse, parse_field, parse_form
from .engine import (ContactData, TBReport, TangencyRecord, characteristic_field, contact_check,
                     tangency_sign, tb_evaluate)
from .forms import Form, VecField, ext_d, interior, lie_derivative, wedge
from .normal_form import NormalFormRule, reduce_mod
from .numerics import UniPoly, isolate_roots, sturm_positive
from .poly import CoordSystem, Poly, eval_point, poly_arith

__all__ = [
    "MUTATIONS", "build", "reduce_system",
    "DSLParseError", "parse", "parse_field", "parse_form",
    "ContactData", "TBReport", "TangencyRecord", "characteristic_field", "contact_check",
    "tangency_sign", "tb_evaluate",
    "Form", "VecField", "ext_d", "interior", "lie_derivative", "wedge",
    "NormalFormRule", "reduce_mod",
    "UniPoly", "isolate_roots", "sturm_positive",
    "CoordSystem", "Poly", "eval_point", "poly_arith",
]
