"""Exact identities of the TB-violating hypersurface.

Builds the contact form beta, the ellipsoid F and the field X in dimension
2n+1, then checks each identity as a polynomial identity in the coordinates
and in epsilon (no numerics involved).

    python demos/01_exact_identities.py
"""
from fractions import Fraction

from charfol import construction as pc
from charfol.forms import Form, ext_d, interior, lie_derivative
from charfol.normal_form import reduce_form

for n in (2, 3):
    obj = pc.build(n)
    print(f"--- n = {n}: coordinates {', '.join(obj.coords.names)}")
    print("beta =", obj.beta)
    print("F    =", obj.F)

    # Each identity by hand: compute both sides and subtract.
    k = pc.parse("2*e^-2*(2*r^2-1)*z", obj.coords)
    q = pc.parse("2*r^4-2*r^2+1", obj.coords)
    dF = ext_d(Form.function(obj.F))
    print("dF(X) - kF                       =", interior(obj.X, dF).as_poly() - k * obj.F)
    print("beta(X) - qF                     =", interior(obj.X, obj.beta).as_poly() - q * obj.F)
    print("iota_X dbeta - (k beta - q dF)   =", interior(obj.X, ext_d(obj.beta)) - (k * obj.beta - q * dF))
    print("L_X beta - k beta  (mod F)       =", reduce_form(obj.rule, lie_derivative(obj.X, obj.beta) - k * obj.beta))

    # The boundary r - z = 1: exact substitution plus a Sturm certificate.
    for eps in (Fraction(1, 10), Fraction(1, 100)):
        check = pc.verify_boundary(obj, eps)
        print(f"boundary at eps={eps}: {check.status}, interval {check.details['interval']}")
