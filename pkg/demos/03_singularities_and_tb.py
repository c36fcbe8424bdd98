"""Zeros of the reduced field and the Thurston-Bennequin bookkeeping.

The rotations act on the hypersurface; in the quotient coordinates
(z, r, rho) the field becomes a planar field on a quarter of an ellipsoid.
Its five zeros are found numerically, polished to 50 digits, and compared
with their closed forms.  The two poles are the tangency points S+ and S-.

    python demos/03_singularities_and_tb.py
"""
from fractions import Fraction

import mpmath

from charfol.dynamics import closed_form_zeros
from charfol.report import tb_report

eps = Fraction(1, 10)
report, sing = tb_report(2, eps)
closed = closed_form_zeros(eps)
for sp in sing.points:
    err = max(abs(a - b) for a, b in zip(sp.point, closed[sp.label]))
    print(f"{sp.label:<11} z={mpmath.nstr(sp.point[0], 12):>16} r={mpmath.nstr(sp.point[1], 12):>14} "
          f"rho={mpmath.nstr(sp.point[2], 12):>14}  {sp.kind:<6} index {sp.index:+d} "
          f"sign {sp.sign or '':>2}  |closed form diff| {mpmath.nstr(err, 3)}")
print()
print(report.summary())
