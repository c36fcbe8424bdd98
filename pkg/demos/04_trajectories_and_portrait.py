"""Trajectories of the reduced field and the SVG phase portrait.

Orbits stay on the leaves e^-2 z^2 = (C r^2 - 1)(r^2 - 1) + e.  An RK4 run
with projection back onto the quarter-sphere conserves both the constraint
and C; the portrait draws the leaves, the separatrix through the saddle and
the five zeros.

    python demos/04_trajectories_and_portrait.py [out.svg]
"""
import sys
from fractions import Fraction

from charfol import construction as pc
from charfol import dynamics as dyn
from charfol import portrait as pt

eps = Fraction(1, 10)
system = pc.reduce_system(pc.build(2))
start = dyn.point_on_sphere(eps, z=0, r=Fraction(95, 100))
traj = dyn.integrate(system, start, eps, steps=10_000, h=1e-4)
print(f"C at start {traj.c_values[0]:.12f}; relative drift {traj.c_drift:.1e}; "
      f"constraint drift {traj.drift_per_time:.1e} per unit time")

points = dyn.analyse(system, eps)
svg = pt.render_svg(pt.PortraitSpec.default(eps, markers=points))
out = sys.argv[1] if len(sys.argv) > 1 else "portrait.svg"
with open(out, "w", encoding="utf-8") as fh:
    fh.write(svg)
print(f"wrote {out}; max leaf residual {pt.max_leaf_residual(svg, eps):.1e}")
