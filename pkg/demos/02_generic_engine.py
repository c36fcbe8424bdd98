"""The characteristic-field engine on arbitrary input.

The engine solves iota_X (beta ^ (d beta)^n) = n beta ^ dF ^ (d beta)^(n-1)
for X.  Fed the construction's own beta and F, it recovers the explicit X up
to a positive factor.

    python demos/02_generic_engine.py
"""
from charfol import construction as pc
from charfol.dsl import parse_many
from charfol.engine import ContactData, characteristic_field, characteristic_field_parts, minors_residuals

# A hand-solvable case: the standard form on R^3 and the plane z = 0.
coords, (beta, F) = parse_many("dz + x1*dy1 - y1*dx1", "z")
print("radial example:", characteristic_field(ContactData.create(beta, F)))

# The construction: X* = Xh / D with D > 0, and Xh parallel to X modulo F.
obj = pc.build(2)
data = ContactData.create(obj.beta, obj.F)
Xh, D = characteristic_field_parts(data)
print("leftover denominator D =", D)
print("nonzero 2x2 minors of (Xh, X) mod F:",
      sum(not m.is_zero() for m in minors_residuals(data, Xh, obj.X)))

# On Sigma-tilde the ratio Xh / X is one positive number across all components.
eps = 0.1
point = [0.02, 0.9, 1.0, 0.01, -0.02]
point[0] = (eps**2 * (1 + eps - 0.81) - 0.01**2 - 0.02**2) ** 0.5  # solve F = 0 for z
ratios = [float(a.evaluate(point, eps)) / float(b.evaluate(point, eps))
          for a, b in zip(Xh.components, obj.X.components) if abs(float(b.evaluate(point, eps))) > 1e-12]
print("Xh / X componentwise at a point of Sigma-tilde:", ", ".join(f"{r:.12f}" for r in ratios))
