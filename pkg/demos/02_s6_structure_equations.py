"""The round six-sphere as a nearly Kähler manifold.

J_p(v) = p v (octonion product) on the unit sphere of Im O.  The demo checks
the almost Hermitian invariants, decomposes d-omega into Hodge (p,q) types
with Richardson-extrapolated finite differences, and recovers the structure
equations  d omega = 3 lambda Re(Omega)  and  d Im(Omega) = -2 lambda omega^2
with a single constant lambda = -1.
"""

import numpy as np

from nkcurves import backgrounds, forms

bg = backgrounds.s6_background()

print("== almost Hermitian invariants at 500 random points ==")
for name, val in backgrounds.structure_invariants(bg, 500, seed=0).items():
    print(f"  {name:18s} {val:.3e}")

print("\n== Hodge type of d-omega (finite differences) ==")
pts = bg.sample_points(5, seed=1)
p = pts[0]
spec = forms.type_decompose(bg.domega_tensor(p), bg.coframe_at(p))
for (a, b), norm in sorted(spec.norms.items()):
    print(f"  |(d omega)^({a},{b})| = {norm:.6f}")
print("  -> (2,1)+(1,2) fraction:", spec.fraction((2, 1), (1, 2)))
print("  the theorem's hypothesis d omega in (3,0)+(0,3) holds on S6")

print("\n== structure equations ==")
lam = backgrounds.lambda_estimate(bg, points=pts)
print(f"  lambda = {lam['lambda_mean']:+.12f}  (std {lam['lambda_std']:.1e})")
print(f"  first-equation residual  : {lam['max_residual']:.3e}")
second = backgrounds.second_structure_equation_residual(
    bg, points=pts, lam=lam["lambda_mean"])
print(f"  second-equation residual : {second:.3e}")
