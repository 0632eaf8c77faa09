"""Octonion arithmetic and the automorphism group G2.

Builds the algebra from the Cayley-Dickson doubling, shows the classical
identities that survive the loss of associativity, and constructs exceptional
automorphisms from basic triples.
"""

import numpy as np

from nkcurves import octonion

e = np.eye(8)

print("== multiplication table (imaginary units) ==")
print("entry (i,j) = +-k  with  e_i e_j = +-e_k   (0 on the diagonal: e_i^2 = -1)")
print(octonion.signed_index_table())

print("\n== identities on random octonions ==")
rng = np.random.default_rng(0)
x, y, z = rng.standard_normal((3, 8))
mul = octonion.oct_mul
print("norm multiplicativity |xy| - |x||y| =",
      octonion.oct_norm(mul(x, y)) - octonion.oct_norm(x) * octonion.oct_norm(y))
print("alternativity (xx)y - x(xy)        =",
      np.abs(mul(mul(x, x), y) - mul(x, mul(x, y))).max())
print("Moufang ((xy)x)z - x(y(xz))        =",
      np.abs(mul(mul(mul(x, y), x), z) - mul(x, mul(y, mul(x, z)))).max())

print("\nassociativity is genuinely lost:")
lhs = mul(mul(e[1], e[2]), e[4])
rhs = mul(e[1], mul(e[2], e[4]))
print("  (e1 e2) e4 =", lhs.astype(int), "  e1 (e2 e4) =", rhs.astype(int))

print("\n== G2 from a basic triple ==")
g = octonion.random_g2(seed=42)
print("orthogonality residual :", g.orthogonality_residual())
print("automorphism residual  :", g.automorphism_residual())
u, v = rng.standard_normal((2, 7))
print("equivariance of the cross product:",
      np.abs(g.apply(octonion.cross(u, v))
             - octonion.cross(g.apply(u), g.apply(v))).max())
