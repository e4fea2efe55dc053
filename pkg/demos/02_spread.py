"""
Spread of an interleaver
========================

Treat the interleaver as the point set {(i, pi(i))} on a torus and measure
the smallest Lee distance between two points.
"""

import numpy as np

from ppturbo import PolyModL, as_permutation, spread_D
from ppturbo.poly import Permutation, random_permutation

for L, coeffs in [(40, (13, 10)), (48, (5, 6, 12)), (64, (5, 24, 48)), (80, (11, 20)), (120, (5, 0, 48))]:
    p = PolyModL.from_coeffs(L, *coeffs)
    res = spread_D(as_permutation(p))
    print(f"L={L:3d}  {str(p):16s} D={res.d_value:2d}  witness pair {res.witness}")

# The identity is as bad as it gets: neighbours stay neighbours.
print("identity, L=40: D =", spread_D(Permutation.identity(40)).d_value)

# Random interleavers rarely do well either.
rng = np.random.default_rng(0)
ds = [spread_D(random_permutation(40, rng)).d_value for _ in range(200)]
print("200 random interleavers, L=40: D values", sorted(set(ds)))
