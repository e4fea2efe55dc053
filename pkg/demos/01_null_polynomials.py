"""
Null polynomials and equivalent interleavers
============================================

Different coefficient triples can describe the same permutation. The
difference between two such polynomials vanishes at every point of Z_L.
"""

from math import gcd

from ppturbo import PolyModL, as_permutation, npp_enumerate
from ppturbo.poly import canonical, effective_degree, equivalence_class

# Every polynomial of degree <= 3 that is zero everywhere modulo 8.
for p in sorted(npp_enumerate(8), key=lambda p: p.coeffs):
    print("null mod 8:", p)

# The count follows gcd(L,6)*gcd(L,2).
for L in (7, 8, 9, 12, 40, 48):
    print(f"L={L:3d}  nulls={len(npp_enumerate(L)):2d}  gcd formula={gcd(L, 6) * gcd(L, 2)}")

# Adding a null polynomial leaves the permutation unchanged.
p = PolyModL.from_coeffs(40, 3, 8, 16)
for q in sorted(equivalence_class(p), key=lambda q: q.coeffs):
    same = as_permutation(q).forward == as_permutation(p).forward
    print(f"{str(q):16s} same permutation: {same}")

# The search keeps one member per class, the lexicographically smallest.
print("canonical:", canonical(p), " effective degree:", effective_degree(p))

# 5x+4x^3 mod 8 is really the identity in disguise.
print("5x+4x^3 mod 8 has effective degree", effective_degree(PolyModL.from_coeffs(8, 5, 0, 4)))
