"""
Encoding and the distance spectrum
==================================

The turbo code uses two rate-1/2 recursive encoders (feedback 13, forward 15
in octal) and trellis termination on both, for a rate of L/(3L+12).
"""

import time

import numpy as np

from ppturbo import PolyModL, as_permutation, distance_spectrum, turbo_encode
from ppturbo.encoder import code_rate, codeword_weight, rsc_encode_terminated
from ppturbo.spectrum import brute_force_spectrum

# A single 1 never brings a recursive encoder back to zero on its own.
parity, tail_x, tail_z = rsc_encode_terminated([1, 0, 0, 0, 0, 0, 0, 0])
print("impulse parity", parity, "tail", tail_x, tail_z)

# The feedback polynomial itself as input returns to zero after 4 steps.
print("1011 parity", rsc_encode_terminated([1, 0, 1, 1, 0, 0, 0, 0])[0])

perm = as_permutation(PolyModL.from_coeffs(40, 13, 10))
info = np.zeros(40, dtype=int)
info[[3, 10]] = 1
cw = turbo_encode(info.tolist(), perm)
print("codeword length", len(cw), "weight", codeword_weight(cw), "rate", code_rate(40))

# Small lengths can be checked against every one of the 2^L - 1 inputs.
small = as_permutation(PolyModL.from_coeffs(16, 3, 4))
print("L=16 exhaustive:", brute_force_spectrum(small, 4).as_tuples())
print("L=16 search    :", distance_spectrum(small, 4, wu_max=16).as_tuples())

# Realistic lengths use the low-weight search with inputs of weight <= 10.
t = time.time()
spec = distance_spectrum(perm, 9)
print(f"L=40 spectrum in {time.time() - t:.2f}s")
print(spec.to_csv())
