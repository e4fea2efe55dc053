"""Permutation-polynomial interleavers for turbo codes: null polynomials,
spread, distance spectra, union bounds and the optimizing search."""

__version__ = "0.1.0"

from .bounds import BoundResult, Channel, tub, tub_awgn, tub_rayleigh
from .encoder import (LTE_RSC, RscSpec, TurboCodeword, code_rate, codeword_weight,
                      rsc_encode_terminated, turbo_encode)
from .poly import (NotBijective, Permutation, PolyModL, as_permutation, canonical,
                   effective_degree, equivalent, eval_poly, format_poly,
                   inverse_permutation, is_permutation_polynomial, npp_enumerate,
                   parse_poly, triangular_class)
from .search import (SearchConfig, SearchReport, dmin_imposed_search, enumerate_candidates,
                     largest_spread_set, optimize)
from .spectrum import (BudgetExceeded, DistanceSpectrum, SpectrumLine, brute_force_spectrum,
                       distance_spectrum, merge_spectra)
from .spread import SpreadResult, circular_distance, lee_point_distance, spread_D
