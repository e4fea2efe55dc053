"""Lee-metric spread of an interleaver's point set {(i, pi(i))}."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .poly import Permutation


@dataclass(frozen=True)
class SpreadResult:
    d_value: int
    witness: tuple[int, int]


def circular_distance(a: int, b: int, L: int) -> int:
    if not (0 <= a < L and 0 <= b < L):
        raise ValueError(f"arguments must lie in [0, {L})")
    return min((a - b) % L, (b - a) % L)


def lee_point_distance(i: int, j: int, perm: Permutation) -> int:
    if i == j:
        raise ValueError("points must be distinct")
    L = len(perm)
    return circular_distance(i, j, L) + circular_distance(perm[i], perm[j], L)


def _circular(diff: np.ndarray, L: int) -> np.ndarray:
    diff = diff % L
    return np.minimum(diff, L - diff)


def spread_matrix(perm: Permutation) -> np.ndarray:
    """Lee distance between every pair of points; the diagonal is set to a large value."""
    L = len(perm)
    idx = np.arange(L)
    p = perm.as_array()
    dist = _circular(idx[:, None] - idx[None, :], L) + _circular(p[:, None] - p[None, :], L)
    np.fill_diagonal(dist, 2 * L + 1)
    return dist


def spread_D(perm: Permutation) -> SpreadResult:
    """Minimum Lee distance over pairs i < j; witness is the lexicographically first minimizer."""
    L = len(perm)
    if L < 2:
        raise ValueError("need at least two points")
    dist = spread_matrix(perm)
    dist[np.tril_indices(L)] = 2 * L + 1
    flat = int(np.argmin(dist))
    i, j = divmod(flat, L)
    return SpreadResult(int(dist[i, j]), (i, j))


def spread_value(values: np.ndarray) -> int:
    """D for a permutation given as an integer array, without building a Permutation.

    Uses the fact that the Lee distance depends only on index differences up to
    wraparound: for each shift s in 1..L//2, compare pi(i+s) with pi(i).
    """
    L = len(values)
    best = 2 * L + 1
    for s in range(1, L // 2 + 1):
        if s + 1 >= best:
            break
        diff = (np.roll(values, -s) - values) % L
        best = min(best, s + int(np.minimum(diff, L - diff).min()))
    return best
