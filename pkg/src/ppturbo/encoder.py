"""Turbo encoder with two G = [1, 15/13] constituent codes and dual termination.

Octal generators are read with the D^0 coefficient as the most significant
bit (the LTE convention): 13 -> 1011 -> 1 + D^2 + D^3 (feedback) and
15 -> 1101 -> 1 + D + D^3 (forward). Reading the bits the other way round
gives a different code and silently changes every spectrum.

Only weights matter downstream, but the bit layout is fixed so serialized
codewords are reproducible: the 12 tail bits are encoder 1's
(x, z) x 3 followed by encoder 2's (x, z) x 3.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .poly import Permutation


def _octal_taps(octal: int, memory: int) -> tuple[int, ...]:
    """Coefficients (D^0, ..., D^memory) of an octal generator, D^0 first."""
    bits = bin(int(str(octal), 8))[2:].zfill(memory + 1)
    if len(bits) != memory + 1:
        raise ValueError(f"generator {octal} does not fit memory {memory}")
    return tuple(int(b) for b in bits)


@dataclass(frozen=True)
class RscSpec:
    memory: int = 3
    feedback_octal: int = 13
    forward_octal: int = 15

    @property
    def feedback_taps(self) -> tuple[int, ...]:
        return _octal_taps(self.feedback_octal, self.memory)

    @property
    def forward_taps(self) -> tuple[int, ...]:
        return _octal_taps(self.forward_octal, self.memory)

    @property
    def n_states(self) -> int:
        return 1 << self.memory


LTE_RSC = RscSpec()


@dataclass(frozen=True)
class TurboCodeword:
    systematic: tuple[int, ...]
    parity1: tuple[int, ...]
    parity2: tuple[int, ...]
    tail: tuple[int, ...]

    def bits(self) -> tuple[int, ...]:
        return self.systematic + self.parity1 + self.parity2 + self.tail

    def __len__(self) -> int:
        return len(self.systematic) + len(self.parity1) + len(self.parity2) + len(self.tail)


@lru_cache(maxsize=None)
def trellis(spec: RscSpec = LTE_RSC) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Tables indexed [state, input]: next state, parity bit; plus per-state
    termination input and termination parity (one step each).

    State s packs the register as bit k-1 = contents of delay cell D^k.
    """
    m = spec.memory
    fb, fw = spec.feedback_taps, spec.forward_taps
    S = spec.n_states
    nxt = np.zeros((S, 2), dtype=np.int64)
    par = np.zeros((S, 2), dtype=np.int64)
    term_in = np.zeros(S, dtype=np.int64)
    term_par = np.zeros(S, dtype=np.int64)
    for s in range(S):
        cells = [(s >> k) & 1 for k in range(m)]  # cells[k] holds the D^(k+1) delay
        feedback = 0
        for k in range(m):
            feedback ^= fb[k + 1] & cells[k]
        for u in (0, 1):
            a = u ^ feedback
            z = fw[0] & a
            for k in range(m):
                z ^= fw[k + 1] & cells[k]
            ns = ((s << 1) | a) & (S - 1)
            nxt[s, u], par[s, u] = ns, z
        # Tail input equals the feedback so the register shifts in a zero.
        term_in[s] = feedback
        term_par[s] = par[s, feedback]
    for arr in (nxt, par, term_in, term_par):
        arr.setflags(write=False)
    return nxt, par, term_in, term_par


def rsc_encode_terminated(info: Sequence[int], spec: RscSpec = LTE_RSC
                          ) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    """Encode from the zero state and terminate; returns (parity, tail_sys, tail_par)."""
    if len(info) == 0:
        raise ValueError("info must be non-empty")
    nxt, par, term_in, _ = trellis(spec)
    state = 0
    parity = []
    for u in info:
        u = int(u)
        if u not in (0, 1):
            raise ValueError(f"info bits must be 0/1, got {u}")
        parity.append(int(par[state, u]))
        state = int(nxt[state, u])
    tail_sys, tail_par = [], []
    for _ in range(spec.memory):
        t = int(term_in[state])
        tail_sys.append(t)
        tail_par.append(int(par[state, t]))
        state = int(nxt[state, t])
    assert state == 0
    return tuple(parity), tuple(tail_sys), tuple(tail_par)


def interleave(info: Sequence[int], perm: Permutation) -> list[int]:
    """Second-encoder input: position k carries info[perm[k]]."""
    return [info[perm.forward[k]] for k in range(len(perm))]


def turbo_encode(info: Sequence[int], perm: Permutation, spec: RscSpec = LTE_RSC) -> TurboCodeword:
    if len(info) != len(perm):
        raise ValueError(f"info length {len(info)} != interleaver length {len(perm)}")
    p1, xs1, zs1 = rsc_encode_terminated(info, spec)
    p2, xs2, zs2 = rsc_encode_terminated(interleave(info, perm), spec)
    tail = []
    for xs, zs in ((xs1, zs1), (xs2, zs2)):
        for x, z in zip(xs, zs):
            tail += [x, z]
    return TurboCodeword(tuple(int(b) for b in info), p1, p2, tuple(tail))


def codeword_weight(cw: TurboCodeword) -> int:
    return sum(cw.systematic) + sum(cw.parity1) + sum(cw.parity2) + sum(cw.tail)


def code_rate(L: int, memory: int = 3) -> Fraction:
    """Exact rate L / (3L + 4*memory) of the terminated rate-1/3 turbo code."""
    if L < 1:
        raise ValueError("L must be >= 1")
    return Fraction(L, 3 * L + 4 * memory)


def turbo_weights_batch(info_bits: np.ndarray, perm: Permutation,
                        spec: RscSpec = LTE_RSC) -> np.ndarray:
    """Codeword weights for many info words at once (rows of a 0/1 matrix).

    Runs both trellises bit by bit, vectorized over rows. Used by the
    exhaustive oracle, so it deliberately shares nothing with the sparse
    impulse-response path in :mod:`ppturbo.spectrum`.
    """
    info_bits = np.asarray(info_bits, dtype=np.int64)
    n, L = info_bits.shape
    if L != len(perm):
        raise ValueError("row length must equal interleaver length")
    nxt, par, term_in, _ = trellis(spec)
    weight = info_bits.sum(axis=1)
    for stream in (info_bits, info_bits[:, perm.as_array()]):
        state = np.zeros(n, dtype=np.int64)
        for k in range(L):
            u = stream[:, k]
            weight += par[state, u]
            state = nxt[state, u]
        for _ in range(spec.memory):
            t = term_in[state]
            weight += t + par[state, t]
            state = nxt[state, t]
    return weight
