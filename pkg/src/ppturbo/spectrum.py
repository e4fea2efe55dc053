"""Low-weight distance spectrum of a turbo code for a given interleaver.

The exact search rests on one observation: a codeword of weight
d = w + e1 + e2 (information weight w, constituent-encoder outputs e1, e2
including tails) satisfies 2*min(e1, e2) + w <= d. So every information
word with d <= C is reached by a trellis search on encoder 1 with the cost
2*e1 + w <= C, or by the same search on encoder 2 in interleaved order.
Both searches are cheap, since the parity weight only has to reach about
half the cutoff, and the encoder-1 pattern set does not depend on the
interleaver, so one table per length serves every candidate. Patterns are
scored exactly with impulse responses packed into uint64 words: a
constituent weight is the popcount of an XOR of a few rows.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from .encoder import LTE_RSC, RscSpec, trellis, turbo_weights_batch
from .poly import Permutation


class BudgetExceeded(RuntimeError):
    """The spectrum search needs more patterns (or nodes) than its budget allows."""


@dataclass(frozen=True, order=True)
class SpectrumLine:
    d: int
    N: int
    w: int

    def __post_init__(self):
        if self.d < 1 or self.N < 1 or self.w < self.N:
            raise ValueError(f"invalid spectrum line {self}")


@dataclass(frozen=True)
class DistanceSpectrum:
    lines: tuple[SpectrumLine, ...] = ()
    wu_max: int = 10
    M: int = 0

    def __post_init__(self):
        ds = [ln.d for ln in self.lines]
        if any(a >= b for a, b in zip(ds, ds[1:])):
            raise ValueError("spectrum distances must be strictly increasing")
        for ln in self.lines:
            if ln.w > ln.N * self.wu_max:
                raise ValueError(f"line {ln} exceeds wu_max={self.wu_max}")

    def __len__(self) -> int:
        return len(self.lines)

    def __iter__(self) -> Iterator[SpectrumLine]:
        return iter(self.lines)

    def as_tuples(self) -> list[tuple[int, int, int]]:
        return [(ln.d, ln.N, ln.w) for ln in self.lines]

    def truncated(self, M: int) -> "DistanceSpectrum":
        return DistanceSpectrum(self.lines[:M], self.wu_max, M)

    def to_csv(self) -> str:
        rows = ["d,N,w"] + [f"{ln.d},{ln.N},{ln.w}" for ln in self.lines]
        return "\n".join(rows) + "\n"

    def to_json(self) -> str:
        return json.dumps({"wu_max": self.wu_max, "M": self.M,
                           "lines": [{"d": ln.d, "N": ln.N, "w": ln.w} for ln in self.lines]})

    @classmethod
    def from_csv(cls, text: str, wu_max: int, M: int | None = None) -> "DistanceSpectrum":
        rows = [r.strip() for r in text.strip().splitlines()]
        if not rows or rows[0].replace(" ", "") != "d,N,w":
            raise ValueError("spectrum CSV must start with header 'd,N,w'")
        lines = tuple(SpectrumLine(*map(int, r.split(","))) for r in rows[1:] if r)
        return cls(lines, wu_max, len(lines) if M is None else M)

    @classmethod
    def from_json(cls, text: str) -> "DistanceSpectrum":
        obj = json.loads(text)
        lines = tuple(SpectrumLine(int(r["d"]), int(r["N"]), int(r["w"])) for r in obj["lines"])
        return cls(lines, int(obj["wu_max"]), int(obj["M"]))


def _from_counts(counts: dict[int, list[int]], M: int, wu_max: int) -> DistanceSpectrum:
    lines = tuple(SpectrumLine(d, n, w) for d, (n, w) in sorted(counts.items())[:M])
    return DistanceSpectrum(lines, wu_max, M)


def merge_spectra(a: DistanceSpectrum, b: DistanceSpectrum) -> DistanceSpectrum:
    """Combine spectra of disjoint sets of information words.

    A truncated spectrum only knows about distances up to its last line, so
    the merge keeps distances covered by both inputs and re-truncates to
    min(M_a, M_b) lines. An empty spectrum with M == 0 is the identity.
    """
    if a.wu_max != b.wu_max:
        raise ValueError(f"wu_max mismatch: {a.wu_max} != {b.wu_max}")
    if a.M == 0 and not a.lines:
        return b
    if b.M == 0 and not b.lines:
        return a
    counts: dict[int, list[int]] = {}
    for ln in list(a.lines) + list(b.lines):
        c = counts.setdefault(ln.d, [0, 0])
        c[0] += ln.N
        c[1] += ln.w

    def cover(s: DistanceSpectrum) -> float:
        # A spectrum holding fewer than M lines is complete at every distance.
        return s.lines[-1].d if len(s.lines) >= s.M and s.lines else float("inf")

    limit = min(cover(a), cover(b))
    M = min(a.M, b.M)
    counts = {d: c for d, c in counts.items() if d <= limit}
    return _from_counts(counts, M, a.wu_max)


# -- exhaustive oracle -------------------------------------------------------

MAX_BRUTE_FORCE_LENGTH = 22


def brute_force_spectrum(perm: Permutation, M: int, spec: RscSpec = LTE_RSC,
                         chunk: int = 1 << 16) -> DistanceSpectrum:
    """First M spectrum lines from encoding all 2^L - 1 nonzero words."""
    L = len(perm)
    if L > MAX_BRUTE_FORCE_LENGTH:
        raise ValueError(f"L={L} too large for exhaustive enumeration (max {MAX_BRUTE_FORCE_LENGTH})")
    if M == 0:
        return DistanceSpectrum((), L, 0)
    shifts = np.arange(L, dtype=np.int64)
    N = np.zeros(3 * L + 4 * spec.memory + 1, dtype=np.int64)
    W = np.zeros_like(N)
    for start in range(1, 1 << L, chunk):
        words = np.arange(start, min(start + chunk, 1 << L), dtype=np.int64)
        bits = (words[:, None] >> shifts) & 1
        d = turbo_weights_batch(bits, perm, spec)
        np.add.at(N, d, 1)
        np.add.at(W, d, bits.sum(axis=1))
    counts = {int(d): [int(N[d]), int(W[d])] for d in np.nonzero(N)[0]}
    return _from_counts(counts, M, L)


# -- sparse search -------------------------------------------------------------

@lru_cache(maxsize=64)
def impulse_masks(L: int, spec: RscSpec = LTE_RSC) -> tuple[int, ...]:
    """Per info position i: parity + tail bits of one encoder for input e_i.

    Bit k < L is the parity at time k; bits L.. L+2m-1 are the tail (x, z)
    pairs. Responses of sparse inputs add by XOR.
    """
    nxt, par, term_in, _ = trellis(spec)
    nxt, par, term_in = nxt.tolist(), par.tolist(), term_in.tolist()
    masks = []
    for i in range(L):
        mask, state = 0, 0
        for k in range(i, L):
            u = 1 if k == i else 0
            if par[state][u]:
                mask |= 1 << k
            state = nxt[state][u]
        for t in range(spec.memory):
            x = term_in[state]
            if x:
                mask |= 1 << (L + 2 * t)
            if par[state][x]:
                mask |= 1 << (L + 2 * t + 1)
            state = nxt[state][x]
        masks.append(mask)
    return tuple(masks)


@lru_cache(maxsize=64)
def _search_tables(L: int, spec: RscSpec = LTE_RSC):
    """Trellis tables plus cost-to-go lower bounds for the pruned search.

    Cost counts 2 per output bit of the constituent encoder (parity or tail)
    and 1 per information bit. togo[k][s] is the least extra cost of any
    completion from state s at time k, with termination at time L.
    """
    nxt, par, term_in, _ = trellis(spec)
    nxt, par, term_in = nxt.tolist(), par.tolist(), term_in.tolist()
    S = spec.n_states
    tail_cost = []
    for s in range(S):
        cost, state = 0, s
        for _ in range(spec.memory):
            x = term_in[state]
            cost += 2 * (x + par[state][x])
            state = nxt[state][x]
        tail_cost.append(cost)
    togo = [[0] * S for _ in range(L + 1)]
    togo[L] = tail_cost[:]
    for k in range(L - 1, -1, -1):
        for s in range(S):
            best = 0 if s == 0 else min(
                u + 2 * par[s][u] + togo[k + 1][nxt[s][u]] for u in (0, 1))
            togo[k][s] = best
    return nxt, par, tail_cost, togo


def low_cost_inputs(L: int, cutoff: int, wu_max: int, spec: RscSpec = LTE_RSC,
                    budget: list[int] | None = None) -> Iterator[tuple[int, ...]]:
    """Yield every info pattern (sorted positions, weight 1..wu_max) for one
    encoder with w + 2*(parity + tail weight) <= cutoff.

    ``budget`` is a one-element list of remaining node visits.
    """
    nxt, par, tail_cost, togo = _search_tables(L, spec)
    if togo[0][0] > cutoff:
        return
    # Leaving state 0 with a 1 costs 1 + 2*parity.
    ns0, step0 = nxt[0][1], 1 + 2 * par[0][1]
    # Explicit stack: a recursive generator pays the nesting depth on every yield.
    # Every pushed node satisfies cost + togo[k][state] <= cutoff.
    stack = [(0, 0, 0, ())]
    while stack:
        k, state, cost, pos = stack.pop()
        if budget is not None:
            budget[0] -= 1
            if budget[0] < 0:
                raise BudgetExceeded("spectrum search node budget exhausted")
        if k == L:
            if pos:
                yield pos
            continue
        if state == 0:
            if pos:
                yield pos
            if len(pos) >= wu_max:
                continue
            # Jump over zeros to the next 1.
            c = cost + step0
            for j in range(L - 1, k - 1, -1):
                if c + togo[j + 1][ns0] <= cutoff:
                    stack.append((j + 1, ns0, c, pos + (j,)))
            continue
        ns = nxt[state][0]
        c = cost + 2 * par[state][0]
        if c + togo[k + 1][ns] <= cutoff:
            stack.append((k + 1, ns, c, pos))
        if len(pos) < wu_max:
            ns = nxt[state][1]
            c = cost + 1 + 2 * par[state][1]
            if c + togo[k + 1][ns] <= cutoff:
                stack.append((k + 1, ns, c, pos + (k,)))


def default_terms(L: int) -> int:
    """Number of spectrum lines used per length: 9, then 7 from 120, 5 from 296."""
    if L >= 296:
        return 5
    if L >= 120:
        return 7
    return 9


@lru_cache(maxsize=64)
def packed_masks(L: int, spec: RscSpec = LTE_RSC) -> np.ndarray:
    """Impulse responses as rows of uint64 words; row L is an all-zero pad."""
    n_words = (L + 2 * spec.memory + 63) // 64
    out = np.zeros((L + 1, n_words), dtype=np.uint64)
    for i, m in enumerate(impulse_masks(L, spec)):
        for k in range(n_words):
            out[i, k] = (m >> (64 * k)) & 0xFFFFFFFFFFFFFFFF
    out.setflags(write=False)
    return out


def _encoder_weight(pos: np.ndarray, masks: np.ndarray, lookup: np.ndarray | None = None,
                    chunk: int = 1 << 15) -> np.ndarray:
    """Popcount of the XOR of the impulse responses selected by each row,
    optionally after mapping positions through ``lookup``."""
    out = np.empty(len(pos), dtype=np.int64)
    for s in range(0, len(pos), chunk):
        rows = pos[s:s + chunk]
        if lookup is not None:
            rows = lookup[rows]
        acc = np.bitwise_xor.reduce(masks[rows], axis=1)
        out[s:s + chunk] = np.bitwise_count(acc).sum(axis=1)
    return out


def _collect(patterns: Iterator[tuple[int, ...]], L: int, width: int,
             max_patterns: int | None, cutoff: int, chunk: int = 1 << 16) -> np.ndarray:
    """Pack patterns into a small-int matrix padded with L, in bounded-size blocks."""
    dtype = np.int16 if L < np.iinfo(np.int16).max else np.int32
    blocks, buf, n = [], np.full((chunk, width), L, dtype=dtype), 0
    total = 0
    for p in patterns:
        buf[n, :len(p)] = p
        n += 1
        total += 1
        if max_patterns is not None and total > max_patterns:
            raise BudgetExceeded(f"more than {max_patterns} patterns needed at cutoff {cutoff}")
        if n == chunk:
            blocks.append(buf)
            buf, n = np.full((chunk, width), L, dtype=dtype), 0
    blocks.append(buf[:n])
    return np.concatenate(blocks)


class PatternTable:
    """Every info pattern with w + 2*e1 <= cutoff for one constituent encoder,
    as a padded position matrix sorted by that cost.

    Depends only on L, wu_max and the constituent code, so one table serves
    every interleaver of that length.
    """

    def __init__(self, L: int, wu_max: int, cutoff: int, spec: RscSpec = LTE_RSC,
                 max_patterns: int | None = None):
        self.L, self.wu_max, self.cutoff, self.spec = L, wu_max, cutoff, spec
        pos = _collect(low_cost_inputs(L, cutoff, wu_max, spec), L, max(1, wu_max),
                       max_patterns, cutoff)
        weight = (pos < L).sum(axis=1, dtype=np.int16)
        enc = _encoder_weight(pos, packed_masks(L, spec)).astype(np.int16)
        cost = weight.astype(np.int32) + 2 * enc
        order = np.argsort(cost, kind="stable")
        self.positions = pos[order]
        self.weight = weight[order]
        self.enc_weight = enc[order]
        self.cost = cost[order]

    def __len__(self) -> int:
        return len(self.cost)

    def prefix(self, cutoff: int) -> int:
        """Number of rows with cost <= cutoff."""
        if cutoff > self.cutoff:
            raise ValueError("table was built for a smaller cutoff")
        return int(np.searchsorted(self.cost, cutoff, side="right"))


_TABLES: dict[tuple[int, int, RscSpec], PatternTable] = {}
_LAST_CUTOFF: dict[tuple[int, int, RscSpec], int] = {}


def pattern_table(L: int, wu_max: int, cutoff: int, spec: RscSpec = LTE_RSC,
                  max_patterns: int | None = None) -> PatternTable:
    """Cached :class:`PatternTable` covering at least ``cutoff``."""
    key = (L, wu_max, spec)
    table = _TABLES.get(key)
    if table is None or table.cutoff < cutoff:
        table = PatternTable(L, wu_max, cutoff, spec, max_patterns)
        _TABLES[key] = table
    return table


def _weights_upto(perm: Permutation, table: PatternTable, cutoff: int):
    """Codeword and info weights of every word with d <= cutoff."""
    L = table.L
    masks = packed_masks(L, table.spec)
    fwd = np.append(perm.as_array(), L)
    inv = np.empty(L + 1, dtype=np.int64)
    inv[fwd] = np.arange(L + 1)
    n = table.prefix(cutoff)
    pos = table.positions[:n]
    w, e = table.weight[:n].astype(np.int64), table.enc_weight[:n].astype(np.int64)
    # Rows as encoder-1 inputs; encoder 2 sees info position i at time inv[i].
    d1 = w + e + _encoder_weight(pos, masks, inv)
    # Rows as encoder-2 inputs at interleaved times k; info positions are fwd[k].
    e1 = _encoder_weight(pos, masks, fwd)
    # Words with w + 2*e1 <= cutoff were already counted in the first pass.
    fresh = w + 2 * e1 > cutoff
    d = np.concatenate([d1, (w + e1 + e)[fresh]])
    ww = np.concatenate([w, w[fresh]])
    keep = d <= cutoff
    return d[keep], ww[keep]


def distance_spectrum(perm: Permutation, M: int, wu_max: int = 10,
                      spec: RscSpec = LTE_RSC, max_patterns: int | None = None,
                      start_cutoff: int | None = None) -> DistanceSpectrum:
    """Exact first M lines over information words of weight 1..wu_max.

    Raises the distance cutoff until at least M distinct weights fall under
    it. ``max_patterns`` caps the pattern table size; exceeding it raises
    :class:`BudgetExceeded`.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    if wu_max < 1:
        raise ValueError("wu_max must be >= 1")
    L = len(perm)
    wu_max = min(wu_max, L)
    ceiling = 3 * L + 4 * spec.memory
    key = (L, wu_max, spec)
    if start_cutoff is None:
        # A budgeted run must not depend on earlier calls, so it skips the hint.
        hint = None if max_patterns is not None else _LAST_CUTOFF.get(key)
        start_cutoff = 2 * M + 4 if hint is None else hint
    cutoff = min(start_cutoff, ceiling)
    while True:
        table = pattern_table(L, wu_max, cutoff, spec, max_patterns)
        # Checked against this cutoff so a larger cached table does not matter.
        if max_patterns is not None and table.prefix(cutoff) > max_patterns:
            raise BudgetExceeded(f"more than {max_patterns} patterns needed at cutoff {cutoff}")
        d, w = _weights_upto(perm, table, cutoff)
        found = np.unique(d)
        if len(found) >= M or cutoff >= ceiling:
            counts = {}
            for dist in found[:M]:
                sel = d == dist
                counts[int(dist)] = [int(sel.sum()), int(w[sel].sum())]
            if len(found) >= M:
                _LAST_CUTOFF[key] = int(found[M - 1])
            return _from_counts(counts, M, wu_max)
        cutoff = min(ceiling, cutoff + max(1, M - len(found)))


def clear_cache() -> None:
    _TABLES.clear()
    _LAST_CUTOFF.clear()
