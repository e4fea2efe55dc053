"""Polynomials of degree <= 3 over Z_L and the permutations they induce."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

import numpy as np


class NotBijective(ValueError):
    """Raised when a polynomial does not permute Z_L."""


@dataclass(frozen=True, order=True)
class PolyModL:
    """q0 + q1 x + q2 x^2 + q3 x^3 (mod L), coefficients kept reduced."""

    modulus: int
    q0: int = 0
    q1: int = 0
    q2: int = 0
    q3: int = 0

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError(f"modulus must be >= 2, got {self.modulus}")
        for name in ("q0", "q1", "q2", "q3"):
            object.__setattr__(self, name, getattr(self, name) % self.modulus)

    @classmethod
    def from_coeffs(cls, modulus: int, q1: int, q2: int = 0, q3: int = 0) -> "PolyModL":
        return cls(modulus, 0, q1, q2, q3)

    @property
    def coeffs(self) -> tuple[int, int, int]:
        """(q1, q2, q3), the part that search and equivalence care about."""
        return (self.q1, self.q2, self.q3)

    def degree(self) -> int:
        for k, q in ((3, self.q3), (2, self.q2), (1, self.q1)):
            if q:
                return k
        return 0

    def __call__(self, x: int) -> int:
        return eval_poly(self, x)

    def __add__(self, other: "PolyModL") -> "PolyModL":
        _check_same_modulus(self, other)
        return PolyModL(self.modulus, self.q0 + other.q0, self.q1 + other.q1,
                        self.q2 + other.q2, self.q3 + other.q3)

    def __sub__(self, other: "PolyModL") -> "PolyModL":
        _check_same_modulus(self, other)
        return PolyModL(self.modulus, self.q0 - other.q0, self.q1 - other.q1,
                        self.q2 - other.q2, self.q3 - other.q3)

    def __str__(self) -> str:
        return format_poly(self)


@dataclass(frozen=True)
class Permutation:
    """Bijection on {0, ..., L-1}; ``forward[x]`` is the image of x."""

    forward: tuple[int, ...]

    def __post_init__(self):
        fwd = tuple(int(v) for v in self.forward)
        if sorted(fwd) != list(range(len(fwd))):
            raise NotBijective("sequence is not a bijection on {0..L-1}")
        object.__setattr__(self, "forward", fwd)

    @property
    def length(self) -> int:
        return len(self.forward)

    def __len__(self) -> int:
        return len(self.forward)

    def __getitem__(self, i: int) -> int:
        return self.forward[i]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.forward, dtype=np.int64)

    @classmethod
    def identity(cls, length: int) -> "Permutation":
        return cls(tuple(range(length)))


def _check_same_modulus(p1: PolyModL, p2: PolyModL) -> None:
    if p1.modulus != p2.modulus:
        raise ValueError(f"modulus mismatch: {p1.modulus} != {p2.modulus}")


def eval_poly(p: PolyModL, x: int) -> int:
    if not 0 <= x < p.modulus:
        raise ValueError(f"x={x} outside [0, {p.modulus})")
    # Python ints are unbounded, so Horner never overflows.
    L = p.modulus
    return (((p.q3 * x + p.q2) * x + p.q1) * x + p.q0) % L


def _eval_all(p: PolyModL) -> np.ndarray:
    L = p.modulus
    x = np.arange(L, dtype=np.int64)
    # Reduce after each Horner step so values stay below L^2 (safe in int64 for L < 2^31).
    acc = np.full(L, p.q3, dtype=np.int64)
    for q in (p.q2, p.q1, p.q0):
        acc = (acc * x + q) % L
    return acc


def as_permutation(p: PolyModL) -> Permutation:
    values = _eval_all(p)
    if np.bincount(values, minlength=p.modulus).max() != 1:
        raise NotBijective(f"{format_poly(p)} does not permute Z_{p.modulus}")
    return Permutation(tuple(values.tolist()))


def is_permutation_polynomial(p: PolyModL) -> bool:
    values = _eval_all(p)
    return bool(np.bincount(values, minlength=p.modulus).max() == 1)


def triangular_class(n: int) -> int:
    """Residue of 1 + 2 + ... + n modulo 3 (always 0 or 1)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return (n * (n + 1) // 2) % 3


@lru_cache(maxsize=None)
def _npp_triples(L: int) -> tuple[tuple[int, int, int], ...]:
    found = {(0, 0, 0)}
    if L % 2 == 0:
        h = L // 2
        found.add((h, h, 0))          # quadratic null polynomial
        found.add((h, 0, h))          # case I
        found.add((0, h, h))          # case II
    if L % 3 == 0:
        t = L // 3
        found.add((2 * t, 0, t))      # case III
        found.add((t, 0, 2 * t))      # case IV
    if L % 6 == 0:
        s, t, h = L // 6, L // 3, L // 2
        found.add((5 * s, 0, s))          # V
        found.add((t, h, s))              # VI
        found.add((s, h, t))              # VII
        found.add((5 * s, h, 2 * t))      # VIII
        found.add((s, 0, 5 * s))          # IX
        found.add((2 * t, h, 5 * s))      # X
    return tuple(sorted(found))


def npp_enumerate(L: int) -> frozenset[PolyModL]:
    """All null polynomials q1 x + q2 x^2 + q3 x^3 (q0 = 0) modulo L.

    Built from the closed-form families (zero, the quadratic L/2 x + L/2 x^2,
    and the ten cubic cases), so the size is gcd(L, 6) * gcd(L, 2).
    """
    if L < 2:
        raise ValueError("L must be >= 2")
    return frozenset(PolyModL(L, 0, *t) for t in _npp_triples(L))


def npp_triples(L: int) -> tuple[tuple[int, int, int], ...]:
    """Same set as :func:`npp_enumerate`, as sorted (q1, q2, q3) tuples."""
    return _npp_triples(L)


def quadratic_npp_triples(L: int) -> tuple[tuple[int, int, int], ...]:
    """Null polynomials of degree <= 2: the zero polynomial and, for even L, L/2 x + L/2 x^2."""
    return tuple(t for t in _npp_triples(L) if t[2] == 0)


def equivalent(p1: PolyModL, p2: PolyModL) -> bool:
    """True when p1 and p2 induce the same function on Z_L."""
    _check_same_modulus(p1, p2)
    if p1.q0 != p2.q0:
        return False
    diff = p1 - p2
    return diff.coeffs in set(_npp_triples(p1.modulus))


def equivalence_class(p: PolyModL) -> list[PolyModL]:
    L = p.modulus
    return sorted({PolyModL(L, p.q0, p.q1 + a, p.q2 + b, p.q3 + c)
                   for a, b, c in _npp_triples(L)}, key=lambda r: r.coeffs)


def canonical(p: PolyModL) -> PolyModL:
    """Class member with the lexicographically smallest (q1, q2, q3)."""
    return equivalence_class(p)[0]


def effective_degree(p: PolyModL) -> int:
    return min(member.degree() for member in equivalence_class(p))


def inverse_permutation(perm: Permutation) -> Permutation:
    inv = [0] * len(perm)
    for x, y in enumerate(perm.forward):
        inv[y] = x
    return Permutation(tuple(inv))


def compose(outer: Permutation, inner: Permutation) -> Permutation:
    """x -> outer[inner[x]]."""
    if len(outer) != len(inner):
        raise ValueError("length mismatch")
    return Permutation(tuple(outer.forward[v] for v in inner.forward))


# -- text format: "3x+8x^2+16x^3" -------------------------------------------

_TERM = re.compile(r"^(\d*)\*?(x(?:\^([0-3]))?)?$")


def format_poly(p: PolyModL) -> str:
    parts = []
    for k, q in enumerate((p.q0, p.q1, p.q2, p.q3)):
        if not q:
            continue
        if k == 0:
            parts.append(str(q))
        else:
            mono = "x" if k == 1 else f"x^{k}"
            parts.append(mono if q == 1 else f"{q}{mono}")
    return "+".join(parts) if parts else "0"


def parse_poly(text: str, modulus: int) -> PolyModL:
    """Parse ``"13x+10x^2"``-style text; unit coefficients and spaces optional."""
    s = text.replace(" ", "").replace("**", "^")
    if not s:
        raise ValueError("empty polynomial string")
    coeffs = [0, 0, 0, 0]
    for term in s.split("+"):
        m = _TERM.match(term)
        if not term or m is None or (not m.group(1) and not m.group(2)):
            raise ValueError(f"malformed term {term!r} in polynomial {text!r}")
        digits, mono, power = m.groups()
        k = 0 if mono is None else int(power or 1)
        coeffs[k] += int(digits) if digits else 1
    return PolyModL(modulus, *coeffs)


def random_permutation(length: int, rng: np.random.Generator) -> Permutation:
    return Permutation(tuple(rng.permutation(length).tolist()))


def permutation_from_sequence(values: Sequence[int] | Iterable[int]) -> Permutation:
    return Permutation(tuple(values))
