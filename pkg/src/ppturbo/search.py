"""Largest-spread, best-spectrum search over quadratic and cubic permutation polynomials."""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .bounds import Channel, tub
from .encoder import code_rate
from .poly import PolyModL, Permutation, npp_triples, quadratic_npp_triples
from .spectrum import BudgetExceeded, DistanceSpectrum, default_terms, distance_spectrum
from .spread import spread_value
from .tables import golden_row

log = logging.getLogger(__name__)

# Survivors are scored in fixed-size batches so the work done never depends
# on the number of workers.
BATCH = 16
LOWER_BOUND_TERMS = 3
NEAR_TIE_RTOL = 1e-12


class SearchError(ValueError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    L: int
    degree: int = 3
    channel: Channel = Channel.AWGN
    objective: str = "ber"
    snr_db: float = 5.0
    M: int | None = None
    wu_max: int = 10
    d_floor: int | None = None
    deadline_s: float | None = None
    max_patterns: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "channel", Channel(self.channel))
        if self.degree not in (2, 3):
            raise SearchError(f"degree must be 2 or 3, got {self.degree}")
        if self.objective not in ("ber", "fer"):
            raise SearchError(f"objective must be 'ber' or 'fer', got {self.objective!r}")
        if self.L < 2:
            raise SearchError("L must be >= 2")
        if not math.isfinite(self.snr_db):
            raise SearchError("snr_db must be finite")
        if self.M is None:
            object.__setattr__(self, "M", default_terms(self.L))
        if self.M < 1:
            raise SearchError("M must be >= 1")
        if self.wu_max < 1:
            raise SearchError("wu_max must be >= 1")
        if self.d_floor is not None and self.d_floor < 2:
            raise SearchError("d_floor must be >= 2")

    @classmethod
    def from_table(cls, table: int, L: int, degree: int, **overrides) -> "SearchConfig":
        """Row settings of a published table; tables 3/5 floor D at the QPP maximum."""
        row = golden_row(table, L)
        kw = dict(L=L, degree=degree, channel=row.channel, objective=row.objective,
                  snr_db=row.snr_db, M=row.num_dist)
        if row.dmin_imposed and degree == 3:
            kw["d_floor"] = row.qpp.D
        kw.update(overrides)
        return cls(**kw)


@dataclass
class SearchReport:
    config: SearchConfig
    winner: PolyModL | None
    d_max: int
    winner_D: int
    tub_ber: float
    tub_fer: float
    spectrum: DistanceSpectrum | None
    optimum_count: int
    optimal_classes: list[PolyModL]
    classes_total: int
    pp_classes: int
    survivors: int
    spectra_computed: int
    complete: bool = True
    wu_max_stable: bool | None = None
    near_ties: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "L": self.config.L,
            "degree": self.config.degree,
            "channel": self.config.channel.value,
            "objective": self.config.objective,
            "snr_db": self.config.snr_db,
            "num_dist": self.config.M,
            "wu_max": self.config.wu_max,
            "d_floor": self.config.d_floor,
            "poly": str(self.winner) if self.winner else None,
            "D": self.winner_D,
            "d_max": self.d_max,
            "tub_ber": self.tub_ber,
            "tub_fer": self.tub_fer,
            "tub_ber_e7": self.tub_ber * 1e7,
            "tub_fer_e5": self.tub_fer * 1e5,
            "count": self.optimum_count,
            "optimal_classes": [str(p) for p in self.optimal_classes],
            "spectrum": self.spectrum.as_tuples() if self.spectrum else [],
            "classes_total": self.classes_total,
            "pp_classes": self.pp_classes,
            "survivors": self.survivors,
            "spectra_computed": self.spectra_computed,
            "complete": self.complete,
            "wu_max_stable": self.wu_max_stable,
            "near_ties": self.near_ties,
        }


# -- candidate enumeration ----------------------------------------------------

def null_group(L: int, degree: int) -> np.ndarray:
    """Null polynomials acting on the search space, as an (n, 3) array."""
    triples = npp_triples(L) if degree == 3 else quadratic_npp_triples(L)
    return np.array(triples, dtype=np.int64)


def class_size(L: int, degree: int) -> int:
    """gcd(L,6)*gcd(L,2) for cubic searches, gcd(L,2) for quadratic ones."""
    return len(null_group(L, degree))


def class_count(L: int, degree: int) -> int:
    """Number of equivalence classes of (q1, .., q_degree) before any filtering."""
    return L ** degree // class_size(L, degree)


def _canonical_triples(L: int, degree: int, q1: int) -> np.ndarray:
    """Triples with this q1 that are the lexicographic minimum of their class."""
    group = null_group(L, degree)
    n3 = L if degree == 3 else 1
    q2, q3 = np.meshgrid(np.arange(L), np.arange(n3), indexing="ij")
    t = np.stack([np.full(q2.size, q1), q2.ravel(), q3.ravel()], axis=1)
    key = (t[:, 0] * L + t[:, 1]) * L + t[:, 2]
    keep = np.ones(len(t), dtype=bool)
    for n in group[1:]:
        s = (t + n) % L
        keep &= key < (s[:, 0] * L + s[:, 1]) * L + s[:, 2]
    return t[keep]


def _nonlinear(t: np.ndarray, L: int, degree: int) -> np.ndarray:
    """True where no member of the class has q2 = q3 = 0."""
    ok = np.ones(len(t), dtype=bool)
    for n in null_group(L, degree):
        ok &= ((t[:, 1] + n[1]) % L != 0) | ((t[:, 2] + n[2]) % L != 0)
    return ok


def _evaluate(t: np.ndarray, L: int, modulus: int | None = None) -> np.ndarray:
    """Values of each polynomial at x = 0..m-1, reduced mod m (m defaults to L)."""
    m = L if modulus is None else modulus
    x = np.arange(m, dtype=np.int64)
    q1, q2, q3 = (t[:, k:k + 1] % m for k in range(3))
    return (((q3 * x + q2) % m * x + q1) % m * x) % m


def _is_bijective(values: np.ndarray) -> np.ndarray:
    m = values.shape[1]
    return (np.sort(values, axis=1) == np.arange(m)).all(axis=1)


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def candidate_triples(L: int, degree: int) -> tuple[np.ndarray, int]:
    """Canonical PP classes with effective degree >= 2, plus the unfiltered class count."""
    chunks, total = [], 0
    primes = [p for p in _prime_factors(L) if p < L]
    for q1 in range(L):
        t = _canonical_triples(L, degree, q1)
        total += len(t)
        t = t[_nonlinear(t, L, degree)]
        # A PP mod L is a PP mod every divisor; cheap screen before the full check.
        for p in primes:
            t = t[_is_bijective(_evaluate(t, L, p))]
        if len(t):
            t = t[_is_bijective(_evaluate(t, L))]
        chunks.append(t)
    out = np.concatenate(chunks) if chunks else np.zeros((0, 3), dtype=np.int64)
    return out, total


def enumerate_candidates(L: int, degree: int) -> list[PolyModL]:
    """One canonical representative per equivalence class of permutation
    polynomials with q0 = 0 and effective degree >= 2, in lexicographic order."""
    triples, _ = candidate_triples(L, degree)
    return [PolyModL(L, 0, *map(int, t)) for t in triples]


# -- spread filtering -----------------------------------------------------------

def _spreads(L: int, triples: np.ndarray) -> list[int]:
    out = []
    for s in range(0, len(triples), 4096):
        values = _evaluate(triples[s:s + 4096], L)
        out.extend(spread_value(v) for v in values)
    return out


def largest_spread_set(candidates: Sequence[PolyModL], d_floor: int | None = None
                       ) -> tuple[int, list[PolyModL]]:
    """(max D, survivors): those attaining the max, or all with D >= d_floor."""
    if not candidates:
        raise SearchError("empty candidate set")
    L = candidates[0].modulus
    triples = np.array([p.coeffs for p in candidates], dtype=np.int64)
    D = _spreads(L, triples)
    d_max = max(D)
    if d_floor is None:
        return d_max, [p for p, d in zip(candidates, D) if d == d_max]
    return d_max, [p for p, d in zip(candidates, D) if d >= d_floor]


# -- spectrum evaluation ----------------------------------------------------------

def _perm(L: int, coeffs: Sequence[int]) -> Permutation:
    return Permutation(tuple(_evaluate(np.array([coeffs]), L)[0].tolist()))


def _objective(spec: DistanceSpectrum, cfg: SearchConfig) -> tuple[float, float, float]:
    res = tub(spec, cfg.L, code_rate(cfg.L), cfg.snr_db, cfg.channel)
    value = res.tub_ber if cfg.objective == "ber" else res.tub_fer
    return value, res.tub_ber, res.tub_fer


def _lower_bound_task(args):
    cfg, coeffs = args
    m = min(cfg.M, LOWER_BOUND_TERMS)
    spec = distance_spectrum(_perm(cfg.L, coeffs), m, cfg.wu_max, max_patterns=cfg.max_patterns)
    return _objective(spec, cfg)[0]


def _full_task(args):
    cfg, coeffs = args
    spec = distance_spectrum(_perm(cfg.L, coeffs), cfg.M, cfg.wu_max, max_patterns=cfg.max_patterns)
    return spec, _objective(spec, cfg)


def _spread_task(args):
    L, triples = args
    return _spreads(L, triples)


class _Runner:
    """Map tasks inline or on a process pool; results always come back in order."""

    def __init__(self, jobs: int):
        self.jobs = max(1, int(jobs))
        self.pool = ProcessPoolExecutor(self.jobs) if self.jobs > 1 else None

    def map(self, fn, items: Iterable) -> list:
        items = list(items)
        if self.pool is None:
            return [fn(x) for x in items]
        chunk = max(1, len(items) // (4 * self.jobs))
        return list(self.pool.map(fn, items, chunksize=chunk))

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()


def optimize(cfg: SearchConfig, jobs: int = 1) -> SearchReport:
    """Run the full search for one configuration.

    Survivors of the spread filter are ranked by a cheap lower bound (the
    bound restricted to the first few spectrum lines, which can only grow
    as lines are added). Full spectra are then computed in that order until
    the lower bound of the next batch exceeds the best objective found, so
    every candidate that could tie or win is evaluated exactly.
    """
    t0 = time.monotonic()
    L = cfg.L
    triples, total = candidate_triples(L, cfg.degree)
    if not len(triples):
        raise SearchError(f"no permutation polynomial candidates for L={L}")
    runner = _Runner(jobs)
    try:
        blocks = [triples[s:s + 1024] for s in range(0, len(triples), 1024)]
        D = np.concatenate([np.array(r, dtype=np.int64) for r in
                            runner.map(_spread_task, [(L, b) for b in blocks])])
        d_max = int(D.max())
        floor = d_max if cfg.d_floor is None else cfg.d_floor
        surv = triples[D >= floor]
        surv_D = D[D >= floor]
        if not len(surv):
            raise SearchError(f"no candidate reaches D >= {floor}")
        coeff_list = [tuple(map(int, t)) for t in surv]

        lbs = runner.map(_lower_bound_task, [(cfg, c) for c in coeff_list])
        order = sorted(range(len(surv)), key=lambda i: (lbs[i], coeff_list[i]))

        best = math.inf
        results: dict[int, tuple] = {}
        complete = True
        pos = 0
        while pos < len(order):
            if lbs[order[pos]] > best * (1 + NEAR_TIE_RTOL):
                break
            # The first batch always runs so a partial report has a candidate.
            if results and cfg.deadline_s is not None and time.monotonic() - t0 > cfg.deadline_s:
                complete = False
                log.warning("deadline reached after %d spectra; report is partial", len(results))
                break
            batch = order[pos:pos + BATCH]
            for i, res in zip(batch, runner.map(_full_task, [(cfg, coeff_list[i]) for i in batch])):
                results[i] = res
                best = min(best, res[1][0])
            pos += BATCH
    finally:
        runner.close()

    exact = [i for i, r in results.items() if r[1][0] == best]
    near = [i for i, r in results.items()
            if r[1][0] != best and abs(r[1][0] - best) <= NEAR_TIE_RTOL * best]
    near_ties = []
    for i in sorted(near, key=lambda i: coeff_list[i]):
        msg = (f"near tie grouped: {PolyModL(L, 0, *coeff_list[i])} "
               f"objective {results[i][1][0]!r} vs best {best!r}")
        log.info(msg)
        near_ties.append(msg)
    optimal = sorted(exact + near, key=lambda i: coeff_list[i])
    win = optimal[0]
    spec, (_, ber, fer) = results[win]
    winner = PolyModL(L, 0, *coeff_list[win])

    stable = None
    if cfg.wu_max < 10:
        lower = distance_spectrum(_perm(L, coeff_list[win]), cfg.M, max(1, cfg.wu_max - 1),
                                  max_patterns=cfg.max_patterns)
        stable = lower.as_tuples() == spec.as_tuples()

    return SearchReport(
        config=cfg, winner=winner, d_max=d_max, winner_D=int(surv_D[win]),
        tub_ber=ber, tub_fer=fer, spectrum=spec,
        optimum_count=len(optimal) * class_size(L, cfg.degree),
        optimal_classes=[PolyModL(L, 0, *coeff_list[i]) for i in optimal],
        classes_total=total, pp_classes=len(triples), survivors=len(surv),
        spectra_computed=len(results), complete=complete, wu_max_stable=stable,
        near_ties=near_ties,
    )


def dmin_imposed_search(cfg: SearchConfig, jobs: int = 1) -> SearchReport:
    if cfg.d_floor is None:
        raise SearchError("dmin_imposed_search needs d_floor")
    return optimize(cfg, jobs)


REPORT_CSV_HEADER = "L,SNR_dB,num_dist,poly,D,TUB_BER_e7,TUB_FER_e5,TUB_BER,TUB_FER,count"


def report_csv_row(r: SearchReport) -> str:
    return (f"{r.config.L},{r.config.snr_db:g},{r.config.M},{r.winner},{r.winner_D},"
            f"{r.tub_ber * 1e7:.4f},{r.tub_fer * 1e5:.4f},{r.tub_ber:.6e},{r.tub_fer:.6e},"
            f"{r.optimum_count}")


def report_to_json_dict(r: SearchReport) -> dict:
    d = r.as_dict()
    d["config"] = {k: (v.value if isinstance(v, Channel) else v) for k, v in asdict(r.config).items()}
    return d
