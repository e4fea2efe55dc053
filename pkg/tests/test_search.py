from math import gcd

import numpy as np
import pytest

from ppturbo.bounds import tub
from ppturbo.encoder import code_rate
from ppturbo.poly import PolyModL, as_permutation, effective_degree, is_permutation_polynomial
from ppturbo.search import (SearchConfig, SearchError, candidate_triples, class_count, class_size,
                            dmin_imposed_search, enumerate_candidates, largest_spread_set,
                            optimize, report_csv_row)
from ppturbo.spectrum import distance_spectrum
from ppturbo.spread import spread_D


@pytest.fixture(scope="module")
def l40_cubic():
    return optimize(SearchConfig(L=40, degree=3, M=9))


@pytest.mark.parametrize("L", [40, 48, 54, 120])
def test_class_counts_closed_form(L):
    assert class_count(L, 3) == L ** 3 // (gcd(L, 6) * gcd(L, 2))
    assert class_count(L, 2) == L ** 2 // gcd(L, 2)
    if L <= 54:
        assert candidate_triples(L, 3)[1] == class_count(L, 3)
        assert candidate_triples(L, 2)[1] == class_count(L, 2)


def test_class_counts_l40():
    assert candidate_triples(40, 3)[1] == 16000
    assert candidate_triples(40, 2)[1] == 800


@pytest.mark.parametrize("L, ratio", [(40, 20), (45, 15), (48, 8)])
def test_degree_ratio(L, ratio):
    assert class_count(L, 3) * class_size(L, 3) == L ** 3
    assert class_count(L, 3) / class_count(L, 2) == ratio == L / gcd(L, 6)


@pytest.mark.parametrize("L", [6, 8, 9, 12, 16])
def test_exhaustive_partition(L):
    perms = {}
    for q1 in range(L):
        for q2 in range(L):
            for q3 in range(L):
                p = PolyModL(L, 0, q1, q2, q3)
                if is_permutation_polynomial(p) and effective_degree(p) >= 2:
                    perms.setdefault(as_permutation(p).forward, []).append(p)
    cands = enumerate_candidates(L, 3)
    forwards = [as_permutation(c).forward for c in cands]
    assert len(set(forwards)) == len(forwards)
    assert set(forwards) == set(perms)
    # Representative is the lexicographic minimum of its class.
    for c, f in zip(cands, forwards):
        assert c.coeffs == min(p.coeffs for p in perms[f])
    assert [c.coeffs for c in cands] == sorted(c.coeffs for c in cands)


def test_quadratic_candidates_have_no_cubic_term():
    assert all(c.q3 == 0 and c.q2 != 0 for c in enumerate_candidates(40, 2))


def test_largest_spread_set():
    d_max, surv = largest_spread_set(enumerate_candidates(40, 2))
    assert d_max == 4 and surv
    assert all(spread_D(as_permutation(p)).d_value == 4 for p in surv)
    one = [PolyModL.from_coeffs(40, 13, 10)]
    assert largest_spread_set(one) == (4, one)
    with pytest.raises(SearchError):
        largest_spread_set([])


def test_l120_cubic_spread_exceeds_quadratic():
    d3, _ = largest_spread_set(enumerate_candidates(120, 3))
    d2, _ = largest_spread_set(enumerate_candidates(120, 2))
    assert (d3, d2) == (12, 10)


def test_l40_quadratic_search():
    r = optimize(SearchConfig(L=40, degree=2, M=9))
    assert str(r.winner) == "13x+10x^2"
    assert r.winner_D == 4 and r.optimum_count == 4
    assert round(r.tub_ber * 1e7, 4) == 0.9336


def test_l40_cubic_search(l40_cubic):
    r = l40_cubic
    assert str(r.winner) == "3x+8x^2+16x^3"
    assert r.winner_D == 4 and r.optimum_count == 4
    assert r.tub_ber * 1e7 == pytest.approx(0.3970, abs=1e-4)
    assert r.tub_fer * 1e5 == pytest.approx(0.0432, abs=1e-4)
    assert r.complete


def test_winner_bound_recomputes(l40_cubic):
    r = l40_cubic
    spec = distance_spectrum(as_permutation(r.winner), r.config.M, r.config.wu_max)
    assert spec == r.spectrum
    res = tub(spec, 40, code_rate(40), r.config.snr_db, r.config.channel)
    assert (res.tub_ber, res.tub_fer) == (r.tub_ber, r.tub_fer)


def test_count_divisibility(l40_cubic):
    assert l40_cubic.optimum_count % (gcd(40, 6) * gcd(40, 2)) == 0
    r = optimize(SearchConfig(L=48, degree=2, M=9))
    assert r.optimum_count % gcd(48, 2) == 0 and r.optimum_count == 2


def test_determinism_across_workers(l40_cubic):
    r = optimize(SearchConfig(L=40, degree=3, M=9), jobs=2)
    assert report_csv_row(r) == report_csv_row(l40_cubic)
    assert r.as_dict() == l40_cubic.as_dict()


def test_floor_two_is_exhaustive():
    cfg = SearchConfig(L=24, degree=2, M=5, d_floor=2)
    r = dmin_imposed_search(cfg)
    best = None
    for c in enumerate_candidates(24, 2):
        s = distance_spectrum(as_permutation(c), 5)
        v = tub(s, 24, code_rate(24), 5.0, "awgn").tub_ber
        if best is None or v < best[0]:
            best = (v, c)
    assert r.winner == best[1] and r.tub_ber == best[0]
    assert r.survivors == r.pp_classes


def test_dmin_needs_floor():
    with pytest.raises(SearchError):
        dmin_imposed_search(SearchConfig(L=40, degree=2))


def test_from_table_settings():
    cfg = SearchConfig.from_table(3, 200, 3)
    assert (cfg.snr_db, cfg.M, cfg.d_floor) == (3.0, 7, 14)
    cfg = SearchConfig.from_table(4, 64, 3)
    assert cfg.channel.value == "rayleigh" and cfg.snr_db == 7.5


def test_config_validation():
    for bad in [dict(L=40, degree=4), dict(L=40, objective="ser"), dict(L=1),
                dict(L=40, M=0), dict(L=40, wu_max=0), dict(L=40, d_floor=1),
                dict(L=40, snr_db=float("inf"))]:
        with pytest.raises(SearchError):
            SearchConfig(**bad)


def test_unreachable_floor():
    with pytest.raises(SearchError):
        optimize(SearchConfig(L=16, degree=2, d_floor=40))


def test_reduced_wu_max_reports_stability():
    r = optimize(SearchConfig(L=40, degree=2, M=9, wu_max=6))
    assert r.wu_max_stable is not None
    assert r.config.wu_max == 6


def test_deadline_marks_partial():
    r = optimize(SearchConfig(L=32, degree=3, M=9, snr_db=1.0, d_floor=2, deadline_s=0.0))
    assert not r.complete
    assert r.spectra_computed == 16 and r.winner is not None


@pytest.mark.slow
def test_dmin_imposed_l200():
    # About 25 minutes on one core: 208 candidates reach D >= 14.
    r = dmin_imposed_search(SearchConfig.from_table(3, 200, 3))
    assert str(r.winner) == "3x+80x^3" and r.winner_D == 14 and r.optimum_count == 8
    assert r.tub_ber * 1e7 == pytest.approx(0.0459, abs=1e-4)
    assert r.tub_fer * 1e5 == pytest.approx(0.0434, abs=1e-4)
