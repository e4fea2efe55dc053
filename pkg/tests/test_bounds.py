import math
from fractions import Fraction

import mpmath
import pytest

from ppturbo.bounds import Channel, snr_linear, tub, tub_awgn, tub_rayleigh
from ppturbo.encoder import code_rate
from ppturbo.spectrum import DistanceSpectrum, SpectrumLine

L40_QPP = DistanceSpectrum(tuple(SpectrumLine(*t) for t in [
    (12, 1, 2), (13, 2, 2), (14, 2, 4), (15, 2, 6), (16, 3, 8),
    (17, 3, 11), (18, 41, 190), (19, 37, 155), (20, 82, 362)]), 10, 9)


def spec(*lines, M=None):
    lines = tuple(SpectrumLine(*t) for t in lines)
    return DistanceSpectrum(lines, 10, len(lines) if M is None else M)


def mp_awgn(s, L, rc, snr_db):
    mpmath.mp.dps = 50
    x = mpmath.mpf(rc.numerator) / rc.denominator * mpmath.power(10, mpmath.mpf(snr_db) / 10)
    ber = sum(mpmath.mpf(ln.w) / L * mpmath.erfc(mpmath.sqrt(ln.d * x)) for ln in s.lines) / 2
    fer = sum(ln.N * mpmath.erfc(mpmath.sqrt(ln.d * x)) for ln in s.lines) / 2
    return float(ber), float(fer)


def mp_rayleigh(s, L, rc, snr_db):
    mpmath.mp.dps = 50
    x = mpmath.mpf(rc.numerator) / rc.denominator * mpmath.power(10, mpmath.mpf(snr_db) / 10)
    ber = sum(mpmath.mpf(ln.w) / L * (1 + x) ** -ln.d for ln in s.lines) / 2
    fer = sum(ln.N * (1 + x) ** -ln.d for ln in s.lines) / 2
    return float(ber), float(fer)


@pytest.mark.parametrize("snr_db", [0.0, 1.5, 2.5, 5.0, 10.0])
def test_awgn_matches_high_precision(snr_db):
    rc = code_rate(40)
    got = tub_awgn(L40_QPP, 40, rc, snr_db)
    ber, fer = mp_awgn(L40_QPP, 40, rc, snr_db)
    assert got.tub_ber == pytest.approx(ber, rel=1e-12)
    assert got.tub_fer == pytest.approx(fer, rel=1e-12)


@pytest.mark.parametrize("snr_db", [0.0, 5.0, 10.0])
def test_rayleigh_matches_high_precision(snr_db):
    rc = code_rate(40)
    got = tub_rayleigh(L40_QPP, 40, rc, snr_db)
    ber, fer = mp_rayleigh(L40_QPP, 40, rc, snr_db)
    assert got.tub_ber == pytest.approx(ber, rel=1e-12)
    assert got.tub_fer == pytest.approx(fer, rel=1e-12)


def test_single_line_awgn():
    r = tub_awgn(spec((10, 1, 1)), 40, Fraction(1, 3), 0.0)
    assert r.tub_ber == pytest.approx(0.5 / 40 * math.erfc(math.sqrt(10 / 3)), rel=1e-15)
    assert r.tub_fer == pytest.approx(0.5 * math.erfc(math.sqrt(10 / 3)), rel=1e-15)


def test_single_line_rayleigh():
    r = tub_rayleigh(spec((4, 2, 2)), 8, Fraction(1, 2), 10 * math.log10(2))
    # Rc * SNR = 1, so each term is 2^-4.
    assert r.tub_ber == pytest.approx(0.5 * (2 / 8) / 16, rel=1e-14)
    assert r.tub_fer == pytest.approx(0.5 * 2 / 16, rel=1e-14)


def test_empty_spectrum_is_zero():
    empty = DistanceSpectrum((), 10, 0)
    for ch in Channel:
        r = tub(empty, 40, code_rate(40), 5.0, ch)
        assert r.tub_ber == 0.0 and r.tub_fer == 0.0 and r.terms_used == 0


def test_published_values_l40_qpp():
    rc = code_rate(40)
    awgn = tub(L40_QPP, 40, rc, 5.0, "awgn")
    assert awgn.ber_scaled == pytest.approx(0.9336, abs=1e-4)
    assert awgn.fer_scaled == pytest.approx(0.1918, abs=1e-4)


def test_decreasing_in_snr():
    rc = code_rate(40)
    for ch in Channel:
        vals = [tub(L40_QPP, 40, rc, s, ch) for s in (0, 1, 2, 3, 5, 8)]
        assert all(a.tub_ber > b.tub_ber for a, b in zip(vals, vals[1:]))
        assert all(a.tub_fer > b.tub_fer for a, b in zip(vals, vals[1:]))


def test_non_decreasing_in_terms():
    rc = code_rate(40)
    for ch in Channel:
        vals = [tub(L40_QPP.truncated(m), 40, rc, 5.0, ch) for m in range(1, 10)]
        assert all(a.tub_ber <= b.tub_ber for a, b in zip(vals, vals[1:]))
        assert all(a.tub_fer <= b.tub_fer for a, b in zip(vals, vals[1:]))


def test_scaling_multiplicities():
    rc = code_rate(40)
    k = 3
    scaled = spec(*[(ln.d, k * ln.N, k * ln.w) for ln in L40_QPP.lines])
    for ch in Channel:
        a = tub(L40_QPP, 40, rc, 4.0, ch)
        b = tub(scaled, 40, rc, 4.0, ch)
        assert b.tub_ber == pytest.approx(k * a.tub_ber, rel=1e-14)
        assert b.tub_fer == pytest.approx(k * a.tub_fer, rel=1e-14)


def test_rejects_bad_inputs():
    with pytest.raises(ValueError):
        tub_awgn(L40_QPP, 0, Fraction(1, 3), 5.0)
    with pytest.raises(ValueError):
        tub_rayleigh(L40_QPP, -4, Fraction(1, 3), 5.0)
    with pytest.raises(ValueError):
        snr_linear(float("nan"))
    with pytest.raises(ValueError):
        tub(L40_QPP, 40, Fraction(1, 3), 5.0, "bsc")


def test_snr_linear():
    assert snr_linear(0) == 1.0
    assert snr_linear(10) == pytest.approx(10.0)


def test_rayleigh_single_line_l64():
    r = tub_rayleigh(spec((15, 1, 1)), 64, Fraction(64, 204), 7.5)
    expected = 0.5 * (1 / 64) * (1 / (1 + (16 / 51) * 10 ** 0.75)) ** 15
    assert r.tub_ber == pytest.approx(expected, rel=1e-13)


def test_rayleigh_published_value_l40():
    from ppturbo.poly import PolyModL, as_permutation
    from ppturbo.spectrum import distance_spectrum
    s = distance_spectrum(as_permutation(PolyModL.from_coeffs(40, 13, 30)), 9)
    r = tub(s, 40, code_rate(40), 7.5, Channel.RAYLEIGH)
    assert r.ber_scaled == pytest.approx(4.0451, abs=1e-4)
    assert r.fer_scaled == pytest.approx(0.6539, abs=1e-4)
