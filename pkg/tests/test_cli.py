import json
import re
import subprocess
import sys

import pytest

from ppturbo.cli import main
from ppturbo.poly import parse_poly

POLY_RE = re.compile(r"\d*x(?:\^[23])?(?:\+\d*x(?:\^[23])?)*")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_npp_lists_four(capsys):
    code, out, _ = run(capsys, "npp", "--mod", "8")
    assert code == 0
    polys = [ln for ln in out.splitlines() if not ln.startswith("#")]
    assert len(polys) == 4
    assert {parse_poly(p, 8).coeffs for p in polys} == {(0, 0, 0), (4, 4, 0), (4, 0, 4), (0, 4, 4)}


def test_spread_golden(capsys):
    code, out, _ = run(capsys, "spread", "--mod", "80", "--poly", "11x+20x^2")
    assert code == 0
    assert out.startswith("D=10 ")


def test_check_negative_verdict(capsys):
    code, out, _ = run(capsys, "check", "--mod", "8", "--poly", "2x")
    assert code == 0
    assert "permutation=no" in out


def test_check_positive(capsys):
    code, out, _ = run(capsys, "check", "--mod", "40", "--poly", "3x+8x^2+16x^3")
    assert code == 0
    assert "permutation=yes" in out and "effective_degree=3" in out


@pytest.mark.parametrize("argv", [
    ["spread", "--mod", "40", "--poly", "3y"],
    ["spread", "--mod", "8", "--poly", "2x"],
    ["check", "--mod", "40"],
    ["frobnicate"],
    ["npp", "--mod", "8", "--bogus"],
    ["search", "--mod", "40", "--degree", "3"],
    ["reproduce", "--table", "2", "--lengths", "41"],
    ["reproduce", "--table", "9", "--lengths", "40"],
    ["tub", "--snr-db", "5"],
])
def test_invalid_input_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_printed_polys_round_trip(capsys):
    for argv in (["npp", "--mod", "24"],
                 ["check", "--mod", "40", "--poly", "3x + 8x^2 + 16x^3"]):
        _, out, _ = run(capsys, *argv)
        for token in POLY_RE.findall(out):
            p = parse_poly(token, int(argv[2]))
            assert str(p) == token


def test_spectrum_oracle_matches_search(capsys):
    _, fast, _ = run(capsys, "spectrum", "--mod", "16", "--poly", "3x+4x^2", "--terms", "4")
    _, slow, _ = run(capsys, "spectrum", "--mod", "16", "--poly", "3x+4x^2", "--terms", "4",
                     "--oracle", "--wumax", "16")
    assert fast == slow == "d,N,w\n10,3,18\n12,11,38\n13,11,27\n14,10,30\n"


def test_spectrum_file_and_manifest(capsys, tmp_path):
    out = tmp_path / "s.json"
    code, _, _ = run(capsys, "spectrum", "--mod", "40", "--poly", "13x+10x^2", "--terms", "9",
                     "--format", "json", "--out", str(out))
    assert code == 0
    data = json.loads(out.read_text())
    assert data["M"] == 9 and data["wu_max"] == 10
    manifest = json.loads((tmp_path / "s.json.manifest.json").read_text())
    assert manifest["command"] == "spectrum" and "elapsed_s" in manifest
    assert manifest["config"]["poly"] == "13x+10x^2"
    code, text, _ = run(capsys, "tub", "--mod", "40", "--spectrum-file", str(out), "--snr-db", "5")
    assert code == 0
    assert "TUB_BER_e7=0.9336" in text and "TUB_FER_e5=0.1919" in text


def test_tub_from_poly_rayleigh(capsys):
    code, out, _ = run(capsys, "tub", "--mod", "40", "--poly", "13x+30x^2", "--terms", "9",
                       "--channel", "rayleigh", "--snr-db", "7.5")
    assert code == 0
    assert "TUB_BER_e7=4.0451" in out and "TUB_FER_e5=0.6539" in out
    assert "TUB_BER=4.045" in out


def test_search_with_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# L=40 quadratic\nmod = 40\ndegree = 2\nsnr_db = 5\nterms = 9\n")
    code, out, _ = run(capsys, "search", "--config", str(cfg), "--jobs", "1")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header.startswith("L,SNR_dB,num_dist,poly,D,")
    assert row.startswith("40,5,9,13x+10x^2,4,0.9336,")
    assert row.endswith(",4")
    # Explicit flags override the file.
    code, out, _ = run(capsys, "search", "--config", str(cfg), "--snr-db", "4", "--jobs", "1")
    assert out.splitlines()[1].startswith("40,4,9,")


def test_search_table_preset(capsys):
    code, out, _ = run(capsys, "search", "--mod", "40", "--degree", "2", "--table", "4",
                       "--jobs", "1", "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["poly"] == "13x+30x^2" and rep["channel"] == "rayleigh" and rep["count"] == 4


def test_search_partial_exit_three(capsys):
    code, out, _ = run(capsys, "search", "--mod", "32", "--degree", "3", "--snr-db", "1",
                       "--dmin", "2", "--deadline", "0", "--jobs", "1", "--format", "json")
    assert code == 3
    assert json.loads(out)["complete"] is False


def test_budget_exit_three(capsys):
    code, _, err = run(capsys, "spectrum", "--mod", "40", "--poly", "13x+10x^2",
                       "--max-patterns", "3")
    assert code == 3 and "budget" in err


def test_jobs_env(capsys, monkeypatch):
    monkeypatch.setenv("PPTURBO_JOBS", "zero")
    code, _, err = run(capsys, "search", "--mod", "16", "--degree", "2", "--snr-db", "5")
    assert code == 2 and "PPTURBO_JOBS" in err


def test_reproduce_byte_identical(tmp_path):
    outs = []
    for jobs in ("1", "2"):
        path = tmp_path / f"r{jobs}.csv"
        assert main(["reproduce", "--table", "2", "--lengths", "40",
                     "--jobs", jobs, "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    lines = outs[0].decode().splitlines()
    assert len(lines) == 3 and all(ln.endswith(",yes") for ln in lines[1:])


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ppturbo", "spread", "--mod", "40",
                          "--poly", "13x+10x^2"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("D=4 ")
