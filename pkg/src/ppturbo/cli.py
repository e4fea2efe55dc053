"""Command-line front end: ``python -m ppturbo <command> ...``.

Exit codes: 0 success, 2 invalid input, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .bounds import Channel, tub
from .encoder import code_rate
from .poly import (NotBijective, as_permutation, effective_degree, format_poly,
                   is_permutation_polynomial, npp_enumerate, parse_poly)
from .search import (REPORT_CSV_HEADER, SearchConfig, SearchError, optimize,
                     report_csv_row, report_to_json_dict)
from .spectrum import (BudgetExceeded, DistanceSpectrum, brute_force_spectrum,
                       default_terms, distance_spectrum)
from .spread import spread_D
from .tables import GOLDEN, golden_row

EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 2, 3
JOBS_ENV = "PPTURBO_JOBS"


class UsageError(Exception):
    pass


def _default_jobs() -> int:
    env = os.environ.get(JOBS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"{JOBS_ENV} must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _poly(args) -> "object":
    try:
        return parse_poly(args.poly, args.mod)
    except ValueError as e:
        raise UsageError(f"{e}; expected e.g. '3x+8x^2+16x^3'") from None


def _emit(args, text: str, manifest: dict, t0: float, suffix: str = "") -> None:
    out = getattr(args, "out", None)
    if not out:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.write_text(text)
    manifest = dict(manifest, tool_version=__version__, elapsed_s=round(time.monotonic() - t0, 3))
    Path(str(path) + ".manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _config_of(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func", "config")}


# -- subcommands ------------------------------------------------------------------

def cmd_npp(args) -> int:
    nulls = sorted(npp_enumerate(args.mod), key=lambda p: p.coeffs)
    lines = [f"# {len(nulls)} null polynomials modulo {args.mod}"] + [format_poly(p) for p in nulls]
    print("\n".join(lines))
    return EXIT_OK


def cmd_check(args) -> int:
    p = _poly(args)
    ok = is_permutation_polynomial(p)
    print(f"poly={format_poly(p)} mod={args.mod}")
    print(f"permutation={'yes' if ok else 'no'}")
    print(f"effective_degree={effective_degree(p)}")
    return EXIT_OK


def cmd_spread(args) -> int:
    p = _poly(args)
    try:
        res = spread_D(as_permutation(p))
    except NotBijective as e:
        raise UsageError(str(e)) from None
    print(f"D={res.d_value} witness={res.witness[0]},{res.witness[1]}")
    return EXIT_OK


def _spectrum_for(args) -> DistanceSpectrum:
    p = _poly(args)
    try:
        perm = as_permutation(p)
    except NotBijective as e:
        raise UsageError(str(e)) from None
    M = args.terms or default_terms(args.mod)
    if args.oracle:
        try:
            return brute_force_spectrum(perm, M)
        except ValueError as e:
            raise UsageError(str(e)) from None
    return distance_spectrum(perm, M, args.wumax, max_patterns=args.max_patterns)


def cmd_spectrum(args) -> int:
    t0 = time.monotonic()
    spec = _spectrum_for(args)
    text = spec.to_json() + "\n" if args.format == "json" else spec.to_csv()
    _emit(args, text, {"command": "spectrum", "config": _config_of(args)}, t0)
    return EXIT_OK


def cmd_tub(args) -> int:
    if args.spectrum_file:
        if args.mod is None:
            raise UsageError("--mod is required with --spectrum-file")
        text = Path(args.spectrum_file).read_text()
        spec = (DistanceSpectrum.from_json(text) if text.lstrip().startswith("{")
                else DistanceSpectrum.from_csv(text, wu_max=args.wumax))
    elif args.poly and args.mod:
        spec = _spectrum_for(args)
    else:
        raise UsageError("give either --spectrum-file or --mod with --poly")
    rc = code_rate(args.mod)
    res = tub(spec, args.mod, rc, args.snr_db, args.channel)
    print(f"channel={Channel(args.channel).value} snr_db={args.snr_db:g} rc={rc} terms={res.terms_used}")
    print(f"TUB_BER={res.tub_ber:.6e} TUB_BER_e7={res.ber_scaled:.4f}")
    print(f"TUB_FER={res.tub_fer:.6e} TUB_FER_e5={res.fer_scaled:.4f}")
    return EXIT_OK


def _search_config(args) -> SearchConfig:
    flags = dict(channel=args.channel, objective=args.objective, snr_db=args.snr_db,
                 M=args.terms, wu_max=args.wumax, d_floor=args.dmin,
                 deadline_s=args.deadline, max_patterns=args.max_patterns)
    flags = {k: v for k, v in flags.items() if v is not None}
    try:
        if args.table is not None:
            if args.mod not in GOLDEN.get(args.table, {}):
                raise UsageError(f"table {args.table} has no row for L={args.mod}")
            return SearchConfig.from_table(args.table, args.mod, args.degree, **flags)
        if args.snr_db is None:
            raise UsageError("--snr-db is required unless --table gives the preset")
        return SearchConfig(L=args.mod, degree=args.degree, **flags)
    except (SearchError, ValueError) as e:
        raise UsageError(str(e)) from None


def cmd_search(args) -> int:
    t0 = time.monotonic()
    cfg = _search_config(args)
    report = optimize(cfg, jobs=args.jobs)
    if args.format == "json":
        text = json.dumps(report_to_json_dict(report), indent=2, sort_keys=True) + "\n"
    else:
        text = REPORT_CSV_HEADER + "\n" + report_csv_row(report) + "\n"
    _emit(args, text, {"command": "search", "config": _config_of(args),
                       "complete": report.complete, "wu_max_stable": report.wu_max_stable}, t0)
    return EXIT_OK if report.complete else EXIT_BUDGET


GOLDEN_CSV_HEADER = ("table,L,kind,poly,D,TUB_BER_e7,TUB_FER_e5,TUB_BER,TUB_FER,count,"
                     "ref_poly,ref_D,ref_TUB_BER_e7,ref_TUB_FER_e5,ref_count,match")


def _golden_match(report, entry) -> bool:
    same_poly = parse_poly(entry.poly, report.config.L) == report.winner
    # Printed values carry 4 decimals; accept anything within one unit of the last digit.
    close = (abs(report.tub_ber * 1e7 - entry.ber_e7) <= 1e-4
             and abs(report.tub_fer * 1e5 - entry.fer_e5) <= 1e-4)
    return same_poly and report.winner_D == entry.D and close and report.optimum_count == entry.count


def reproduce_rows(table: int, lengths: list[int], jobs: int = 1, wu_max: int = 10,
                   deadline: float | None = None) -> tuple[list[str], bool]:
    rows, complete = [], True
    for L in lengths:
        golden = golden_row(table, L)
        for kind, degree, entry in (("QPP", 2, golden.qpp), ("CPP", 3, golden.cpp)):
            cfg = SearchConfig.from_table(table, L, degree, wu_max=wu_max, deadline_s=deadline)
            r = optimize(cfg, jobs=jobs)
            complete &= r.complete
            rows.append(",".join([
                str(table), str(L), kind, str(r.winner), str(r.winner_D),
                f"{r.tub_ber * 1e7:.4f}", f"{r.tub_fer * 1e5:.4f}",
                f"{r.tub_ber:.6e}", f"{r.tub_fer:.6e}", str(r.optimum_count),
                entry.poly, str(entry.D), f"{entry.ber_e7:.4f}", f"{entry.fer_e5:.4f}",
                str(entry.count), "yes" if _golden_match(r, entry) else "no"]))
    return rows, complete


def cmd_reproduce(args) -> int:
    t0 = time.monotonic()
    if args.table not in GOLDEN:
        raise UsageError(f"--table must be one of {sorted(GOLDEN)}")
    try:
        lengths = [int(x) for x in args.lengths.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--lengths must be comma-separated integers, got {args.lengths!r}") from None
    for L in lengths:
        if L not in GOLDEN[args.table]:
            raise UsageError(f"table {args.table} has no row for L={L}; "
                             f"available: {','.join(map(str, sorted(GOLDEN[args.table])))}")
    rows, complete = reproduce_rows(args.table, lengths, args.jobs, args.wumax, args.deadline)
    text = GOLDEN_CSV_HEADER + "\n" + "\n".join(rows) + "\n"
    _emit(args, text, {"command": "reproduce", "config": _config_of(args), "complete": complete}, t0)
    return EXIT_OK if complete else EXIT_BUDGET


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ppturbo", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--config", help="file of 'key = value' lines mirroring the flags")
        return p

    def poly_args(p, required=True):
        p.add_argument("--mod", type=int, required=required, help="interleaver length L")
        p.add_argument("--poly", required=required, help="e.g. '3x+8x^2+16x^3'")

    def spectrum_args(p):
        p.add_argument("--terms", type=int, default=None, help="spectrum lines M (default by L)")
        p.add_argument("--wumax", type=int, default=10, help="information weight cap")
        p.add_argument("--oracle", action="store_true", help="exhaustive enumeration (L <= 22)")
        p.add_argument("--max-patterns", type=int, default=None, help="search budget")

    p = add("npp", cmd_npp, "list null polynomials of degree <= 3")
    p.add_argument("--mod", type=int, required=True)

    p = add("check", cmd_check, "permutation test and effective degree")
    poly_args(p)

    p = add("spread", cmd_spread, "spread factor D and a witness pair")
    poly_args(p)

    p = add("spectrum", cmd_spectrum, "first distance-spectrum lines")
    poly_args(p)
    spectrum_args(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="write to file (plus .manifest.json)")

    p = add("tub", cmd_tub, "truncated union bounds")
    poly_args(p, required=False)
    spectrum_args(p)
    p.add_argument("--spectrum-file", help="CSV (d,N,w) or JSON spectrum")
    p.add_argument("--channel", choices=("awgn", "rayleigh"), default="awgn")
    p.add_argument("--snr-db", type=float, required=True)

    p = add("search", cmd_search, "largest-spread, best-spectrum search")
    p.add_argument("--mod", type=int, required=True)
    p.add_argument("--degree", type=int, choices=(2, 3), default=3)
    p.add_argument("--table", type=int, default=None,
                   help="take SNR, terms, channel, objective and D floor from a published row")
    p.add_argument("--channel", choices=("awgn", "rayleigh"), default=None)
    p.add_argument("--objective", choices=("ber", "fer"), default=None)
    p.add_argument("--snr-db", type=float, default=None)
    p.add_argument("--terms", type=int, default=None)
    p.add_argument("--wumax", type=int, default=10)
    p.add_argument("--dmin", type=int, default=None, help="minimum D instead of the maximum")
    p.add_argument("--deadline", type=float, default=None, help="seconds before a partial report")
    p.add_argument("--max-patterns", type=int, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")

    p = add("reproduce", cmd_reproduce, "rerun published table rows and compare")
    p.add_argument("--table", type=int, required=True)
    p.add_argument("--lengths", required=True, help="comma-separated, e.g. 40,48")
    p.add_argument("--wumax", type=int, default=10)
    p.add_argument("--deadline", type=float, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--out")
    return ap


def _config_flags(path: str) -> list[str]:
    flags = []
    for n, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "yes", "on"):
            flags.append(flag)
        elif value.lower() not in ("false", "no", "off"):
            flags += [flag, value]
    return flags


def _with_config(argv: list[str]) -> list[str]:
    """Splice flags from --config right after the subcommand; explicit flags win."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise UsageError("--config needs a path")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2:]
    return rest[:1] + _config_flags(path) + rest[1:]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _with_config(argv)
        args = parser.parse_args(argv)
        if hasattr(args, "jobs") and args.jobs is None:
            args.jobs = _default_jobs()
        return args.func(args)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_INVALID
    except (UsageError, SearchError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
