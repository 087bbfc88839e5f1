"""Command-line surface: sample, montecarlo, enumerate, fit, predict,
validate.

Stochastic commands require an explicit --seed (no hidden entropy), and
every output file embeds version, command line, and seed as '#' comment
lines.  Tabular output is CSV with 17-significant-digit floats; --format
json mirrors the same rows.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .asymptotics import (fit_loop_growth, fit_scan, gamma_prime_prediction,
                          load_table1, write_fits_csv, ModelId)
from .errors import (CapacityError, ConditioningError, DomainError,
                     LoopgasError, SeriesError, SizeError, StatisticsError,
                     StructuralError, UnderdeterminedError, WeightError)
from .enumeration import P_MAX_DEFAULT, exact_counts
from .maps import read_maps, validate, write_maps
from .rng import Rng, derive_key
from .sampler import sample_map
from .stats import (size_sweep, u_series, write_estimates_csv,
                    write_useries_csv, Estimate)

_EXIT_CODES = {
    SizeError: 3,
    StructuralError: 4,
    CapacityError: 5,
    StatisticsError: 6,
    SeriesError: 7,
    DomainError: 8,
    UnderdeterminedError: 9,
    WeightError: 10,
    ConditioningError: 11,
}


def _meta(args, seed=None):
    lines = [f"loopgas {__version__}",
             "command: loopgas " + " ".join(args.argv)]
    if seed is not None:
        lines.append(f"seed: {seed}")
    return lines


def _meta_dict(args, seed=None):
    d = {"version": __version__, "command": "loopgas " + " ".join(args.argv)}
    if seed is not None:
        d["seed"] = seed
    return d


def _parse_span(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition(":")
    lo = int(lo)
    hi = int(hi) if hi else lo
    return lo, hi


def _write_rows_json(path, meta, rows) -> None:
    with open(path, "w") as fh:
        json.dump({"meta": meta, "rows": rows}, fh, indent=1)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_sample(args) -> int:
    maps = [sample_map(args.size, Rng(derive_key(args.seed, j)))
            for j in range(args.count)]
    if args.format == "binary":
        write_maps(args.out, maps, fmt="binary")
    else:
        write_maps(args.out, maps, fmt="text",
                   comments=_meta(args, args.seed))
    return 0


def _estimate_rows(estimates: list[Estimate]):
    rows = []
    for e in estimates:
        ell = e.p.bit_length() - 1
        rows.append({"ell": ell if 2**ell == e.p else None, "p": e.p,
                     "N": e.samples, "mean": e.mean, "stderr": e.stderr,
                     "variance": e.variance})
    return rows


def _cmd_montecarlo(args) -> int:
    ell_min, ell_max = _parse_span(args.ells)
    estimates = size_sweep(ell_min, ell_max, args.samples, seed=args.seed,
                           threads=args.threads, budget=args.budget)
    if args.format == "json":
        _write_rows_json(args.out, _meta_dict(args, args.seed),
                         _estimate_rows(estimates))
    else:
        with open(args.out, "w") as fh:
            write_estimates_csv(estimates, fh, _meta(args, args.seed))
    if args.u_out:
        series = u_series(estimates)
        with open(args.u_out, "w") as fh:
            write_useries_csv(series, fh, _meta(args, args.seed))
    return 0


def _cmd_enumerate(args) -> int:
    counts = [exact_counts(p, p_max=args.pmax) for p in
              range(1, args.pmax + 1)]
    rows = [{"p": c.p, "maps": c.maps, "blossom_trees": c.blossom_trees,
             "mean_k_num": c.mean_k.numerator,
             "mean_k_den": c.mean_k.denominator} for c in counts]
    if args.format == "json":
        if args.out:
            _write_rows_json(args.out, _meta_dict(args), rows)
        else:
            json.dump({"meta": _meta_dict(args), "rows": rows}, sys.stdout,
                      indent=1)
            sys.stdout.write("\n")
        return 0
    fh = open(args.out, "w") if args.out else sys.stdout
    try:
        for line in _meta(args):
            fh.write(f"# {line}\n")
        fh.write("p,maps,blossom_trees,mean_k_num,mean_k_den\n")
        for r in rows:
            fh.write(f"{r['p']},{r['maps']},{r['blossom_trees']},"
                     f"{r['mean_k_num']},{r['mean_k_den']}\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def _read_fit_data(path):
    """Accept either the fixture shape (ell,k,err) or the montecarlo CSV
    (ell,p,N,mean,stderr,variance)."""
    import csv as _csv
    with open(path) as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.startswith("#")]
    rows = list(_csv.DictReader(lines))
    data = []
    for rec in rows:
        if "k" in rec:
            data.append((2.0 ** int(rec["ell"]), float(rec["k"]),
                         float(rec["err"])))
        else:
            data.append((float(rec["p"]), float(rec["mean"]),
                         float(rec["stderr"])))
    return data


def _cmd_fit(args) -> int:
    data = _read_fit_data(args.data) if args.data else load_table1()
    if args.scan:
        lo, hi = _parse_span(args.scan)
        fits = fit_scan(data, range(lo, hi + 1), args.lmax)
    else:
        fits = [fit_loop_growth(data, args.lmin, args.lmax)]
    rows = [{"lmin": f.ell_min, "sigma_prime": f.sigma_prime,
             "gamma_prime": f.gamma_prime, "kappa_prime": f.kappa_prime,
             "chi2": f.chi2} for f in fits]
    if args.out:
        if args.format == "json":
            _write_rows_json(args.out, _meta_dict(args), rows)
        else:
            with open(args.out, "w") as fh:
                write_fits_csv(fits, fh, _meta(args))
    else:
        write_fits_csv(fits, sys.stdout)
    if args.u_out:
        ests = [Estimate(p=int(p), samples=2, mean=m, stderr=e,
                         variance=2 * e * e) for p, m, e in data]
        with open(args.u_out, "w") as fh:
            write_useries_csv(u_series(ests), fh, _meta(args))
    return 0


def _cmd_predict(args) -> int:
    value = gamma_prime_prediction(ModelId(args.model))
    if args.format == "json":
        print(json.dumps({"model": args.model, "gamma_prime": value}))
    else:
        print(repr(value))  # shortest round-trip form: 3/10 prints as 0.3
    return 0


def _cmd_validate(args) -> int:
    maps = read_maps(args.path)
    all_ok = True
    for i, m in enumerate(maps):
        diag = validate(m)
        status = "ok" if diag.ok else "FAIL " + "; ".join(
            f"{rule}@{ident}" for rule, ident in diag.violations)
        print(f"map {i}: p={m.p} {status}")
        all_ok = all_ok and diag.ok
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="loopgas",
        description="Uniform random 4-regular planar maps, loop statistics,"
                    " and growth-law fits")
    ap.add_argument("--version", action="version",
                    version=f"loopgas {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sample", help="sample maps to a file")
    sp.add_argument("--size", type=int, required=True, metavar="P")
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--format", choices=["text", "binary"], default="text")
    sp.set_defaults(func=_cmd_sample)

    mc = sub.add_parser("montecarlo", help="mean-loop sweep over p = 2**ell")
    mc.add_argument("--ells", required=True, metavar="LO:HI")
    mc.add_argument("--samples", type=int, default=None,
                    help="per-ell sample count (default: budget based)")
    mc.add_argument("--budget", type=int, default=1 << 26)
    mc.add_argument("--seed", type=int, required=True)
    mc.add_argument("--threads", type=int, default=None,
                    help="worker threads (default: LOOPGAS_THREADS or 1)")
    mc.add_argument("--out", required=True)
    mc.add_argument("--u-out", dest="u_out", default=None,
                    help="also write the u-series CSV")
    mc.add_argument("--format", choices=["csv", "json"], default="csv")
    mc.set_defaults(func=_cmd_montecarlo)

    en = sub.add_parser("enumerate", help="exact counts and means, brute"
                                          " force cross-checked")
    en.add_argument("--pmax", type=int, default=P_MAX_DEFAULT)
    en.add_argument("--out", default=None)
    en.add_argument("--format", choices=["csv", "json"], default="csv")
    en.set_defaults(func=_cmd_enumerate)

    ft = sub.add_parser("fit", help="weighted growth-law fit")
    ft.add_argument("--data", default=None,
                    help="CSV of measurements (default: shipped table1)")
    ft.add_argument("--lmin", type=int, default=None)
    ft.add_argument("--lmax", type=int, default=None)
    ft.add_argument("--scan", default=None, metavar="LO:HI",
                    help="one fit per lmin in the range")
    ft.add_argument("--out", default=None)
    ft.add_argument("--u-out", dest="u_out", default=None)
    ft.add_argument("--format", choices=["csv", "json"], default="csv")
    ft.set_defaults(func=_cmd_fit)

    pr = sub.add_parser("predict", help="print a model's gamma' prediction")
    pr.add_argument("--model", choices=["I", "II"], required=True)
    pr.add_argument("--format", choices=["text", "json"], default="text")
    pr.set_defaults(func=_cmd_predict)

    va = sub.add_parser("validate", help="validate serialized maps")
    va.add_argument("path")
    va.set_defaults(func=_cmd_validate)
    return ap


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    args.argv = argv
    try:
        return args.func(args)
    except LoopgasError as exc:
        print(f"error:{exc.category}: {exc}", file=sys.stderr)
        return _EXIT_CODES.get(type(exc), 1)


if __name__ == "__main__":
    sys.exit(main())
