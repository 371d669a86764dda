"""Command line interface.

Exit status: 0 on success / all checks passing, 1 if a check fails, 2 on a
usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .classes import build_companion_classes, build_real_classes
from .exact import BudgetExceededError, exact_report
from .harness import (
    ConfigError,
    ExperimentConfig,
    _write_common,
    run_concentration,
    run_mc_experiment,
    run_verify,
    spectra_csv,
    versions,
)
from .linkfn import LinkFormatError, resolve_link
from .sampler import DISTRIBUTIONS, sample_companion_matrix, sample_real_matrix
from .spectral import hermitian_eigenvalues, normalized_spectrum

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_mc_flags(p: argparse.ArgumentParser, m_default: str) -> None:
    p.add_argument("--config", help="JSON file with ExperimentConfig fields; flags override it")
    p.add_argument("--link")
    p.add_argument("--sizes", "--size", dest="sizes", type=_int_list)
    p.add_argument("--samples", type=int)
    p.add_argument("--orders", type=_int_list, default=None,
                   help=f"comma-separated moment orders (default {m_default})")
    p.add_argument("--dist", choices=DISTRIBUTIONS)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--bins", type=int)
    p.add_argument("--range", nargs=2, type=float, metavar=("LO", "HI"))
    p.add_argument("--workers", type=int)


def _config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    for name in ("link", "sizes", "samples", "orders", "dist", "seed", "out", "bins", "workers"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, name, v)
    if getattr(args, "range", None):
        cfg.range = tuple(args.range)
    if getattr(args, "spectra", False):
        cfg.spectra = True
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linkedrmt", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    link = sub.add_parser("link", help="link-function utilities")
    link_sub = link.add_subparsers(dest="link_command", required=True)
    check = link_sub.add_parser("check", help="validate a link function")
    check.add_argument("--link", required=True)
    check.add_argument("--size", type=int, help="also export the class map at this size")
    check.add_argument("--kind", choices=("real", "companion"), default="real")
    check.add_argument("--out", help="class-map CSV destination (default stdout)")

    sample = sub.add_parser("sample", help="draw matrices and write their normalised spectra")
    sample.add_argument("--link", required=True)
    sample.add_argument("--size", type=int, required=True)
    sample.add_argument("--samples", type=int, default=1)
    sample.add_argument("--kind", choices=("real", "companion"), default="real")
    sample.add_argument("--dist", choices=DISTRIBUTIONS, default="standard-normal")
    sample.add_argument("--seed", type=int, default=0)
    sample.add_argument("--out", help="directory for spectra.csv (default stdout)")

    moments = sub.add_parser("moments", help="moment computations")
    msub = moments.add_subparsers(dest="moments_command", required=True)
    ex = msub.add_parser("exact", help="exact companion moments")
    ex.add_argument("--link", required=True)
    ex.add_argument("--size", type=int, help="companion size K (default k)")
    ex.add_argument("--orders", type=_int_list, default=[2, 4, 6, 8])
    ex.add_argument("--method", choices=("isserlis", "matching"), default="isserlis")
    ex.add_argument("--workers", type=int, default=1)
    ex.add_argument("--out", help="write the JSON report here instead of stdout")
    mc = msub.add_parser("mc", help="Monte Carlo moments of the real ensemble")
    _add_mc_flags(mc, "2,4,6")
    mc.add_argument("--spectra", action="store_true", help="also write spectra CSV files")

    ver = sub.add_parser("verify", help="exact consistency checks")
    ver.add_argument("--link", action="append", help="repeatable; default builtins")
    ver.add_argument("--k-max", type=int, default=3)
    ver.add_argument("--m-max", type=int, default=8)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--out")

    conc = sub.add_parser("concentration", help="decay of fluctuations of a moment")
    _add_mc_flags(conc, "4")
    return parser


def _emit(text: str, out: str | None, name: str) -> None:
    if out:
        path = Path(out)
        if path.suffix == "":
            path.mkdir(parents=True, exist_ok=True)
            path = path / name
        path.write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_link_check(args) -> int:
    f = resolve_link(args.link)
    info = {"k": f.k, "table": f.table.tolist(), "descriptor": f.descriptor}
    if args.size:
        build = build_real_classes if args.kind == "real" else build_companion_classes
        cmap = build(f, args.size)
        info.update(N=args.size, kind=args.kind, n_classes=cmap.n_classes)
        _emit(cmap.to_csv(), args.out, "classes.csv")
    print(json.dumps(info), file=sys.stderr if args.size and not args.out else sys.stdout)
    return EXIT_OK


def _cmd_sample(args) -> int:
    f = resolve_link(args.link)
    if args.kind == "real":
        cmap = build_real_classes(f, args.size)
        draw = lambda s: sample_real_matrix(cmap, args.dist, args.seed, s, f.descriptor)
    else:
        cmap = build_companion_classes(f, args.size)
        draw = lambda s: sample_companion_matrix(cmap, args.seed, s, f.descriptor)
    rows = [normalized_spectrum(hermitian_eigenvalues(draw(s).entries), args.size).values
            for s in range(args.samples)]
    _emit(spectra_csv(np.vstack(rows)), args.out, "spectra.csv")
    return EXIT_OK


def _cmd_exact(args) -> int:
    f = resolve_link(args.link)
    report = exact_report(f, args.size or f.k, args.orders, args.method, args.workers)
    _emit(json.dumps(report, indent=2) + "\n", args.out, "exact.json")
    return EXIT_OK


def _cmd_mc(args) -> int:
    cfg = _config(args)
    res = run_mc_experiment(cfg)
    if not cfg.out:
        sys.stdout.write(res.table.to_csv())
    return EXIT_OK


def _cmd_verify(args) -> int:
    links = [resolve_link(s) for s in args.link] if args.link else None
    report = run_verify(links, k_max=args.k_max, m_max=args.m_max)
    report.update(seed=args.seed, versions=versions())
    for c in report["checks"]:
        print(f"{'PASS' if c['pass'] else 'FAIL'}  {c['name']}  {json.dumps(c['params'])}")
    if args.out:
        _write_common(Path(args.out), {"links": [str(s) for s in args.link or []],
                                       "k_max": args.k_max, "m_max": args.m_max},
                      report, args.seed)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def _cmd_concentration(args) -> int:
    cfg = _config(args)
    if args.orders is None and not args.config:
        cfg.orders = [4]
    if args.sizes is None and not args.config:
        cfg.sizes = [64, 128, 256]
    if args.samples is None and not args.config:
        cfg.samples = 400
    ok = True
    for m in cfg.orders:
        rep = run_concentration(cfg, m)
        print(json.dumps({"m": m, "sizes": rep["sizes"],
                          "fourth_central_moments": rep["fourth_central_moments"],
                          "pass": rep["checks"][0]["pass"]}))
        ok = ok and rep["checks"][0]["pass"]
    return EXIT_OK if ok else EXIT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "link":
        handler = _cmd_link_check
    elif args.command == "moments":
        handler = _cmd_exact if args.moments_command == "exact" else _cmd_mc
    else:
        handler = {"sample": _cmd_sample, "verify": _cmd_verify,
                   "concentration": _cmd_concentration}[args.command]
    try:
        return handler(args)
    except (ConfigError, LinkFormatError, BudgetExceededError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
