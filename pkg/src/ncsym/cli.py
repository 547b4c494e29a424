"""``ncsym`` command line.

Exit codes: 0 pass (including expected failures on degenerate instances),
1 a check failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import cache as cache_mod
from . import harness
from .instances import ConfigError, parse_config, preset

log = logging.getLogger("ncsym")

VERIFY_CHOICES = list(harness.VERIFY_CHECKS) + ["all"]


class UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser, instance: bool = True):
    if instance:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--config", metavar="PATH", help="instance config (JSON)")
        g.add_argument("--preset", metavar="NAME", help="kronecker2, 'kronecker 3', 'field-extension p=2 d=4', ...")
        p.add_argument("--jmax", type=int, help="degree span for dimension tables and Euler/periodicity checks")
        p.add_argument("--window", type=int, help="regularity and Hilbert window |n| <= N")
        p.add_argument("--seed", type=int, help="random seed (default: config seed or 0)")
        p.add_argument("--out", metavar="DIR", help="write artifacts (JSON reports, CSV tables) here")
        p.add_argument("--no-cache", action="store_true", help="neither read nor write the cache")
    p.add_argument("--cache", metavar="DIR", help="cache directory (default $NCSYM_CACHE or the user cache)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ncsym", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("dims", help="dimension table of S_ij as CSV")
    _common(p)
    p.add_argument("--rows", type=int, default=1, help="rows i = 0..ROWS-1 (default 1)")

    p = sub.add_parser("verify", help="run verification batteries")
    p.add_argument("check", choices=VERIFY_CHOICES)
    _common(p)

    p = sub.add_parser("module", help="operations on objects L<i>, P<i>, R<k>")
    p.add_argument("op", choices=["apply-omega"])
    p.add_argument("object", help="L<i>, P<i> or R<k> (k-th regular sample)")
    p.add_argument("--power", type=int, default=1, help="twist by omega^POWER (negative for the inverse)")
    _common(p)

    p = sub.add_parser("hilbert", help="Hilbert function of an object")
    p.add_argument("object", help="L<i>, P<i> or R<k>")
    _common(p)

    p = sub.add_parser("cache", help="cache maintenance")
    p.add_argument("op", choices=["purge"])
    _common(p, instance=False)
    return ap


def load_instance(args):
    if args.config:
        cfg = parse_config(args.config)
    elif args.preset:
        cfg = preset(args.preset)
    else:
        raise UsageError("give --config PATH or --preset NAME")
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def _write(out, name: str, text: str):
    if out:
        d = Path(out)
        d.mkdir(parents=True, exist_ok=True)
        (d / name).write_text(text)


def _emit_report(args, report: dict, stem: str):
    text = harness.dumps(report)
    _write(args.out, stem + ".json", text)
    sys.stdout.write(text)


def _summary_lines(report: dict):
    for c in report.get("checks", []):
        yield f"{c['check']:<12} {c['status']}"
    yield f"{'overall':<12} {report['status']}"


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        if args.verb == "cache":
            n = cache_mod.purge(args.cache)
            print(f"removed {n} cache file(s) from {cache_mod.cache_dir(args.cache)}")
            return 0
        cfg = load_instance(args)
        ses = harness.Session(cfg, cache_dir=args.cache, use_cache=not args.no_cache)
        log.info("instance %s (%s), cache %s", cfg.name, cfg.content_hash, ses.cache_status)
        if cfg.degenerate:
            log.warning("degenerate instance: mn = %d < 4", cfg.mn)
        if args.verb == "dims":
            jmax = args.jmax if args.jmax is not None else cfg.jmax
            rows, rec_ok = harness.dims_table(ses, jmax, 0, args.rows - 1)
            lines = [",".join(str(d) for d in r) for r in rows]
            text = "\n".join(lines) + "\n"
            _write(args.out, f"dims-{cfg.name}.csv", text)
            sys.stdout.write(text)
            if not rec_ok and not cfg.degenerate:
                print("warning: Euler recursion failed on the table", file=sys.stderr)
                return 1
            return 0
        if args.verb == "verify":
            names = "all" if args.check == "all" else [args.check]
            report = harness.verify(ses, names, window=args.window, jmax=args.jmax)
            _emit_report(args, report, f"verify-{args.check}-{cfg.name}")
            for line in _summary_lines(report):
                print(line, file=sys.stderr)
            return 1 if report["status"] == "fail" else 0
        if args.verb == "module":
            report = harness.apply_omega(ses, args.object, args.power)
            _emit_report(args, report, f"apply-omega-{args.object}-{cfg.name}")
            return 0
        if args.verb == "hilbert":
            report = harness.hilbert(ses, args.object, args.window or 4)
            _emit_report(args, report, f"hilbert-{args.object}-{cfg.name}")
            return 0
    except (ConfigError, UsageError, ValueError) as exc:
        print(f"ncsym: error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
