"""``ucslab`` command line: enumerate, constant, verify, audit, table.

Exit codes: 0 success/pass, 1 counterexample or audit failure, 2 usage or
configuration error, 3 I/O or checkpoint error, 4 empty family class.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .analysis import (
    CLASS_KINDS,
    EmptyClassError,
    FamilyClassSelector,
    audit_binomial,
    empirical_constant,
    valid_params,
    verify_conjecture,
)
from .census import Census, RunInterrupted, run_census
from .checkpoint import CheckpointError
from .config import Config, ConfigError, load_config
from .core import FamilyError, SeparationParams, format_family_masks
from .enumeration import (
    STRATEGIES,
    EnumerationError,
    check_n,
    enumerate_bitsets,
    enumerate_canonical,
    iter_bits,
)
from .report import RunManifest, stamp, to_csv, to_jsonl, utc_now

log = logging.getLogger("ucslab")

EXIT_OK = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_USAGE = 2
EXIT_ENVIRONMENT = 3
EXIT_EMPTY_CLASS = 4


class UsageError(Exception):
    pass


def parse_range(text: str) -> list[int]:
    """``"3"`` or ``"1..3"`` (inclusive)."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise UsageError(f"bad n-range {text!r}; expected N or A..B") from None
    if lo > hi:
        raise UsageError(f"empty n-range {text!r}")
    if lo < 1 or hi > 5:
        raise UsageError(f"n-range {text!r} must lie within 1..5")
    return list(range(lo, hi + 1))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ucslab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="JSON config file (keys: max_n, workers, out_dir, "
                        "checkpoint_every, progress_interval)")
    parser.add_argument("--quiet", action="store_true", help="suppress progress on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, workers: bool = True) -> None:
        p.add_argument("--out", help="write results to this file instead of stdout")
        p.add_argument("--out-dir", dest="out_dir", help="directory for results and manifests")
        if workers:
            p.add_argument("--workers", type=int, help="worker processes (default: CPU count)")
            p.add_argument("--checkpoint", help="checkpoint file; resumed if present")
            p.add_argument("--stop-after", type=int, help=argparse.SUPPRESS)

    p = sub.add_parser("enumerate", help="dump all union-closed families on n elements")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--strategy", choices=STRATEGIES, default="recursive")
    p.add_argument("--canonical", action="store_true",
                   help="one representative per isomorphism class, tab, orbit size")
    common(p, workers=False)

    p = sub.add_parser("constant", help="per-n empirical constant for one class")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--class", dest="kind", choices=CLASS_KINDS, default="separated")
    p.add_argument("--weak", action="store_true", help="shorthand for --class weakly_separated")
    common(p)

    p = sub.add_parser("verify", help="check the conjectured bound over a class")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--all-orders", action="store_true", help="every k <= n, l <= k")
    p.add_argument("--variant", choices=("standard", "strong", "both"))
    common(p)

    p = sub.add_parser("audit", help="exact audit of the binomial compatibility inequalities")
    p.add_argument("--max-k", type=int, required=True)
    common(p, workers=False)

    p = sub.add_parser("table", help="constants for every (n, k, l, class) in a range")
    p.add_argument("--n", dest="n_range", required=True, help="N or A..B within 1..5")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    common(p)
    return parser


# --------------------------------------------------------------------- output

def _emit(args, cfg: Config, manifest: RunManifest, body: str, suffix: str) -> None:
    manifest.finished = utc_now()
    out = args.out
    if out is None and cfg.out_dir:
        out = os.path.join(cfg.out_dir, f"{manifest.command}-{manifest.hash}.{suffix}")
    if out is None:
        sys.stdout.write(body)
        sys.stdout.flush()
        return
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    Path(out).write_text(body)
    Path(str(out) + ".manifest.json").write_text(manifest.to_json())


def _census(args, cfg: Config, n: int) -> Census:
    return run_census(
        n,
        workers=cfg.workers,
        checkpoint=args.checkpoint,
        checkpoint_every=cfg.checkpoint_every,
        progress_interval=cfg.progress_interval,
        stop_after=args.stop_after,
    )


def _manifest(args, argv, cfg: Config, params: dict, n: int | None = None) -> RunManifest:
    return RunManifest(
        command=args.command,
        argv=list(argv),
        params=params,
        config=cfg.snapshot(),
        workers=getattr(args, "workers", None) or cfg.workers,
        n=n,
        strategy=getattr(args, "strategy", "recursive"),
    )


# ------------------------------------------------------------------- commands

def cmd_enumerate(args, argv, cfg: Config) -> int:
    check_n(args.n, cfg.max_n)
    manifest = _manifest(args, argv, cfg, {"n": args.n, "strategy": args.strategy, "canonical": args.canonical}, args.n)
    bitsets = enumerate_bitsets(args.n, args.strategy, cfg.max_n)
    lines = [format_family_masks(iter_bits(b)) + "\n" for b in bitsets]
    summary = [f"labeled={len(bitsets)}"]
    if args.canonical:
        classes = list(enumerate_canonical(args.n))
        lines = [f"{c.representative}\t{c.orbit_size}\n" for c in classes]
        summary.append(f"canonical={len(classes)} orbit_sum={sum(c.orbit_size for c in classes)}")
    manifest.totals = {"labeled": len(bitsets)}
    _emit(args, cfg, manifest, "".join(lines), "txt")
    stream = sys.stderr if args.out is None and not cfg.out_dir else sys.stdout
    print(" ".join(summary), file=stream)
    return EXIT_OK


def cmd_constant(args, argv, cfg: Config) -> int:
    check_n(args.n, cfg.max_n)
    kind = "weakly_separated" if args.weak else args.kind
    p = SeparationParams(args.k, args.l)
    params = {"n": args.n, "k": p.k, "l": p.l, "class": kind}
    manifest = _manifest(args, argv, cfg, params, args.n)
    if p.k > args.n:
        log.error("class %s %s is empty on n=%d (no %d-subset)", kind, p, args.n, p.k)
        return EXIT_EMPTY_CLASS
    census = _census(args, cfg, args.n)
    try:
        report = empirical_constant(args.n, FamilyClassSelector(kind, p), census)
    except EmptyClassError as exc:
        log.error("%s", exc)
        return EXIT_EMPTY_CLASS
    manifest.totals = {"families_scanned": report.families_scanned, "classes": report.canonical_scanned,
                       "verdicts": {report.verdict: 1}}
    _emit(args, cfg, manifest, to_jsonl(stamp([report.record()], manifest.hash)), "jsonl")
    return EXIT_OK


def cmd_verify(args, argv, cfg: Config) -> int:
    check_n(args.n, cfg.max_n)
    if args.all_orders:
        if args.k is not None or args.l is not None:
            raise UsageError("--all-orders excludes --k/--l")
        orders = valid_params(args.n)
        variants = ("standard", "strong") if args.variant in (None, "both") else (args.variant,)
    else:
        if args.k is None or args.l is None:
            raise UsageError("verify needs --k and --l, or --all-orders")
        orders = [SeparationParams(args.k, args.l)]
        variant = args.variant or "standard"
        variants = ("standard", "strong") if variant == "both" else (variant,)
    params = {"n": args.n, "orders": [[p.k, p.l] for p in orders], "variants": list(variants)}
    manifest = _manifest(args, argv, cfg, params, args.n)
    census = _census(args, cfg, args.n)
    results = [verify_conjecture(args.n, p, v, census) for p in orders for v in variants]
    failed = [r for r in results if not r.passed]
    for r in failed:
        log.error("counterexample n=%d %d|%d %s: %s", r.n, r.k, r.l, r.variant, r.counterexample)
    manifest.totals = {
        "families_scanned": census.labeled_total,
        "classes": census.class_count,
        "verdicts": {"pass": len(results) - len(failed), "counterexample": len(failed)},
    }
    _emit(args, cfg, manifest, to_jsonl(stamp([r.record() for r in results], manifest.hash)), "jsonl")
    return EXIT_COUNTEREXAMPLE if failed else EXIT_OK


def cmd_audit(args, argv, cfg: Config) -> int:
    manifest = _manifest(args, argv, cfg, {"max_k": args.max_k})
    try:
        reports = audit_binomial(args.max_k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    failures = sum(len(r.failures) for r in reports)
    manifest.totals = {"checks": sum(r.checks for r in reports), "failures": failures}
    _emit(args, cfg, manifest, to_jsonl(stamp([r.record() for r in reports], manifest.hash)), "jsonl")
    return EXIT_COUNTEREXAMPLE if failures else EXIT_OK


def cmd_table(args, argv, cfg: Config) -> int:
    ns = parse_range(args.n_range)
    for n in ns:
        check_n(n, cfg.max_n)
    if args.checkpoint and len(ns) > 1:
        raise UsageError("--checkpoint needs a single n")
    manifest = _manifest(args, argv, cfg, {"n_range": [ns[0], ns[-1]], "format": args.format})
    rows = []
    for n in ns:
        census = _census(args, cfg, n)
        for p in valid_params(n):
            for kind in CLASS_KINDS:
                rows.append(empirical_constant(n, FamilyClassSelector(kind, p), census).record())
    manifest.totals = {"rows": len(rows)}
    rows = stamp(rows, manifest.hash)
    body = to_csv(rows) if args.format == "csv" else to_jsonl(rows)
    _emit(args, cfg, manifest, body, args.format if args.format == "csv" else "jsonl")
    return EXIT_OK


COMMANDS = {
    "enumerate": cmd_enumerate,
    "constant": cmd_constant,
    "verify": cmd_verify,
    "audit": cmd_audit,
    "table": cmd_table,
}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="ucslab: %(message)s", stream=sys.stderr, force=True)
    flags = {"workers": getattr(args, "workers", None), "out_dir": args.out_dir}
    try:
        cfg = load_config(flags, config_path=args.config)
        return COMMANDS[args.command](args, argv, cfg)
    except (UsageError, ConfigError, EnumerationError, FamilyError, ValueError) as exc:
        print(f"ucslab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RunInterrupted as exc:
        print(f"ucslab: {exc}", file=sys.stderr)
        return EXIT_ENVIRONMENT
    except (CheckpointError, OSError) as exc:
        print(f"ucslab: error: {exc}", file=sys.stderr)
        return EXIT_ENVIRONMENT


def run() -> None:
    sys.exit(main())
