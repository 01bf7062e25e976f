"""Command-line front end.

Subcommands:

    bench   timed enroll/auth/transact cycles, JSON report + text table
    attack  the full adversary suite plus literal-mode defect demos
    demo    deterministic end-to-end walkthrough, transcript to a file
    audit   replay and re-verify a demo transcript

Exit codes: 0 success, 1 usage error, 2 acceptance failure.
"""

from __future__ import annotations

import argparse
import sys

from . import zkp
from .bench import run_bench, validate_report
from .params import ENV_VAR, PRESETS, resolve_params
from .scenarios import SUITE_NAMES, audit_transcript, run_attack_suite, run_demo

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2


class _Parser(argparse.ArgumentParser):
    """argparse with the documented usage exit code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="pufzk", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="run the benchmark harness")
    bench.add_argument("--iterations", type=int, default=50)
    bench.add_argument("--mode", choices=list(zkp.MODES), default=zkp.MODE_CORRECTED)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--out", default=None, help="path for the JSON report")
    bench.add_argument("--params", default=None,
                       help=f"parameter preset ({', '.join(sorted(PRESETS))}); "
                            f"env {ENV_VAR} overrides the default")

    attack = sub.add_parser("attack", help="run the adversary suite")
    attack.add_argument("--out", default=None, help="path for the JSON summary")
    attack.add_argument("--seed", type=int, default=0)
    attack.add_argument("--suite", default=None,
                        help=f"comma-separated subset of: {', '.join(SUITE_NAMES)}")
    attack.add_argument("--scale", type=float, default=1.0,
                        help="scale factor for trial counts (quick runs)")
    attack.add_argument("--params", default=None)

    demo = sub.add_parser("demo", help="deterministic protocol walkthrough")
    demo.add_argument("--seed", type=int, default=0)
    demo.add_argument("--out", default="demo.transcript",
                      help="transcript output path (line-delimited hex)")
    demo.add_argument("--params", default=None)

    audit = sub.add_parser("audit", help="replay and re-verify a transcript")
    audit.add_argument("path", help="transcript file produced by demo")

    return parser


def _cmd_bench(args) -> int:
    try:
        params = resolve_params(args.params)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.iterations < 1:
        print("error: --iterations must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    report = run_bench(iterations=args.iterations, mode=args.mode,
                       seed=args.seed, params=params)
    problems = validate_report(report.to_dict())
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(report.to_json() + "\n")
        except OSError as exc:
            print(f"error: cannot write report: {exc}", file=sys.stderr)
            return EXIT_USAGE
        print(f"wrote {args.out}")
    print(report.to_text())
    if problems:
        for p in problems:
            print(f"report invariant violated: {p}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def _cmd_attack(args) -> int:
    try:
        params = resolve_params(args.params)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    suites = None
    if args.suite is not None:
        names = tuple(s.strip() for s in args.suite.split(",") if s.strip())
        if not names:
            print("error: --suite given but empty", file=sys.stderr)
            return EXIT_USAGE
        unknown = set(names) - set(SUITE_NAMES)
        if unknown:
            print(f"error: unknown suite(s): {', '.join(sorted(unknown))}", file=sys.stderr)
            return EXIT_USAGE
        suites = names
    report = run_attack_suite(seed=args.seed, params=params, suites=suites, scale=args.scale)
    if args.out:
        import json
        try:
            with open(args.out, "w") as fh:
                json.dump(report.to_dict(), fh, indent=2)
                fh.write("\n")
        except OSError as exc:
            print(f"error: cannot write summary: {exc}", file=sys.stderr)
            return EXIT_USAGE
        print(f"wrote {args.out}")
    print(report.to_text())
    return EXIT_OK if report.passed() else EXIT_FAILURE


def _cmd_demo(args) -> int:
    try:
        params = resolve_params(args.params)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    transcript, summary = run_demo(seed=args.seed, params=params)
    try:
        with open(args.out, "w") as fh:
            fh.write(transcript)
    except OSError as exc:
        print(f"error: cannot write transcript: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"wrote {args.out}")
    for key, value in summary.items():
        print(f"  {key}: {value}")
    if not summary["chain_ok"] or not summary["replay_rejected"]:
        return EXIT_FAILURE
    return EXIT_OK


def _cmd_audit(args) -> int:
    try:
        with open(args.path) as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read transcript: {exc}", file=sys.stderr)
        return EXIT_USAGE
    ok, findings = audit_transcript(text)
    for line in findings:
        print(f"  {line}")
    print("audit: PASS" if ok else "audit: FAIL")
    return EXIT_OK if ok else EXIT_FAILURE


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    handlers = {
        "bench": _cmd_bench,
        "attack": _cmd_attack,
        "demo": _cmd_demo,
        "audit": _cmd_audit,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
