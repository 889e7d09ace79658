"""Command-line runner: ``mtcheck run``, ``mtcheck replay`` and ``mtcheck list``.

Exit codes: 0 when everything passed, 1 on any failure or give-up, 2 on
usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import suites
from .core import TestConfig, TestReport, replay_case, run_suite
from .gen import MASK64, ChoiceLog, ReplayUnderflow, Seed, SizeParams

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

REPLAY_TAG = "mtreplay-v1"

log = logging.getLogger("mtcheck")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class ReplayFile:
    seed: int
    suite: str
    property_name: str
    log: ChoiceLog

    def encode(self) -> str:
        return f"{REPLAY_TAG}|{self.seed}|{self.suite}|{self.property_name}|{self.log.encode()}"

    @classmethod
    def decode(cls, text: str) -> ReplayFile:
        text = text.strip()
        parts = text.split("|")
        if len(parts) != 5 or parts[0] != REPLAY_TAG:
            raise ValueError(f"not a {REPLAY_TAG} record: {text!r}")
        _, seed, suite, prop, choices = parts
        if not seed.isdigit() or int(seed) > MASK64:
            raise ValueError(f"bad seed {seed!r}")
        return cls(int(seed), suite, prop, ChoiceLog.decode(choices))


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value <= MASK64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 bits unsigned, got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _add_size_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--depth", type=_non_negative_int, default=SizeParams().depth)
    p.add_argument("--magnitude", type=_non_negative_int, default=SizeParams().magnitude)
    p.add_argument("--json", action="store_true", help="emit JSON instead of one line per property")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mtcheck", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="check every property of a suite")
    run.add_argument("--suite", help="suite name (see `mtcheck list`)")
    run.add_argument("--tests", type=_positive_int, default=100)
    run.add_argument("--seed", type=_u64, default=0)
    run.add_argument("--max-shrinks", type=_positive_int, default=2000)
    run.add_argument("--max-discard-ratio", type=_positive_float, default=10.0)
    run.add_argument("--parallel", action="store_true", help="check properties concurrently")
    run.add_argument("--replay", metavar="PATH", help="replay a saved case instead of running")
    run.add_argument("--save-replay", metavar="PATH", help="write the first failure's replay record here")
    _add_size_flags(run)

    rep = sub.add_parser("replay", help="re-execute a saved failing case")
    rep.add_argument("path")
    _add_size_flags(rep)

    sub.add_parser("list", help="list suites and their properties")
    return parser


def format_report(report: TestReport, suite: str) -> str:
    if report.status == "passed":
        return f"PASS {report.property_name} ({report.tests_run} tests)"
    if report.status == "gave_up":
        return f"GAVE UP {report.property_name} ({report.tests_run} tests, {report.discarded} discarded)"
    record = ReplayFile(report.seed.state, suite, report.property_name, report.replay_log)
    return f"FAIL {report.property_name} — minimal: {report.counterexample} — replay: {record.encode()}"


def _run(args: argparse.Namespace, out) -> int:
    if args.replay:
        return _replay(Path(args.replay), args, out)
    if not args.suite:
        raise UsageError("run needs --suite (or --replay)")
    size = SizeParams(args.depth, args.magnitude)
    try:
        props = suites.build(args.suite, size)
    except KeyError:
        raise UsageError(f"unknown suite {args.suite!r}; known: {', '.join(suites.SUITES)}") from None
    cfg = TestConfig(args.tests, Seed(args.seed), size, args.max_shrinks, args.max_discard_ratio)
    reports = run_suite(props, cfg, parallel=args.parallel)
    if args.json:
        print(json.dumps([r.to_dict() for r in reports], indent=2), file=out)
    else:
        for r in reports:
            print(format_report(r, args.suite), file=out)
            if r.status == "failed" and args.verbose:
                print(f"    {r.message}", file=out)
    failures = [r for r in reports if r.status == "failed"]
    if failures and args.save_replay:
        first = failures[0]
        record = ReplayFile(first.seed.state, args.suite, first.property_name, first.replay_log)
        Path(args.save_replay).write_text(record.encode() + "\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _replay(path: Path, args: argparse.Namespace, out) -> int:
    try:
        record = ReplayFile.decode(path.read_text())
    except OSError as exc:
        raise UsageError(f"cannot read replay file: {exc}") from None
    except ValueError as exc:
        raise UsageError(f"malformed replay file: {exc}") from None
    size = SizeParams(args.depth, args.magnitude)
    try:
        prop = suites.find(record.suite, record.property_name, size)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    try:
        verdict, value = replay_case(prop, record.log, size.depth)
    except ReplayUnderflow as exc:
        raise UsageError(f"replay underflow: {exc}") from None
    rendered = prop.render(value) if value is not None else "<discarded>"
    if args.json:
        print(json.dumps({"property": prop.name, "verdict": verdict.status, "case": rendered, "message": verdict.message}), file=out)
    elif verdict.passed:
        print(f"PASS {prop.name} (replayed) — case: {rendered}", file=out)
    elif verdict.failed:
        print(f"FAIL {prop.name} (replayed) — case: {rendered} — {verdict.message}", file=out)
    else:
        print(f"DISCARD {prop.name} (replayed) — case: {rendered}", file=out)
    return EXIT_OK if verdict.passed else EXIT_FAIL


def _list(out) -> int:
    for name in suites.SUITES:
        print(name, file=out)
        for prop in suites.build(name):
            print(f"  {prop.name}", file=out)
    return EXIT_OK


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING)
    try:
        if args.command == "run":
            return _run(args, out)
        if args.command == "replay":
            return _replay(Path(args.path), args, out)
        return _list(out)
    except UsageError as exc:
        print(f"mtcheck: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
