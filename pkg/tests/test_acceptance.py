"""Acceptance gate: one check per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` or directly with
``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import io
import itertools
import json
import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mtcheck import bst, compiler, gen, suites  # noqa: E402
from mtcheck.cli import ReplayFile, main  # noqa: E402
from mtcheck.core import Property, TestConfig, check, replay_case, run_suite  # noqa: E402
from mtcheck.gen import Discarded, Seed, SizeParams, split  # noqa: E402
from mtcheck.shrink import boundary_descend, minimize  # noqa: E402

from oracles import insertion_orders, programs  # noqa: E402

SEEDS_20 = list(range(1, 21))
FUZZ_INVOCATIONS = 10_000

# Failed reports from criteria 2 and 3, re-examined by criterion 4.
_collected_failures: list[tuple[Property, object]] = []


def _line(number: int, title: str, ok: bool, detail: str) -> str:
    return f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} ({detail})"


def criterion_1():
    start = time.perf_counter()
    misses = []
    for seed in [42] + SEEDS_20:
        for name in ("bst-correct", "compiler-correct"):
            for r in run_suite(suites.build(name), TestConfig(seed=Seed(seed))):
                if r.status != "passed" or r.tests_run != 100:
                    misses.append(f"{name}:{r.property_name}@{seed}")
    elapsed = time.perf_counter() - start
    ok = not misses and elapsed < 5.0
    return ok, f"{len(misses)} properties short of 100/100, {elapsed:.2f}s of 5s"


def criterion_2():
    prop = suites.boundary_property()
    minima = []
    for seed in range(50):
        report = check(prop, TestConfig(seed=Seed(seed)))
        if report.status == "failed":
            _collected_failures.append((prop, report))
        minima.append(report.counterexample)
    exact = sum(m == "77" for m in minima)
    return exact == 50, f"{exact}/50 seeds shrink to exactly 77"


def criterion_3():
    detail = []
    ok = True
    for variant in ("fault1", "fault2"):
        joint = suites.find(f"bst-{variant}", f"{variant}/joint")
        detected = 0
        for seed in SEEDS_20:
            report = check(joint, TestConfig(seed=Seed(seed)))
            if report.status == "failed":
                detected += 1
                _collected_failures.append((joint, report))
        ok &= detected >= 19
        detail.append(f"{variant} joint {detected}/20")
        # informational: each single relation on its own
        for single in ("insert-delete", "delete-insert"):
            p = suites.find(f"bst-{variant}", f"{variant}/{single}")
            hits = sum(check(p, TestConfig(seed=Seed(s))).status == "failed" for s in SEEDS_20)
            detail.append(f"{variant} {single} alone {hits}/20")
    return ok, ", ".join(detail)


_fuzz_gen = gen.tuples(
    gen.list_of(gen.int_in_range(0, 50), SizeParams(5, 6)),
    gen.int_in_range(0, 30),
).such_that(lambda c: len(c[0]) % 2 == 0, max_retries=20)


def _fuzz_valid(c) -> bool:
    return all(x != 13 for x in c[0])


def criterion_4():
    if not _collected_failures:
        criterion_2()
        criterion_3()
    violations = 0
    for prop, report in _collected_failures:
        value = report.shrink.minimal_value
        if not (prop.valid(value) and prop.verdict(value).failed):
            violations += 1
    reported = len(_collected_failures)

    start = time.perf_counter()
    seed, runs = Seed(4), 0
    while runs < FUZZ_INVOCATIONS:
        here, seed = split(seed)
        try:
            value, log = gen.generate(_fuzz_gen, here)
        except Discarded:
            continue
        limit = here.state % 120
        prop = Property("fuzz", _fuzz_gen, lambda c, lim=limit: sum(c[0]) + c[1] < lim, _fuzz_valid)
        if not prop.verdict(value).failed:
            continue
        out = minimize(prop.verdict, _fuzz_gen, log, budget=200)
        m = out.minimal_value
        if not (_fuzz_valid(m) and len(m[0]) % 2 == 0 and prop.verdict(m).failed):
            violations += 1
        runs += 1
    elapsed = time.perf_counter() - start
    return violations == 0, f"{violations} violations over {reported} reported failures and {runs} fuzzed shrinks, {elapsed:.1f}s"


def criterion_5():
    start = time.perf_counter()
    mismatches = 0
    probes = range(-1, 5)
    orders = list(insertion_orders(range(4)))
    for order in orders:
        t, model = bst.LEAF, []
        for k in order:
            t = bst.insert(k, 10 + k, t)
            model = bst.model_insert(k, 10 + k, model)
        mismatches += bst.to_sorted_list(t) != model
        for k in probes:
            mismatches += bst.to_sorted_list(bst.insert(k, 0, t)) != bst.model_insert(k, 0, model)
            mismatches += bst.to_sorted_list(bst.delete(k, t)) != bst.model_delete(k, model)
            mismatches += bst.lookup(k, t) != bst.model_lookup(k, model)
    progs = 0
    for p in programs(3):
        progs += 1
        code = compiler.compile_program(p)
        for x in range(-2, 3):
            mismatches += compiler.run(code, x) != compiler.interpret(p, x)
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 60.0
    return ok, f"{mismatches} mismatches over {len(orders)} insertion orders and {progs} programs, {elapsed:.1f}s of 60s"


def _cli(*argv) -> tuple[int, str]:
    buf = io.StringIO()
    return main(list(argv), out=buf), buf.getvalue()


def criterion_6(tmp_dir: Path | None = None):
    differing = 0
    unreproduced = 0
    failed_reports = 0
    for suite in ("bst", "compiler", "reverse", "boundary"):
        for seed in ("42", "7"):
            args = ("run", "--suite", suite, "--seed", seed, "--json")
            first, second = _cli(*args), _cli(*args)
            differing += first != second
            for r in json.loads(first[1]):
                if r["status"] != "failed":
                    continue
                failed_reports += 1
                record = ReplayFile(r["seed"], suite, r["property"], gen.ChoiceLog.decode(r["replay"]))
                verdict, _ = replay_case(suites.find(suite, r["property"]), record.log)
                unreproduced += not verdict.failed
    if tmp_dir is not None:
        path = tmp_dir / "replay.txt"
        _cli("run", "--suite", "compiler-fault", "--seed", "42", "--save-replay", str(path))
        unreproduced += _cli("replay", str(path))[0] != 1
    ok = differing == 0 and unreproduced == 0 and failed_reports > 0
    return ok, f"{differing} differing JSON pairs, {unreproduced}/{failed_reports} failures not reproduced by replay"


def criterion_7():
    rng = random.Random(77)
    disagreements = 0
    for i in range(50):
        threshold = rng.randint(0, 200)
        pred = lambda x, t=threshold: x < t  # noqa: E731
        start = rng.randint(threshold, 200)
        scan = next(x for x in range(0, 201) if not pred(x))
        disagreements += boundary_descend(pred, start, 0, seed=Seed(i)) != scan
    return disagreements == 0, f"{disagreements}/50 predicates disagree with the linear scan"


TITLES = {
    1: "correct suites 100/100 on seed 42 and 20 more seeds",
    2: "x<77 shrinks to 77 on a 50-seed sweep",
    3: "joint relations detect both BST faults",
    4: "shrunk counterexamples stay valid and failing",
    5: "oracle equivalence at desk scale",
    6: "deterministic JSON and reproducible replays",
    7: "boundary descent matches linear scan",
}
CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6, 7: criterion_7}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys, tmp_path):
    fn = CRITERIA[number]
    ok, detail = fn(tmp_path) if number == 6 else fn()
    with capsys.disabled():
        print("\n" + _line(number, TITLES[number], ok, detail))
    assert ok, detail


if __name__ == "__main__":
    import tempfile

    all_ok = True
    for number, fn in CRITERIA.items():
        if number == 6:
            with tempfile.TemporaryDirectory() as d:
                ok, detail = fn(Path(d))
        else:
            ok, detail = fn()
        all_ok &= ok
        print(_line(number, TITLES[number], ok, detail))
    sys.exit(0 if all_ok else 1)
