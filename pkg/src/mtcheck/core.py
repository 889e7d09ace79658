"""Properties, metamorphic relations and the checker."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Generic, Sequence, TypeVar

from .gen import (
    ChoiceLog,
    ContractViolation,
    Discarded,
    Generator,
    RandomSource,
    ReplaySource,
    Seed,
    SizeParams,
    split,
)
from .shrink import DEFAULT_BUDGET, ShrinkOutcome, minimize

I = TypeVar("I")
O = TypeVar("O")


@dataclass(frozen=True)
class Verdict:
    status: str  # "pass" | "fail" | "discard"
    message: str = ""

    @property
    def failed(self) -> bool:
        return self.status == "fail"

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @property
    def discarded(self) -> bool:
        return self.status == "discard"


PASS = Verdict("pass")
DISCARD = Verdict("discard")


def fail(message: str = "") -> Verdict:
    return Verdict("fail", message)


def _always(_: Any) -> bool:
    return True


def as_verdict(result: Any) -> Verdict:
    if isinstance(result, Verdict):
        return result
    if result is True or result is None:
        return PASS
    if result is False:
        return fail("property returned False")
    raise TypeError(f"property check returned {result!r}; expected a Verdict or bool")


@dataclass(frozen=True)
class Property(Generic[I]):
    name: str
    generator: Generator[I]
    check: Callable[[I], Any]
    valid: Callable[[I], bool] = _always
    render: Callable[[I], str] = str

    def verdict(self, value: I) -> Verdict:
        """Run the precondition and the check; exceptions count as failures."""
        if not self.valid(value):
            return DISCARD
        try:
            return as_verdict(self.check(value))
        except Exception as exc:  # the subject under test may raise anything
            return fail(f"{type(exc).__name__}: {exc}")


@dataclass(frozen=True)
class MetamorphicRelation(Generic[I, O]):
    name: str
    source_gen: Generator[I]
    followup: Callable[[I], I]
    relate: Callable[[O, O], bool]
    subject: Callable[[I], O]
    valid: Callable[[I], bool] = _always
    render: Callable[[I], str] = str


def mr_to_property(mr: MetamorphicRelation[I, O]) -> Property[I]:
    def check(source: I) -> Verdict:
        followup = mr.followup(source)
        out_source = mr.subject(source)
        out_followup = mr.subject(followup)
        if mr.relate(out_source, out_followup):
            return PASS
        return fail(f"{mr.name}: source output {out_source!r} vs follow-up output {out_followup!r}")

    return Property(mr.name, mr.source_gen, check, mr.valid, mr.render)


def conjoin(props: Sequence[Property[I]], name: str | None = None) -> Property[I]:
    props = list(props)
    if not props:
        raise ContractViolation("conjoin needs at least one property")
    first = props[0]
    for p in props[1:]:
        if p.generator is not first.generator or p.valid is not first.valid:
            raise ContractViolation(f"{p.name} does not share the generator and precondition of {first.name}")
    if len(props) == 1 and name is None:
        return first

    def check(value: I) -> Verdict:
        for p in props:
            try:
                verdict = as_verdict(p.check(value))
            except Exception as exc:
                verdict = fail(f"{type(exc).__name__}: {exc}")
            if verdict.failed:
                return fail(f"[{p.name}] {verdict.message}")
            if verdict.discarded:
                return verdict
        return PASS

    joined = name or " & ".join(p.name for p in props)
    return Property(joined, first.generator, check, first.valid, first.render)


def compose(
    mr1: MetamorphicRelation[I, O], mr2: MetamorphicRelation[I, O], name: str | None = None
) -> MetamorphicRelation[I, O]:
    """Chain two follow-ups, keeping ``mr1``'s relation.

    Only sound when both relations are equivalences, which the caller
    asserts by composing them; the composed name records the assumption.
    """
    if mr1.subject is not mr2.subject:
        raise ContractViolation(f"cannot compose {mr1.name} and {mr2.name}: different subjects")
    if mr1.source_gen is not mr2.source_gen:
        raise ContractViolation(f"cannot compose {mr1.name} and {mr2.name}: different source generators")
    f1, f2 = mr1.followup, mr2.followup
    return MetamorphicRelation(
        name=f"{name or mr1.name + ' ; ' + mr2.name} [equivalence assumed]",
        source_gen=mr1.source_gen,
        followup=lambda i: f2(f1(i)),
        relate=mr1.relate,
        subject=mr1.subject,
        valid=mr1.valid,
        render=mr1.render,
    )


@dataclass(frozen=True)
class TestConfig:
    __test__ = False

    num_tests: int = 100
    seed: Seed = field(default_factory=lambda: Seed(0))
    size: SizeParams = field(default_factory=SizeParams)
    max_shrink_budget: int = DEFAULT_BUDGET
    max_discard_ratio: float = 10.0

    def __post_init__(self) -> None:
        if self.num_tests < 1:
            raise ContractViolation("num_tests must be >= 1")
        if self.max_shrink_budget < 1:
            raise ContractViolation("max_shrink_budget must be >= 1")
        if self.max_discard_ratio <= 0:
            raise ContractViolation("max_discard_ratio must be positive")


@dataclass(frozen=True)
class TestReport:
    __test__ = False

    property_name: str
    status: str  # "passed" | "failed" | "gave_up"
    tests_run: int
    discarded: int
    seed: Seed
    counterexample: str | None = None
    message: str = ""
    shrink: ShrinkOutcome | None = None
    replay_log: ChoiceLog | None = None

    @property
    def passed(self) -> bool:
        return self.status == "passed"

    def to_dict(self) -> dict[str, Any]:
        return {
            "property": self.property_name,
            "status": self.status,
            "tests_run": self.tests_run,
            "discarded": self.discarded,
            "counterexample": self.counterexample,
            "seed": self.seed.state,
            "replay": self.replay_log.encode() if self.replay_log is not None else None,
            "shrink_steps": self.shrink.steps_taken if self.shrink is not None else 0,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def replay_case(prop: Property[I], log: ChoiceLog, depth: int = SizeParams().depth) -> tuple[Verdict, I | None]:
    """Re-execute one case from its log.  Raises ReplayUnderflow on a short log."""
    src = ReplaySource(log)
    try:
        value = prop.generator.produce(src, depth)
    except Discarded:
        return DISCARD, None
    return prop.verdict(value), value


def check(prop: Property[I], cfg: TestConfig = TestConfig()) -> TestReport:
    """Run ``prop`` on up to ``cfg.num_tests`` generated cases.

    Each case draws from the left half of a split; the right half seeds the
    next case.  The first failure is shrunk and reported.
    """
    depth = cfg.size.depth
    discard_limit = cfg.max_discard_ratio * cfg.num_tests
    chain = cfg.seed
    run = 0
    discarded = 0
    while run < cfg.num_tests:
        if discarded > discard_limit:
            return TestReport(prop.name, "gave_up", run, discarded, cfg.seed)
        case_seed, chain = split(chain)
        src = RandomSource(case_seed)
        try:
            value = prop.generator.produce(src, depth)
        except Discarded:
            discarded += src.rejections
            continue
        discarded += src.rejections
        verdict = prop.verdict(value)
        if verdict.discarded:
            discarded += 1
            continue
        run += 1
        if verdict.failed:
            outcome = minimize(
                prop.verdict, prop.generator, src.log, cfg.max_shrink_budget, depth, prop.render
            )
            final = prop.verdict(outcome.minimal_value)
            return TestReport(
                prop.name,
                "failed",
                run,
                discarded,
                case_seed,
                counterexample=outcome.minimal_value_description,
                message=final.message,
                shrink=outcome,
                replay_log=outcome.minimal_log,
            )
    if discarded > discard_limit:
        return TestReport(prop.name, "gave_up", run, discarded, cfg.seed)
    return TestReport(prop.name, "passed", run, discarded, cfg.seed)


def run_suite(props: Sequence[Property], cfg: TestConfig = TestConfig(), parallel: bool = False) -> list[TestReport]:
    configs = []
    chain = cfg.seed
    for _ in props:
        prop_seed, chain = split(chain)
        configs.append(
            TestConfig(cfg.num_tests, prop_seed, cfg.size, cfg.max_shrink_budget, cfg.max_discard_ratio)
        )
    if parallel and len(props) > 1:
        with ThreadPoolExecutor() as pool:
            return list(pool.map(check, props, configs))
    return [check(p, c) for p, c in zip(props, configs)]
