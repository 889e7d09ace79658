"""Property-based testing with metamorphic relations and choice-log shrinking."""

from .core import (
    DISCARD,
    PASS,
    MetamorphicRelation,
    Property,
    TestConfig,
    TestReport,
    Verdict,
    check,
    compose,
    conjoin,
    fail,
    mr_to_property,
    replay_case,
    run_suite,
)
from .gen import ChoiceLog, Generator, Seed, SizeParams, generate, replay, split
from .shrink import ShrinkOutcome, boundary_descend, candidates, minimize

__all__ = [
    "DISCARD",
    "PASS",
    "ChoiceLog",
    "Generator",
    "MetamorphicRelation",
    "Property",
    "Seed",
    "ShrinkOutcome",
    "SizeParams",
    "TestConfig",
    "TestReport",
    "Verdict",
    "boundary_descend",
    "candidates",
    "check",
    "compose",
    "conjoin",
    "fail",
    "generate",
    "minimize",
    "mr_to_property",
    "replay",
    "replay_case",
    "run_suite",
    "split",
]
