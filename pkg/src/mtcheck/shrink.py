"""Choice-log shrinking and integer boundary descent.

Shrinking never looks at the failing value itself.  It edits the choice log
that produced it and replays the edited log through the original generator,
so every shrunk value is one the generator could have produced and passes the
same validity filter as freshly generated input.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, Iterator

from .gen import (
    Choice,
    ChoiceLog,
    ContractViolation,
    Discarded,
    Generator,
    RandomSource,
    ReplaySource,
    ReplayUnderflow,
    Seed,
    SizeParams,
    mix64,
)

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 2000
RANDOM_REDUCTIONS = 4
SMALL_BLOCKS = (1, 2, 3, 4)


@dataclass(frozen=True)
class ShrinkOutcome:
    minimal_log: ChoiceLog
    minimal_value_description: str
    steps_taken: int
    candidates_tried: int
    minimal_value: Any = None


def _log_seed(log: ChoiceLog) -> Seed:
    h = 0
    for value, bound in log:
        h = mix64((h * 31 + value * 1_000_003 + bound) & ((1 << 64) - 1))
    return Seed(h)


def candidates(log: ChoiceLog) -> Iterator[ChoiceLog]:
    """Yield smaller variants of ``log`` in shrink order.

    Passes: delete a contiguous block (block size halving from the full
    length down to 1), zero one choice, then replace one choice by smaller
    values drawn below it, finishing each position with ``value - 1``.  The
    random draws are seeded from the log, so the stream is a function of the
    log alone.
    """
    choices = log.choices
    n = len(choices)
    if n == 0:
        return
    seen: set[tuple[Choice, ...]] = set()

    def fresh(cand: tuple[Choice, ...]) -> bool:
        if cand in seen:
            return False
        seen.add(cand)
        return True

    # halving sizes, plus the short blocks that one wrapper node draws
    sizes = {n >> i for i in range(n.bit_length())} | {s for s in SMALL_BLOCKS if s <= n}
    for size in sorted(sizes, reverse=True):
        for start in range(0, n - size + 1):
            cand = choices[:start] + choices[start + size :]
            if fresh(cand):
                yield ChoiceLog(cand)

    for i, (value, bound) in enumerate(choices):
        if value > 0:
            cand = choices[:i] + (Choice(0, bound),) + choices[i + 1 :]
            if fresh(cand):
                yield ChoiceLog(cand)

    rng = RandomSource(_log_seed(log))
    for i, (value, bound) in enumerate(choices):
        if value <= 1:
            continue
        picks = [rng.draw(value) for _ in range(RANDOM_REDUCTIONS)]
        picks.append(value - 1)
        for smaller in picks:
            if smaller == 0:
                continue
            cand = choices[:i] + (Choice(smaller, bound),) + choices[i + 1 :]
            if fresh(cand):
                yield ChoiceLog(cand)


def _fails(verdict: Any) -> bool:
    return getattr(verdict, "failed", verdict is False)


def minimize(
    check: Callable[[Any], Any],
    g: Generator,
    failing: ChoiceLog,
    budget: int = DEFAULT_BUDGET,
    depth: int = SizeParams().depth,
    render: Callable[[Any], str] = str,
    on_step: Callable[[ChoiceLog], None] | None = None,
) -> ShrinkOutcome:
    """Greedy first-success descent over :func:`candidates`.

    ``check`` maps a value to a verdict (anything with a ``failed``
    attribute, or a bool where False means failure).  Candidates that
    underflow, get discarded by a filter, or do not fail are skipped.
    ``on_step`` sees each accepted log.
    """
    if budget < 1:
        raise ContractViolation("shrink budget must be >= 1")
    src = ReplaySource(failing)
    value = g.produce(src, depth)
    if not _fails(check(value)):
        raise ContractViolation("minimize called with a log that does not fail")
    current = src.log
    steps = 0
    tried = 0
    improved = True
    while improved and tried < budget:
        improved = False
        for cand in candidates(current):
            if tried >= budget:
                break
            tried += 1
            replay_src = ReplaySource(cand)
            try:
                cand_value = g.produce(replay_src, depth)
            except (ReplayUnderflow, Discarded):
                continue
            if not _fails(check(cand_value)):
                continue
            current = replay_src.log
            value = cand_value
            steps += 1
            improved = True
            if on_step is not None:
                on_step(current)
            break
    log.debug("shrink finished: %d steps, %d candidates", steps, tried)
    return ShrinkOutcome(current, render(value), steps, tried, value)


def boundary_descend(
    pred: Callable[[int], bool],
    failing: int,
    floor: int,
    retries_per_level: int = 16,
    seed: Seed = Seed(0),
) -> int:
    """Walk a failing integer down towards the smallest failing value.

    ``pred`` returns True when the property holds.  At each level random
    values in ``[floor, current - 1]`` are tried; a failing one becomes the
    new current value.  After ``retries_per_level`` consecutive passing
    draws, ``current - 1`` is probed directly before giving up.
    """
    if floor > failing:
        raise ContractViolation("floor must not exceed the failing value")
    if retries_per_level < 1:
        raise ContractViolation("retries_per_level must be >= 1")
    rng = RandomSource(seed)
    current = failing
    while current > floor:
        moved = False
        for _ in range(retries_per_level):
            x = floor + rng.draw(current - floor)
            if not pred(x):
                current = x
                moved = True
                break
        if moved:
            continue
        if not pred(current - 1):
            current -= 1
            continue
        break
    return current
