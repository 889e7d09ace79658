"""Splittable randomness, choice recording and depth-bounded generators.

Every random decision a generator makes goes through :func:`draw`, which
records a ``(value, bound)`` pair in the source's choice log.  Replaying that
log through the same generator rebuilds the same value, which is what lets the
shrinker work on choice logs instead of on values.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Callable, Generic, Iterable, Iterator, NamedTuple, Sequence, TypeVar

T = TypeVar("T")
U = TypeVar("U")

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
STREAM_SALT = 0x5851F42D4C957F2D


class ContractViolation(ValueError):
    """A caller broke an operation's precondition."""


class ReplayUnderflow(Exception):
    """A replayed choice log ran out before the generator finished."""


class Discarded(Exception):
    """A filtered generator exhausted its retries without a valid value."""


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class Seed:
    """64-bit splittable seed (SplitMix64 finalizer over a counter)."""

    state: int

    def __post_init__(self) -> None:
        if not 0 <= self.state <= MASK64:
            raise ContractViolation(f"seed state out of 64-bit range: {self.state}")

    def split(self) -> tuple[Seed, Seed]:
        return split(self)

    def __str__(self) -> str:
        return str(self.state)


def split(seed: Seed) -> tuple[Seed, Seed]:
    # mix64 is a bijection, so the halves differ for every seed.
    left = mix64((seed.state + GOLDEN_GAMMA) & MASK64)
    right = mix64((seed.state + 2 * GOLDEN_GAMMA) & MASK64)
    return Seed(left), Seed(right)


class Choice(NamedTuple):
    value: int
    bound: int


@dataclass(frozen=True)
class ChoiceLog:
    """Immutable ordered record of bounded draws."""

    choices: tuple[Choice, ...] = ()

    def __post_init__(self) -> None:
        for value, bound in self.choices:
            if bound < 1 or not 0 <= value < bound:
                raise ContractViolation(f"bad choice ({value}, {bound})")

    @classmethod
    def of(cls, pairs: Iterable[tuple[int, int]]) -> ChoiceLog:
        return cls(tuple(Choice(int(v), int(b)) for v, b in pairs))

    def __len__(self) -> int:
        return len(self.choices)

    def __iter__(self) -> Iterator[Choice]:
        return iter(self.choices)

    def __getitem__(self, index):
        return self.choices[index]

    def values(self) -> tuple[int, ...]:
        return tuple(c.value for c in self.choices)

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        """Shrink order: shorter first, then lexicographic on drawn values."""
        return len(self.choices), self.values()

    def encode(self) -> str:
        body = ";".join(f"{v},{b}" for v, b in self.choices)
        return f"v1:{len(self.choices)}:{body}"

    @classmethod
    def decode(cls, text: str) -> ChoiceLog:
        match = _LOG_RE.fullmatch(text)
        if match is None:
            raise ValueError(f"malformed choice log: {text!r}")
        count = int(match.group(1))
        body = match.group(2) or ""
        pairs = [] if body == "" else [p.split(",") for p in body.split(";")]
        if len(pairs) != count:
            raise ValueError(f"choice log declares {count} choices but holds {len(pairs)}")
        try:
            return cls.of((int(v), int(b)) for v, b in pairs)
        except ContractViolation as exc:
            raise ValueError(str(exc)) from exc

    def __str__(self) -> str:
        return self.encode()


_LOG_RE = re.compile(r"v1:(0|[1-9][0-9]*):((?:(?:0|[1-9][0-9]*),[1-9][0-9]*)(?:;(?:0|[1-9][0-9]*),[1-9][0-9]*)*)?")


@dataclass(frozen=True)
class SizeParams:
    depth: int = 5
    magnitude: int = 10

    def __post_init__(self) -> None:
        if self.depth < 0 or self.magnitude < 0:
            raise ContractViolation("size parameters must be non-negative")


class ChoiceSource:
    """Base class for the things generators draw from.

    Subclasses implement ``_next(bound)``; the base class records every draw
    and counts values rejected by :func:`such_that`.
    """

    def __init__(self) -> None:
        self.recorded: list[Choice] = []
        self.rejections = 0

    def draw(self, bound: int) -> int:
        if bound < 1:
            raise ContractViolation(f"draw bound must be >= 1, got {bound}")
        value = self._next(bound)
        self.recorded.append(Choice(value, bound))
        return value

    def _next(self, bound: int) -> int:
        raise NotImplementedError

    @property
    def log(self) -> ChoiceLog:
        return ChoiceLog(tuple(self.recorded))


class RandomSource(ChoiceSource):
    """Fresh choices from a seed's stream."""

    def __init__(self, seed: Seed) -> None:
        super().__init__()
        self._base = seed.state ^ STREAM_SALT
        self._counter = 0

    def _word(self) -> int:
        self._counter += 1
        return mix64((self._base + self._counter * GOLDEN_GAMMA) & MASK64)

    def _next(self, bound: int) -> int:
        if bound == 1:
            return 0
        words = (bound.bit_length() + 63) // 64 + 1
        acc = 0
        for _ in range(words):
            acc = (acc << 64) | self._word()
        return (acc * bound) >> (64 * words)


class ReplaySource(ChoiceSource):
    """Replays a recorded log; recorded values are reduced modulo a changed bound."""

    def __init__(self, log: ChoiceLog) -> None:
        super().__init__()
        self._choices = log.choices
        self._pos = 0

    def _next(self, bound: int) -> int:
        if self._pos >= len(self._choices):
            raise ReplayUnderflow(f"replay exhausted after {self._pos} choices")
        value = self._choices[self._pos].value
        self._pos += 1
        return value % bound

    @property
    def consumed(self) -> int:
        return self._pos


def draw(source: ChoiceSource, bound: int) -> int:
    return source.draw(bound)


class Generator(Generic[T]):
    """A recipe turning a choice source and a depth budget into a value."""

    __slots__ = ("produce", "description")

    def __init__(self, produce: Callable[[ChoiceSource, int], T], description: str = "generator") -> None:
        self.produce = produce
        self.description = description

    def __repr__(self) -> str:
        return f"Generator({self.description})"

    def map(self, f: Callable[[T], U]) -> Generator[U]:
        produce = self.produce
        return Generator(lambda src, depth: f(produce(src, depth)), f"map({self.description})")

    def bind(self, k: Callable[[T], Generator[U]]) -> Generator[U]:
        produce = self.produce

        def run(src: ChoiceSource, depth: int) -> U:
            return k(produce(src, depth)).produce(src, depth)

        return Generator(run, f"bind({self.description})")

    def such_that(self, valid: Callable[[T], bool], max_retries: int = 100) -> Generator[T]:
        return such_that(self, valid, max_retries)


def constant(value: T) -> Generator[T]:
    return Generator(lambda src, depth: value, f"constant({value!r})")


def int_in_range(lo: int, hi: int) -> Generator[int]:
    if lo > hi:
        raise ContractViolation(f"empty range [{lo}, {hi}]")
    width = hi - lo + 1
    return Generator(lambda src, depth: lo + src.draw(width), f"int_in_range({lo}, {hi})")


def booleans() -> Generator[bool]:
    return Generator(lambda src, depth: src.draw(2) == 1, "booleans")


def sampled_from(items: Sequence[T]) -> Generator[T]:
    items = tuple(items)
    if not items:
        raise ContractViolation("sampled_from needs at least one item")
    return Generator(lambda src, depth: items[src.draw(len(items))], f"sampled_from({len(items)} items)")


def frequency(weighted: Sequence[tuple[int, Generator[T]]]) -> Generator[T]:
    """Pick entry i with probability weight_i / sum(weights).

    Earlier entries sit at lower draw values, so shrinking favours them.
    """
    entries = list(weighted)
    if not entries:
        raise ContractViolation("frequency needs at least one entry")
    if any(w < 1 for w, _ in entries):
        raise ContractViolation("frequency weights must be >= 1")
    total = sum(w for w, _ in entries)

    def run(src: ChoiceSource, depth: int):
        ticket = src.draw(total)
        for weight, gen in entries:
            if ticket < weight:
                return gen.produce(src, depth)
            ticket -= weight
        raise AssertionError("unreachable")

    return Generator(run, "frequency(" + ", ".join(f"{w}:{g.description}" for w, g in entries) + ")")


def one_of(*gens: Generator[T]) -> Generator[T]:
    return frequency([(1, g) for g in gens])


def tuples(*gens: Generator[Any]) -> Generator[tuple]:
    def run(src: ChoiceSource, depth: int) -> tuple:
        return tuple(g.produce(src, depth) for g in gens)

    return Generator(run, "tuples(" + ", ".join(g.description for g in gens) + ")")


def vector(elem: Generator[T], length: int) -> Generator[list[T]]:
    def run(src: ChoiceSource, depth: int) -> list[T]:
        return [elem.produce(src, depth) for _ in range(length)]

    return Generator(run, f"vector({elem.description}, {length})")


def list_of(elem: Generator[T], params: SizeParams | None = None) -> Generator[list[T]]:
    """Lists of length 0..params.magnitude with independently drawn elements."""
    params = params or SizeParams()
    limit = params.magnitude

    def run(src: ChoiceSource, depth: int) -> list[T]:
        n = src.draw(limit + 1)
        return [elem.produce(src, depth) for _ in range(n)]

    return Generator(run, f"list_of({elem.description}, max={limit})")


def such_that(g: Generator[T], valid: Callable[[T], bool], max_retries: int = 100) -> Generator[T]:
    if max_retries < 1:
        raise ContractViolation("max_retries must be >= 1")

    def run(src: ChoiceSource, depth: int) -> T:
        for _ in range(max_retries):
            value = g.produce(src, depth)
            if valid(value):
                return value
            src.rejections += 1
        raise Discarded(f"no valid value from {g.description} in {max_retries} tries")

    return Generator(run, f"such_that({g.description})")


def recursive(
    base: Generator[T],
    step: Callable[[Generator[T]], Generator[T]],
    params: SizeParams | None = None,
) -> Generator[T]:
    """Depth-bounded recursion.

    At each level one choice decides between ``base`` (draw 0) and ``step``
    applied to the generator one level down.  With budget 0 only ``base`` is
    used and no choice is drawn.  The budget is ``params.depth`` when given,
    otherwise the depth passed to ``produce``.
    """
    levels: dict[int, Generator[T]] = {}

    def at(budget: int) -> Generator[T]:
        if budget <= 0:
            return base
        if budget not in levels:
            deeper = step(Generator(lambda src, depth: at(budget - 1).produce(src, depth), "recursive"))

            def run(src: ChoiceSource, depth: int) -> T:
                if src.draw(2) == 0:
                    return base.produce(src, depth)
                return deeper.produce(src, depth)

            levels[budget] = Generator(run, f"recursive(depth={budget})")
        return levels[budget]

    if params is not None:
        fixed = params.depth
        return Generator(lambda src, depth: at(fixed).produce(src, depth), f"recursive(depth={fixed})")
    return Generator(lambda src, depth: at(depth).produce(src, depth), "recursive")


def generate(g: Generator[T], seed: Seed, depth: int = SizeParams().depth) -> tuple[T, ChoiceLog]:
    src = RandomSource(seed)
    value = g.produce(src, depth)
    return value, src.log


def replay(g: Generator[T], log: ChoiceLog, depth: int = SizeParams().depth) -> T:
    return g.produce(ReplaySource(log), depth)
