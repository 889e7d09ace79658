"""Named suites the command line can run and replay."""

from __future__ import annotations

from typing import Callable

from . import bst, compiler, gen
from .core import Property
from .gen import SizeParams

BOUNDARY_RANGE = (0, 200)
BOUNDARY_LIMIT = 77


def boundary_property() -> Property[int]:
    """``x < 77`` over [0, 200]; fails, and should shrink to exactly 77."""
    return Property("lt-77", gen.int_in_range(*BOUNDARY_RANGE), lambda x: x < BOUNDARY_LIMIT)


def reverse_properties(params: SizeParams | None = None, reverse: Callable[[list], list] | None = None) -> list[Property]:
    params = params or SizeParams()
    rev = reverse or (lambda xs: xs[::-1])
    ints = gen.int_in_range(0, 9)
    lists = gen.list_of(ints, params)
    snoc = gen.tuples(lists, ints)
    return [
        Property("reverse-involutive", lists, lambda xs: rev(rev(xs)) == xs),
        Property("reverse-snoc", snoc, lambda c: rev(c[0] + [c[1]]) == [c[1]] + rev(c[0])),
        Property("reverse-length", lists, lambda xs: len(rev(xs)) == len(xs)),
    ]


SUITES: dict[str, Callable[[SizeParams], list[Property]]] = {
    "bst": lambda p: bst.suite("correct", p) + bst.suite("fault1", p) + bst.suite("fault2", p),
    "bst-correct": lambda p: bst.suite("correct", p),
    "bst-fault1": lambda p: bst.suite("fault1", p),
    "bst-fault2": lambda p: bst.suite("fault2", p),
    "compiler": lambda p: compiler.suite("correct", p) + compiler.suite("fault", p),
    "compiler-correct": lambda p: compiler.suite("correct", p),
    "compiler-fault": lambda p: compiler.suite("fault", p),
    "reverse": lambda p: reverse_properties(p),
    "boundary": lambda p: [boundary_property()],
}


def build(name: str, params: SizeParams | None = None) -> list[Property]:
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](params or SizeParams())


def find(suite: str, prop_name: str, params: SizeParams | None = None) -> Property:
    for prop in build(suite, params):
        if prop.name == prop_name:
            return prop
    raise KeyError(f"suite {suite!r} has no property {prop_name!r}")
