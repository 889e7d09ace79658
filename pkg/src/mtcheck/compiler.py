"""A tiny expression language, a stack-machine compiler and two-path testing.

Programs are closed over one input ``x``.  All arithmetic wraps at signed
64 bits, identically in the interpreter and the machine.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, NamedTuple, Optional, Union

from . import gen
from .core import MetamorphicRelation, Property, mr_to_property
from .gen import ChoiceSource, Generator, SizeParams

MAX_REPEAT = 4
WORD = 1 << 64
HALF = 1 << 63


def wrap(n: int) -> int:
    return ((n + HALF) % WORD) - HALF


class CompileError(Exception):
    pass


class MachineError(Exception):
    pass


@dataclass(frozen=True)
class Lit:
    value: int


@dataclass(frozen=True)
class Var:
    """The program input ``x``."""


@dataclass(frozen=True)
class Ref:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Program"


@dataclass(frozen=True)
class Bin:
    op: str  # "+", "-", "*"
    left: "Program"
    right: "Program"


@dataclass(frozen=True)
class Let:
    name: str
    bound: "Program"
    body: "Program"


@dataclass(frozen=True)
class Repeat:
    """Sum of ``count`` evaluations of ``body``; zero when ``count`` is 0."""

    count: int
    body: "Program"


Program = Union[Lit, Var, Ref, Neg, Bin, Let, Repeat]
X = Var()

_BIN_OPS = {"+": "ADD", "-": "SUB", "*": "MUL"}


def render(p: Program) -> str:
    """Parenthesized prefix form, e.g. ``(let y0 2 (* y0 x))``."""
    if isinstance(p, Lit):
        return str(p.value)
    if isinstance(p, Var):
        return "x"
    if isinstance(p, Ref):
        return p.name
    if isinstance(p, Neg):
        return f"(neg {render(p.arg)})"
    if isinstance(p, Bin):
        return f"({p.op} {render(p.left)} {render(p.right)})"
    if isinstance(p, Let):
        return f"(let {p.name} {render(p.bound)} {render(p.body)})"
    if isinstance(p, Repeat):
        return f"(repeat {p.count} {render(p.body)})"
    raise CompileError(f"not a program node: {p!r}")


def ast_depth(p: Program) -> int:
    if isinstance(p, (Lit, Var, Ref)):
        return 1
    if isinstance(p, (Neg, Repeat)):
        return 1 + ast_depth(p.arg if isinstance(p, Neg) else p.body)
    if isinstance(p, Bin):
        return 1 + max(ast_depth(p.left), ast_depth(p.right))
    if isinstance(p, Let):
        return 1 + max(ast_depth(p.bound), ast_depth(p.body))
    raise CompileError(f"not a program node: {p!r}")


def count_nodes(p: Program, pred: Callable[[Program], bool]) -> int:
    here = 1 if pred(p) else 0
    if isinstance(p, Neg):
        return here + count_nodes(p.arg, pred)
    if isinstance(p, Bin):
        return here + count_nodes(p.left, pred) + count_nodes(p.right, pred)
    if isinstance(p, Let):
        return here + count_nodes(p.bound, pred) + count_nodes(p.body, pred)
    if isinstance(p, Repeat):
        return here + count_nodes(p.body, pred)
    return here


def interpret(p: Program, x: int, env: Optional[dict[str, int]] = None) -> int:
    env = env or {}
    if isinstance(p, Lit):
        return wrap(p.value)
    if isinstance(p, Var):
        return wrap(x)
    if isinstance(p, Ref):
        if p.name not in env:
            raise CompileError(f"unbound name {p.name}")
        return env[p.name]
    if isinstance(p, Neg):
        return wrap(-interpret(p.arg, x, env))
    if isinstance(p, Bin):
        a = interpret(p.left, x, env)
        b = interpret(p.right, x, env)
        if p.op == "+":
            return wrap(a + b)
        if p.op == "-":
            return wrap(a - b)
        if p.op == "*":
            return wrap(a * b)
        raise CompileError(f"unknown operator {p.op!r}")
    if isinstance(p, Let):
        return interpret(p.body, x, {**env, p.name: interpret(p.bound, x, env)})
    if isinstance(p, Repeat):
        acc = 0
        for _ in range(p.count):
            acc = wrap(acc + interpret(p.body, x, env))
        return acc
    raise CompileError(f"not a program node: {p!r}")


class Instr(NamedTuple):
    op: str
    arg: Optional[int] = None

    def __str__(self) -> str:
        if self.op == "LOAD":
            return "LOAD x"
        return self.op if self.arg is None else f"{self.op} {self.arg}"


StackCode = list[Instr]


def _compile(p: Program, slots: dict[str, int], out: StackCode, swap_sub: bool) -> None:
    if isinstance(p, Lit):
        out.append(Instr("PUSH", p.value))
    elif isinstance(p, Var):
        out.append(Instr("LOAD"))
    elif isinstance(p, Ref):
        if p.name not in slots:
            raise CompileError(f"unbound name {p.name}")
        out.append(Instr("LOADLOCAL", slots[p.name]))
    elif isinstance(p, Neg):
        _compile(p.arg, slots, out, swap_sub)
        out.append(Instr("NEG"))
    elif isinstance(p, Bin):
        if p.op not in _BIN_OPS:
            raise CompileError(f"unknown operator {p.op!r}")
        first, second = p.left, p.right
        if swap_sub and p.op == "-":
            first, second = second, first
        _compile(first, slots, out, swap_sub)
        _compile(second, slots, out, swap_sub)
        out.append(Instr(_BIN_OPS[p.op]))
    elif isinstance(p, Let):
        _compile(p.bound, slots, out, swap_sub)
        slot = len(slots)
        out.append(Instr("STORELOCAL", slot))
        _compile(p.body, {**slots, p.name: slot}, out, swap_sub)
    elif isinstance(p, Repeat):
        # no jumps in the instruction set: the loop is expanded at compile time
        if not 0 <= p.count <= MAX_REPEAT:
            raise CompileError(f"repeat count {p.count} outside [0, {MAX_REPEAT}]")
        out.append(Instr("PUSH", 0))
        for _ in range(p.count):
            _compile(p.body, slots, out, swap_sub)
            out.append(Instr("ADD"))
    else:
        raise CompileError(f"not a program node: {p!r}")


def compile_program(p: Program) -> StackCode:
    out: StackCode = []
    _compile(p, {}, out, swap_sub=False)
    return out


def compile_faulty(p: Program) -> StackCode:
    """Same as compile_program but emits subtraction operands in swapped order."""
    out: StackCode = []
    _compile(p, {}, out, swap_sub=True)
    return out


def run(code: StackCode, x: int) -> int:
    stack: list[int] = []
    slots: dict[int, int] = {}

    def pop() -> int:
        if not stack:
            raise MachineError("stack underflow")
        return stack.pop()

    for ins in code:
        op = ins.op
        if op == "PUSH":
            stack.append(wrap(ins.arg))
        elif op == "LOAD":
            stack.append(wrap(x))
        elif op == "LOADLOCAL":
            if ins.arg not in slots:
                raise MachineError(f"local slot {ins.arg} read before store")
            stack.append(slots[ins.arg])
        elif op == "STORELOCAL":
            slots[ins.arg] = pop()
        elif op == "NEG":
            stack.append(wrap(-pop()))
        elif op in ("ADD", "SUB", "MUL"):
            b = pop()
            a = pop()
            if op == "ADD":
                stack.append(wrap(a + b))
            elif op == "SUB":
                stack.append(wrap(a - b))
            else:
                stack.append(wrap(a * b))
        else:
            raise MachineError(f"unknown instruction {op}")
    if len(stack) != 1:
        raise MachineError(f"program left {len(stack)} values on the stack")
    return stack[0]


# Semantics-preserving rewrites.  Each rewrites the first applicable node in
# pre-order (or the root) and returns the program unchanged otherwise.

def _rewrite_first(p: Program, rule: Callable[[Program], Optional[Program]]) -> tuple[Program, bool]:
    new = rule(p)
    if new is not None:
        return new, True
    if isinstance(p, Neg):
        arg, done = _rewrite_first(p.arg, rule)
        return (Neg(arg), True) if done else (p, False)
    if isinstance(p, Bin):
        left, done = _rewrite_first(p.left, rule)
        if done:
            return replace(p, left=left), True
        right, done = _rewrite_first(p.right, rule)
        return (replace(p, right=right), True) if done else (p, False)
    if isinstance(p, Let):
        bound, done = _rewrite_first(p.bound, rule)
        if done:
            return replace(p, bound=bound), True
        body, done = _rewrite_first(p.body, rule)
        return (replace(p, body=body), True) if done else (p, False)
    if isinstance(p, Repeat):
        body, done = _rewrite_first(p.body, rule)
        return (replace(p, body=body), True) if done else (p, False)
    return p, False


def _substitute(p: Program, name: str, value: Program) -> Program:
    if isinstance(p, Ref):
        return value if p.name == name else p
    if isinstance(p, Neg):
        return Neg(_substitute(p.arg, name, value))
    if isinstance(p, Bin):
        return Bin(p.op, _substitute(p.left, name, value), _substitute(p.right, name, value))
    if isinstance(p, Let):
        bound = _substitute(p.bound, name, value)
        if p.name == name:
            return Let(p.name, bound, p.body)
        return Let(p.name, bound, _substitute(p.body, name, value))
    if isinstance(p, Repeat):
        return Repeat(p.count, _substitute(p.body, name, value))
    return p


def _unroll(p: Program) -> Optional[Program]:
    if not isinstance(p, Repeat):
        return None
    if p.count == 0:
        return Lit(0)
    out = p.body
    for _ in range(p.count - 1):
        out = Bin("+", out, p.body)
    return out


def _inline_let(p: Program) -> Optional[Program]:
    if isinstance(p, Let) and isinstance(p.bound, Lit):
        return _substitute(p.body, p.name, p.bound)
    return None


def _sub_to_neg_add(p: Program) -> Optional[Program]:
    if isinstance(p, Bin) and p.op == "-":
        return Bin("+", p.left, Neg(p.right))
    return None


RULES: dict[str, Callable[[Program], Program]] = {
    "loop-unroll": lambda p: _rewrite_first(p, _unroll)[0],
    "add-zero": lambda p: Bin("+", p, Lit(0)),
    "mul-one": lambda p: Bin("*", p, Lit(1)),
    "double-negate": lambda p: Neg(Neg(p)),
    "let-inline": lambda p: _rewrite_first(p, _inline_let)[0],
    "sub-to-neg-add": lambda p: _rewrite_first(p, _sub_to_neg_add)[0],
}
RULE_NAMES = tuple(RULES)


def transform(p: Program, rule: str) -> Program:
    if rule not in RULES:
        raise KeyError(f"unknown rule {rule!r}")
    return RULES[rule](p)


# Generation.

def gen_program(params: SizeParams | None = None) -> Generator[Program]:
    """Well-formed programs of AST depth at most ``params.depth + 1``.

    Draw value 0 always selects the simplest option (a leaf, literal 0), so
    shrinking pulls programs towards ``0``.
    """
    params = params or SizeParams()
    max_lit = max(params.magnitude, 1)
    budget = params.depth

    def leaf(src: ChoiceSource, scope: tuple[str, ...]) -> Program:
        kind = src.draw(3 if scope else 2)
        if kind == 0:
            return Lit(src.draw(max_lit + 1))
        if kind == 1:
            return X
        return Ref(scope[src.draw(len(scope))])

    def expr(src: ChoiceSource, depth: int, scope: tuple[str, ...]) -> Program:
        # Draw 0 is the leaf and two of three draws recurse.  The draw happens
        # even at depth 0 so a subtree's choices replay the same at any depth.
        stop = src.draw(3) == 0
        if stop or depth <= 0:
            return leaf(src, scope)
        kind = src.draw(6)
        if kind == 0:
            return Neg(expr(src, depth - 1, scope))
        if kind in (1, 2, 3):
            op = "+-*"[kind - 1]
            return Bin(op, expr(src, depth - 1, scope), expr(src, depth - 1, scope))
        if kind == 4:
            name = f"y{len(scope)}"
            bound = expr(src, depth - 1, scope)
            return Let(name, bound, expr(src, depth - 1, scope + (name,)))
        return Repeat(src.draw(MAX_REPEAT + 1), expr(src, depth - 1, scope))

    return Generator(lambda src, depth: expr(src, budget, ()), f"program(depth={budget})")


def gen_input(params: SizeParams | None = None) -> Generator[int]:
    """Integers in [-magnitude, magnitude], zig-zag ordered so draws shrink towards 0."""
    params = params or SizeParams()
    m = params.magnitude
    return gen.int_in_range(0, 2 * m).map(lambda d: (d + 1) // 2 if d % 2 else -(d // 2))


@dataclass(frozen=True)
class CompilerCase:
    program: Program
    rule: str
    x: int

    def __str__(self) -> str:
        return f"program={render(self.program)} rule={self.rule} x={self.x}"


def gen_case(params: SizeParams | None = None) -> Generator[CompilerCase]:
    parts = gen.tuples(gen_program(params), gen.sampled_from(RULE_NAMES), gen_input(params))
    return parts.map(lambda p: CompilerCase(*p))


def mr_compiler(
    compiler: Callable[[Program], StackCode] = compile_program,
    params: SizeParams | None = None,
    name: str = "correct/two-path",
) -> MetamorphicRelation:
    """Compile a program and its rewritten twin; both executables must agree on x."""

    def subject(case: CompilerCase) -> int:
        return run(compiler(case.program), case.x)

    return MetamorphicRelation(
        name=name,
        source_gen=gen_case(params),
        followup=lambda case: replace(case, program=transform(case.program, case.rule)),
        relate=lambda a, b: a == b,
        subject=subject,
    )


def suite(variant: str, params: SizeParams | None = None) -> list[Property]:
    if variant == "correct":
        mr = mr_compiler(compile_program, params, "correct/two-path")
        oracle_gen = gen.tuples(gen_program(params), gen_input(params))
        oracle = Property(
            "correct/interpreter-agreement",
            oracle_gen,
            lambda c: run(compile_program(c[0]), c[1]) == interpret(c[0], c[1]),
            render=lambda c: f"program={render(c[0])} x={c[1]}",
        )
        return [mr_to_property(mr), oracle]
    if variant == "fault":
        return [mr_to_property(mr_compiler(compile_faulty, params, "fault/two-path"))]
    raise KeyError(variant)
