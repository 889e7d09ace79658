"""Brute-force enumerators used as independent oracles.

Nothing here goes through the generators or the tree/compiler code under
test: trees are built structurally and programs are enumerated directly.
"""

from __future__ import annotations

from itertools import combinations, permutations, product

from mtcheck.bst import LEAF, Branch
from mtcheck.compiler import MAX_REPEAT, Bin, Let, Lit, Neg, Ref, Repeat, X


def bst_shapes(keys: tuple[int, ...], value_of=lambda k: 10 + k):
    """Every search tree over exactly ``keys`` (sorted), built node by node."""
    if not keys:
        yield LEAF
        return
    for i, root in enumerate(keys):
        for left in bst_shapes(keys[:i], value_of):
            for right in bst_shapes(keys[i + 1 :], value_of):
                yield Branch(left, root, value_of(root), right)


def small_trees(key_pool=range(4), max_nodes=3, value_of=lambda k: 10 + k):
    for n in range(max_nodes + 1):
        for subset in combinations(key_pool, n):
            yield from bst_shapes(subset, value_of)


def insertion_orders(key_pool=range(4)):
    """All insertion orders of all subsets of ``key_pool``."""
    for n in range(len(key_pool) + 1):
        for subset in combinations(key_pool, n):
            yield from permutations(subset)


def programs(depth: int, scope: tuple[str, ...] = (), literals=(0, 1), repeats=range(MAX_REPEAT + 1)):
    """All programs of AST depth <= ``depth`` (a leaf has depth 1)."""
    if depth < 1:
        return
    for v in literals:
        yield Lit(v)
    yield X
    for name in scope:
        yield Ref(name)
    if depth == 1:
        return
    sub = list(programs(depth - 1, scope, literals, repeats))
    for a in sub:
        yield Neg(a)
    for op in "+-*":
        for a, b in product(sub, sub):
            yield Bin(op, a, b)
    name = f"y{len(scope)}"
    inner = list(programs(depth - 1, scope + (name,), literals, repeats))
    for bound, body in product(sub, inner):
        yield Let(name, bound, body)
    for n in repeats:
        for body in sub:
            yield Repeat(n, body)


def reference_eval(p, x: int, env=None) -> int:
    """Unbounded-integer evaluation, wrapped once at the end.

    Valid as an oracle for the small programs enumerated here, which never
    leave the 64-bit range.
    """
    env = env or {}
    if isinstance(p, Lit):
        return p.value
    if p is X or type(p).__name__ == "Var":
        return x
    if isinstance(p, Ref):
        return env[p.name]
    if isinstance(p, Neg):
        return -reference_eval(p.arg, x, env)
    if isinstance(p, Bin):
        a, b = reference_eval(p.left, x, env), reference_eval(p.right, x, env)
        return {"+": a + b, "-": a - b, "*": a * b}[p.op]
    if isinstance(p, Let):
        return reference_eval(p.body, x, {**env, p.name: reference_eval(p.bound, x, env)})
    if isinstance(p, Repeat):
        return sum(reference_eval(p.body, x, env) for _ in range(p.count))
    raise TypeError(p)
