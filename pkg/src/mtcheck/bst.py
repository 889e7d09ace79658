"""Binary search tree subject with injected faults and its metamorphic relations."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional, Union

from . import gen
from .core import MetamorphicRelation, Property, compose, conjoin, mr_to_property
from .gen import Generator, SizeParams

KEY_RANGE = (0, 20)
VALUE_RANGE = (0, 100)


@dataclass(frozen=True)
class Leaf:
    def __str__(self) -> str:
        return "Leaf"


@dataclass(frozen=True)
class Branch:
    left: "Tree"
    key: int
    value: int
    right: "Tree"

    def __str__(self) -> str:
        return f"Branch({self.left}, {self.key}, {self.value}, {self.right})"


Tree = Union[Leaf, Branch]
LEAF = Leaf()

InsertFn = Callable[[int, int, Tree], Tree]
DeleteFn = Callable[[int, Tree], Tree]


def insert(k: int, v: int, t: Tree) -> Tree:
    """Insert a binding; an existing key has its value overwritten."""
    if isinstance(t, Leaf):
        return Branch(LEAF, k, v, LEAF)
    if k < t.key:
        return Branch(insert(k, v, t.left), t.key, t.value, t.right)
    if k > t.key:
        return Branch(t.left, t.key, t.value, insert(k, v, t.right))
    return Branch(t.left, k, v, t.right)


def _pop_min(t: Branch) -> tuple[int, int, Tree]:
    if isinstance(t.left, Leaf):
        return t.key, t.value, t.right
    k, v, rest = _pop_min(t.left)
    return k, v, Branch(rest, t.key, t.value, t.right)


def delete(k: int, t: Tree) -> Tree:
    if isinstance(t, Leaf):
        return t
    if k < t.key:
        return Branch(delete(k, t.left), t.key, t.value, t.right)
    if k > t.key:
        return Branch(t.left, t.key, t.value, delete(k, t.right))
    if isinstance(t.right, Leaf):
        return t.left
    sk, sv, rest = _pop_min(t.right)
    return Branch(t.left, sk, sv, rest)


def lookup(k: int, t: Tree) -> Optional[int]:
    while isinstance(t, Branch):
        if k < t.key:
            t = t.left
        elif k > t.key:
            t = t.right
        else:
            return t.value
    return None


def valid(t: Tree) -> bool:
    """Search-order invariant: left keys < node key < right keys, recursively."""

    def within(node: Tree, lo: Optional[int], hi: Optional[int]) -> bool:
        if isinstance(node, Leaf):
            return True
        if lo is not None and node.key <= lo:
            return False
        if hi is not None and node.key >= hi:
            return False
        return within(node.left, lo, node.key) and within(node.right, node.key, hi)

    return within(t, None, None)


def to_sorted_list(t: Tree) -> list[tuple[int, int]]:
    out: list[tuple[int, int]] = []

    def walk(node: Tree) -> None:
        if isinstance(node, Branch):
            walk(node.left)
            out.append((node.key, node.value))
            walk(node.right)

    walk(t)
    return out


def equivalent(t1: Tree, t2: Tree) -> bool:
    return to_sorted_list(t1) == to_sorted_list(t2)


def size(t: Tree) -> int:
    return 0 if isinstance(t, Leaf) else 1 + size(t.left) + size(t.right)


def height(t: Tree) -> int:
    return 0 if isinstance(t, Leaf) else 1 + max(height(t.left), height(t.right))


def from_bindings(pairs, ins: InsertFn = insert) -> Tree:
    t: Tree = LEAF
    for k, v in pairs:
        t = ins(k, v, t)
    return t


# Association-list model.  Entries are kept sorted by key with unique keys.

def model_insert(k: int, v: int, model: list[tuple[int, int]]) -> list[tuple[int, int]]:
    return sorted([(mk, mv) for mk, mv in model if mk != k] + [(k, v)])


def model_delete(k: int, model: list[tuple[int, int]]) -> list[tuple[int, int]]:
    return [(mk, mv) for mk, mv in model if mk != k]


def model_lookup(k: int, model: list[tuple[int, int]]) -> Optional[int]:
    return dict(model).get(k)


# Faulty variants.

def insert_fault1(k: int, v: int, t: Tree) -> Tree:
    """Drops the original tree and returns a single node."""
    return Branch(LEAF, k, v, LEAF)


def _merge(left: Tree, right: Tree) -> Tree:
    # graft right at the rightmost leaf of left
    if isinstance(left, Leaf):
        return right
    return Branch(left.left, left.key, left.value, _merge(left.right, right))


def delete_fault2(k: int, t: Tree) -> Tree:
    """Returns only the merged subtrees of the deleted node, losing its ancestors."""
    node = t
    while isinstance(node, Branch):
        if k < node.key:
            node = node.left
        elif k > node.key:
            node = node.right
        else:
            return _merge(node.left, node.right)
    return t


VARIANTS: dict[str, tuple[InsertFn, DeleteFn]] = {
    "correct": (insert, delete),
    "fault1": (insert_fault1, delete),
    "fault2": (insert, delete_fault2),
}


# Generators.

def gen_tree(
    params: SizeParams | None = None,
    key_range: tuple[int, int] = KEY_RANGE,
    value_range: tuple[int, int] = VALUE_RANGE,
) -> Generator[Tree]:
    """Random key list plus a value per key, folded into Leaf with ``insert``."""
    params = params or SizeParams()
    keys = gen.list_of(gen.int_in_range(*key_range), params)
    values = gen.int_in_range(*value_range)
    pairs = keys.bind(lambda ks: gen.vector(values, len(ks)).map(lambda vs: list(zip(ks, vs))))
    return Generator(lambda src, depth: from_bindings(pairs.produce(src, depth)), "tree")


@dataclass(frozen=True)
class OpCase:
    """Source input shared by the operation-sequence relations.

    ``keys[i]``/``values[i]`` are the arguments of step ``i`` of a script;
    ``order`` is the sequence in which the script's steps run.
    """

    tree: Tree
    keys: tuple[int, ...]
    values: tuple[int, ...]
    order: tuple[int, ...]

    def __str__(self) -> str:
        return f"tree={self.tree} keys={self.keys} values={self.values} order={self.order}"


def gen_case(n_steps: int = 2, params: SizeParams | None = None) -> Generator[OpCase]:
    params = params or SizeParams()
    parts = gen.tuples(
        gen_tree(params),
        gen.vector(gen.int_in_range(*KEY_RANGE), n_steps),
        gen.vector(gen.int_in_range(*VALUE_RANGE), n_steps),
    )
    order = tuple(range(n_steps))
    return parts.map(lambda p: OpCase(p[0], tuple(p[1]), tuple(p[2]), order))


def valid_case(case: OpCase) -> bool:
    # The insert/delete relations are false when the two keys coincide (one side
    # keeps the binding, the other deletes it), so the keys must be distinct.
    return valid(case.tree) and len(set(case.keys)) == len(case.keys)


Script = tuple[tuple[str, int], ...]

SCRIPT_INSERT_DELETE: Script = (("delete", 1), ("insert", 0))  # insert k v (delete k' t)
SCRIPT_DELETE_INSERT: Script = (("insert", 1), ("delete", 0))  # delete k (insert k' v' t)
SCRIPT_INSERT_INSERT: Script = (("insert", 0), ("insert", 1))
SCRIPT_INSERT3: Script = (("insert", 0), ("insert", 1), ("insert", 2))


def run_script(script: Script, case: OpCase, ins: InsertFn, dele: DeleteFn) -> list[tuple[int, int]]:
    t = case.tree
    for step in case.order:
        op, arg = script[step]
        if op == "insert":
            t = ins(case.keys[arg], case.values[arg], t)
        else:
            t = dele(case.keys[arg], t)
    return to_sorted_list(t)


def swap_steps(i: int, j: int) -> Callable[[OpCase], OpCase]:
    def followup(case: OpCase) -> OpCase:
        order = list(case.order)
        order[i], order[j] = order[j], order[i]
        return replace(case, order=tuple(order))

    return followup


def _same(a: list, b: list) -> bool:
    return a == b


class BstRelations:
    """The relations for one insert/delete implementation pair.

    Relations built from the same instance share generators, subjects and
    the precondition, so they can be conjoined and composed.
    """

    def __init__(self, variant: str = "correct", params: SizeParams | None = None) -> None:
        self.variant = variant
        self.ins, self.dele = VARIANTS[variant]
        self.params = params or SizeParams()
        self.pair_gen = gen_case(2, self.params)
        self.triple_gen = gen_case(3, self.params)
        self._subjects: dict[Script, Callable[[OpCase], list]] = {}

    def subject(self, script: Script) -> Callable[[OpCase], list]:
        if script not in self._subjects:
            ins, dele = self.ins, self.dele
            self._subjects[script] = lambda case: run_script(script, case, ins, dele)
        return self._subjects[script]

    def _mr(self, name: str, script: Script, source: Generator[OpCase], i: int = 0, j: int = 1) -> MetamorphicRelation:
        return MetamorphicRelation(
            name=f"{self.variant}/{name}",
            source_gen=source,
            followup=swap_steps(i, j),
            relate=_same,
            subject=self.subject(script),
            valid=valid_case,
        )

    def insert_delete(self) -> MetamorphicRelation:
        """insert k v (delete k' t) = delete k' (insert k v t)"""
        return self._mr("insert-delete", SCRIPT_INSERT_DELETE, self.pair_gen)

    def delete_insert(self) -> MetamorphicRelation:
        """delete k (insert k' v' t) = insert k' v' (delete k t)"""
        return self._mr("delete-insert", SCRIPT_DELETE_INSERT, self.pair_gen)

    def insert_commute(self) -> MetamorphicRelation:
        return self._mr("insert-commute", SCRIPT_INSERT_INSERT, self.pair_gen)

    def insert_rotate(self) -> MetamorphicRelation:
        """Three inserts, first and second swapped, then second and third."""
        first = self._mr("swap-12", SCRIPT_INSERT3, self.triple_gen, 0, 1)
        second = self._mr("swap-23", SCRIPT_INSERT3, self.triple_gen, 1, 2)
        return compose(first, second, name=f"{self.variant}/insert-rotate")

    def joint(self) -> Property[OpCase]:
        props = [mr_to_property(m) for m in (self.insert_delete(), self.delete_insert(), self.insert_commute())]
        return conjoin(props, name=f"{self.variant}/joint")


def mr_insert_delete(variant: str = "correct", params: SizeParams | None = None) -> MetamorphicRelation:
    return BstRelations(variant, params).insert_delete()


def mr_delete_insert(variant: str = "correct", params: SizeParams | None = None) -> MetamorphicRelation:
    return BstRelations(variant, params).delete_insert()


def mr_insert_commute(variant: str = "correct", params: SizeParams | None = None) -> MetamorphicRelation:
    return BstRelations(variant, params).insert_commute()


def suite(variant: str, params: SizeParams | None = None) -> list[Property]:
    rel = BstRelations(variant, params)
    props = [
        mr_to_property(rel.insert_delete()),
        mr_to_property(rel.delete_insert()),
        mr_to_property(rel.insert_commute()),
        rel.joint(),
        mr_to_property(rel.insert_rotate()),
    ]
    if variant == "correct":
        props.extend(_conventional_properties(rel.params))
    return props


def _conventional_properties(params: SizeParams) -> list[Property]:
    """Validity, postcondition and model-based checks for the correct tree."""
    triple = gen.tuples(gen_tree(params), gen.int_in_range(*KEY_RANGE), gen.int_in_range(*VALUE_RANGE))

    def render(c) -> str:
        return f"tree={c[0]} key={c[1]} value={c[2]}"

    def preserves_validity(c) -> bool:
        t, k, v = c
        return valid(insert(k, v, t)) and valid(delete(k, t))

    def insert_post(c) -> bool:
        t, k, v = c
        after = insert(k, v, t)
        others = {key for key, _ in to_sorted_list(t)} - {k}
        return lookup(k, after) == v and all(lookup(j, after) == lookup(j, t) for j in others)

    def matches_model(c) -> bool:
        t, k, v = c
        model = to_sorted_list(t)
        return (
            to_sorted_list(insert(k, v, t)) == model_insert(k, v, model)
            and to_sorted_list(delete(k, t)) == model_delete(k, model)
        )

    precondition = lambda c: valid(c[0])  # noqa: E731
    return [
        Property("correct/validity", triple, preserves_validity, precondition, render),
        Property("correct/insert-post", triple, insert_post, precondition, render),
        Property("correct/model", triple, matches_model, precondition, render),
    ]
