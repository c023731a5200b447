"""Tree patterns: arity, groundness, rootedness, FOL translation and evaluation."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

from .core import (Diagnostic, Id, KgerError, KnowledgeGraph, Schema,
                   UnknownNameError, ancestors_of)
from .logic import Atom, conj, exists


@dataclass(frozen=True)
class AttrLeaf:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class RoleLeaf:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class RoleNode:
    name: str
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ValueError("role node needs at least one child pattern")

    def __str__(self):
        return f"{self.name}({', '.join(map(str, self.children))})"


Pattern = Union[AttrLeaf, RoleLeaf, RoleNode]


def leaves(p: Pattern) -> Iterator[Pattern]:
    """Leaves in pre-order; this order fixes tuple component order."""
    if isinstance(p, RoleNode):
        for c in p.children:
            yield from leaves(c)
    else:
        yield p


def pattern_arity(p: Pattern) -> int:
    return sum(1 for _ in leaves(p))


def is_ground(p: Pattern) -> bool:
    return all(isinstance(leaf, AttrLeaf) for leaf in leaves(p))


def pattern_names(p: Pattern) -> Iterator[str]:
    yield p.name
    if isinstance(p, RoleNode):
        for c in p.children:
            yield from pattern_names(c)


def depth(p: Pattern) -> int:
    """Number of role navigations along the longest branch."""
    if isinstance(p, RoleNode):
        return 1 + max(depth(c) for c in p.children)
    return 1 if isinstance(p, RoleLeaf) else 0


# ---------------------------------------------------------------------------
# rootedness

def _check_names(schema: Schema, X: str, p: Pattern) -> None:
    if not (schema.is_entity(X) or schema.is_relationship(X)):
        raise UnknownNameError([Diagnostic("UNKNOWN-NAME", X, "not a declared entity or relationship")])
    for n in pattern_names(p):
        if n not in schema.owner_of_attr and n not in schema.owner_of_role:
            raise UnknownNameError([Diagnostic("UNKNOWN-NAME", str(p), f"{n!r} is not a declared attribute or role")])


def _rooted(schema: Schema, p: Pattern, X: str) -> bool:
    at_entity = schema.is_entity(X)
    if not at_entity and not schema.is_relationship(X):
        return False
    owners = ancestors_of(schema, X) if at_entity else {X}
    if isinstance(p, AttrLeaf):
        return schema.owner_of_attr.get(p.name) in owners
    if p.name not in schema.owner_of_role:
        return False
    rel, ent = schema.owner_of_role[p.name]
    if at_entity:
        ok, next_side = ent in owners, rel
    else:
        ok, next_side = rel == X, ent
    if not ok:
        return False
    if isinstance(p, RoleLeaf):
        return True
    return all(_rooted(schema, c, next_side) for c in p.children)


def is_rooted_at(schema: Schema, p: Pattern, X: str) -> bool:
    """Whether ``p`` can be embedded in the shape graph starting at ``X``.

    Entities may use attributes and participations inherited from Isa-ancestors.
    """
    _check_names(schema, X, p)
    return _rooted(schema, p, X)


def _require_rooted(schema: Schema, p: Pattern, X: str) -> None:
    if not is_rooted_at(schema, p, X):
        raise KgerError([Diagnostic("NOT-ROOTED", str(p), f"pattern is not rooted at {X}")])


# ---------------------------------------------------------------------------
# translation to first-order logic

class Fresh:
    """Deterministic fresh-variable supply: prefix1, prefix2, ..."""

    def __init__(self, prefix: str = "z"):
        self.prefix = prefix
        self.count = 0

    def __call__(self) -> str:
        self.count += 1
        return f"{self.prefix}{self.count}"


def answer_vars(p: Pattern, prefix: str = "y", start: int = 1) -> list[str]:
    return [f"{prefix}{i}" for i in range(start, start + pattern_arity(p))]


def pattern_formula(schema: Schema, X: str, p: Pattern, x: str,
                    ys: Sequence[str], fresh: Fresh):
    """phi_p^X(x, ys) with bound variables drawn from ``fresh`` in pre-order."""
    it = iter(ys)
    f = _translate(schema, schema.is_entity(X), p, x, it, fresh)
    assert next(it, None) is None, "answer variable count does not match arity"
    return f


def _translate(schema, at_entity, p, x, ys, fresh):
    if isinstance(p, AttrLeaf):
        return Atom(p.name, x, next(ys))
    if isinstance(p, RoleLeaf):
        y = next(ys)
        return Atom(p.name, y, x) if at_entity else Atom(p.name, x, y)
    z = fresh()
    head = Atom(p.name, z, x) if at_entity else Atom(p.name, x, z)
    body = [_translate(schema, not at_entity, c, z, ys, fresh) for c in p.children]
    return exists([z], conj(head, *body))


def translate_pattern(schema: Schema, X: str, p: Pattern):
    """phi_p^X(x, y1..yk) following the recursive translation of patterns."""
    _require_rooted(schema, p, X)
    return pattern_formula(schema, X, p, "x", answer_vars(p), Fresh("z"))


# ---------------------------------------------------------------------------
# direct evaluation

def _eval(graph: KnowledgeGraph, p: Pattern, node: Id, at_entity: bool) -> set:
    if isinstance(p, AttrLeaf):
        return {(v,) for v in graph.values(node, p.name)}
    step = graph.incoming(node, p.name) if at_entity else graph.fillers(node, p.name)
    if isinstance(p, RoleLeaf):
        return {(n,) for n in step}
    out = set()
    for nxt in step:
        parts = [_eval(graph, c, nxt, not at_entity) for c in p.children]
        for combo in itertools.product(*parts):
            out.add(tuple(itertools.chain.from_iterable(combo)))
    return out


def _require_instance(graph: KnowledgeGraph, X: str, inst: Id) -> None:
    if inst not in graph.members(X):
        raise KgerError([Diagnostic("NOT-AN-INSTANCE", inst, f"{inst!r} is not an instance of {X}")])


def eval_pattern(schema: Schema, graph: KnowledgeGraph, X: str, p: Pattern, inst: Id) -> set:
    """Tuples ȳ with graph ⊨ phi_p^X(inst, ȳ), components in leaf pre-order."""
    _require_rooted(schema, p, X)
    _require_instance(graph, X, inst)
    return _eval(graph, p, inst, schema.is_entity(X))


def product_tuples(parts: Iterable[set]) -> set:
    return {tuple(itertools.chain.from_iterable(combo)) for combo in itertools.product(*parts)}


def witness_tuples(schema: Schema, graph: KnowledgeGraph, X: str,
                   patterns: Sequence[Pattern], inst: Id) -> set:
    """Concatenated key tuples of ``inst``: the z̄ with graph ⊨ psi(inst, z̄)."""
    for p in patterns:
        _require_rooted(schema, p, X)
    _require_instance(graph, X, inst)
    at_entity = schema.is_entity(X)
    return product_tuples(_eval(graph, p, inst, at_entity) for p in patterns)


def unchecked_witness_tuples(graph: KnowledgeGraph, at_entity: bool,
                             patterns: Sequence[Pattern], inst: Id) -> set:
    return product_tuples(_eval(graph, p, inst, at_entity) for p in patterns)
