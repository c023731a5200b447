import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import package_text
from generators import SchemaConfig, random_schema, random_wf_schema
from kger.core import (Attribute, Cover, Disjoint, Entity, Identity, Isa, Key, MandatoryAttr,
                       MandatoryRole, Relationship, Role, SingleAttr, SingleRole, build_schema)
from kger.patterns import AttrLeaf, RoleLeaf, RoleNode, is_ground, leaves
from kger.textformat import parse_schema
from kger.wellformed import check_well_formed, is_well_formed, isa_cycles


def test_running_example_is_well_formed(running):
    assert check_well_formed(running) == []
    assert is_well_formed(running)


def test_employee_schema_lacks_identities(employee):
    codes = [d.code for d in check_well_formed(employee)]
    assert codes.count("WF6") == 2 and codes.count("WF4") == 1


def test_isa_cycles_found():
    s = build_schema([Entity(n) for n in "ABCD"] + [Isa("A", "B"), Isa("B", "C"), Isa("C", "A"), Isa("D", "D")])
    cycles = sorted(map(sorted, isa_cycles(s)))
    assert cycles == [["A", "B", "C"], ["D"]]


def test_inherited_participation_is_declared():
    s = parse_schema("""
        Entity(A)
        Entity(B)
        Isa(B, A)
        Attribute(A, x)
        Identity(A, [x])
        Mandatory(B, x)
        Key(B, [x])
    """)
    assert check_well_formed(s) == []


def test_wf1_on_hierarchy_statements():
    s = build_schema([Entity("A"), Attribute("A", "x"), Identity("A", [AttrLeaf("x")]), Isa("A", "Ghost")])
    assert {d.code for d in check_well_formed(s)} == {"WF1"}


def test_cover_of_self_is_wf8():
    s = build_schema([Entity("A"), Attribute("A", "x"), Identity("A", [AttrLeaf("x")]), Cover({"A"}, "A")])
    assert {d.code for d in check_well_formed(s)} == {"WF8"}


def test_key_on_undeclared_owner_is_wf9():
    s = build_schema([Entity("A"), Attribute("A", "x"), Identity("A", [AttrLeaf("x")]), Key("Z", [AttrLeaf("x")])])
    assert {d.code for d in check_well_formed(s)} == {"WF9"}


def test_diagnostics_name_the_statement(running):
    bad = running.with_statements(Disjoint("Person", "Message"))
    [d] = check_well_formed(bad)
    assert d.subject == "Disjoint(Person, Message)"
    assert set(d.witnesses) == {"Person", "Message"}


# ---------------------------------------------------------------------------
# brute-force re-verification

def _anc(schema, e):
    out, frontier = {e}, {e}
    while frontier:
        frontier = {s.sup for s in schema.of_kind(Isa) if s.sub in frontier} - out
        out |= frontier
    return out


def _embeds(schema, p, X):
    """Explicit search for an embedding of ``p`` into the shape graph at X."""
    ent = X in schema.entities
    owners = _anc(schema, X) if ent else {X}
    attrs = {(s.owner, s.name) for s in schema.of_kind(Attribute)}
    roles = {(s.relationship, s.name, s.entity) for s in schema.of_kind(Role)}
    if isinstance(p, AttrLeaf):
        return any((o, p.name) in attrs for o in owners)
    for rel, b, e in roles:
        if b != p.name:
            continue
        if ent and e in owners:
            nxt = rel
        elif not ent and rel == X:
            nxt = e
        else:
            continue
        if isinstance(p, RoleLeaf) or all(_embeds(schema, c, nxt) for c in p.children):
            return True
    return False


def _conditions_hold(schema):
    E, R = set(schema.entities), set(schema.relationships)
    attrs = {(s.owner, s.name) for s in schema.of_kind(Attribute)}
    roles = {(s.relationship, s.name, s.entity) for s in schema.of_kind(Role)}
    isa = {(s.sub, s.sup) for s in schema.of_kind(Isa)}
    ident = {s.owner for s in schema.of_kind(Identity)}
    checks = [
        all(o in E | R for o, _ in attrs) and all(r in R and e in E for r, _, e in roles),
        all(any((o, s.attribute) in attrs for o in _anc(schema, s.owner) if o in E) or (s.owner, s.attribute) in attrs
            for s in schema.of_kind(MandatoryAttr, SingleAttr)),
        all(any((s.relationship, s.role, e) in roles for e in _anc(schema, s.entity))
            for s in schema.of_kind(MandatoryRole, SingleRole)),
        all(is_ground(p) for s in schema.of_kind(Identity) for p in s.patterns),
        R <= ident,
        all(a not in _anc(schema, b) or a == b for a, b in isa) and not any(a == b for a, b in isa),
        all(e in ident for e in E if not any(a == e for a, _ in isa)),
        all(_anc(schema, s.first) & _anc(schema, s.second) for s in schema.of_kind(Disjoint)),
        all(m != s.entity and s.entity in _anc(schema, m) for s in schema.of_kind(Cover) for m in s.members),
        all(_embeds(schema, p, s.owner) for s in schema.of_kind(Key, Identity) for p in s.patterns),
    ]
    return all(checks)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_empty_diagnostics_are_sound(seed):
    rng = random.Random(seed)
    schema = random_schema(rng, SchemaConfig(constraint_probability=0.5))
    if not check_well_formed(schema):
        assert _conditions_hold(schema)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_generated_wf_schemas_pass(seed):
    schema = random_wf_schema(random.Random(seed))
    assert check_well_formed(schema) == []
    assert _conditions_hold(schema)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_check_is_deterministic(seed):
    schema = random_schema(random.Random(seed), SchemaConfig(constraint_probability=0.5))
    assert check_well_formed(schema) == check_well_formed(build_schema(list(schema)))


def test_removing_a_relationship_identity_always_flags_wf4():
    rng = random.Random(11)
    for _ in range(50):
        schema = random_wf_schema(rng)
        for s in schema.of_kind(Identity):
            if s.owner in schema.relationships:
                codes = {d.code for d in check_well_formed(schema.without(s))}
                assert codes == {"WF4"}
