import random

import pytest
from hypothesis import given, settings, strategies as st

from generators import formula_tuples, pattern_case, random_pattern, random_wf_schema
from kger.core import KgerError, UnknownNameError, Value
from kger.logic import free_vars
from kger.patterns import (AttrLeaf, RoleLeaf, RoleNode, answer_vars, depth, eval_pattern,
                           is_ground, is_rooted_at, pattern_arity, translate_pattern, witness_tuples)
from kger.textformat import parse_pattern

P = {
    "p1": "fname",
    "p2": "author(fname, lname)",
    "p3": "msg(author)",
    "p4": "msg(author(fname, lname))",
}


@pytest.mark.parametrize("name, arity, ground", [("p1", 1, True), ("p2", 2, True), ("p3", 1, False), ("p4", 2, True)])
def test_arity_and_groundness(running, name, arity, ground):
    p = parse_pattern(P[name], running)
    assert pattern_arity(p) == arity
    assert is_ground(p) == ground


def test_depth(running):
    assert depth(parse_pattern(P["p4"], running)) == 2
    assert depth(parse_pattern(P["p3"], running)) == 2
    assert depth(AttrLeaf("x")) == 0


def test_rootedness(running):
    p4 = parse_pattern(P["p4"], running)
    assert is_rooted_at(running, p4, "Message")
    assert not is_rooted_at(running, p4, "Person")
    assert is_rooted_at(running, parse_pattern("author(fname)", running), "wrote")
    with pytest.raises(UnknownNameError):
        is_rooted_at(running, AttrLeaf("nope"), "Person")


def test_p4_translation(running):
    f = translate_pattern(running, "Message", parse_pattern(P["p4"], running))
    assert f.render() == "∃z1. (msg(z1, x) ∧ (∃z2. (author(z1, z2) ∧ fname(z2, y1) ∧ lname(z2, y2))))"
    assert free_vars(f) == {"x", "y1", "y2"}


def test_eval_p4_on_g0(running, g0):
    p4 = parse_pattern(P["p4"], running)
    assert eval_pattern(running, g0, "Message", p4, "m1") == {(Value.of("Ada"), Value.of("Lovelace"))}
    assert formula_tuples(running, g0, "Message", p4, "m1") == {(Value.of("Ada"), Value.of("Lovelace"))}


def test_multivalued_and_role_leaves(running, g0):
    assert eval_pattern(running, g0, "Person", AttrLeaf("email"), "pA") == {(Value.of("a@x"),), (Value.of("b@x"),)}
    assert eval_pattern(running, g0, "Person", RoleLeaf("author"), "pA") == {("w1",)}
    assert eval_pattern(running, g0, "Person", RoleLeaf("author"), "pB") == set()


def test_witness_tuples_concatenate(running, g0):
    ps = [parse_pattern(P["p4"], running), AttrLeaf("number")]
    assert witness_tuples(running, g0, "Message", ps, "m1") == {
        (Value.of("Ada"), Value.of("Lovelace"), Value.of("1"))}


def test_errors(running, g0):
    p4 = parse_pattern(P["p4"], running)
    with pytest.raises(KgerError) as exc:
        eval_pattern(running, g0, "Person", p4, "pA")
    assert exc.value.diagnostics[0].code == "NOT-ROOTED"
    with pytest.raises(KgerError) as exc:
        eval_pattern(running, g0, "Message", p4, "pA")
    assert exc.value.diagnostics[0].code == "NOT-AN-INSTANCE"


def test_role_node_needs_children():
    with pytest.raises(ValueError):
        RoleNode("r", ())


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_eval_matches_formula_oracle(seed):
    case = pattern_case(random.Random(seed))
    if case is None:
        return
    schema, graph, X, p, inst = case
    assert eval_pattern(schema, graph, X, p, inst) == formula_tuples(schema, graph, X, p, inst)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_translation_shape(seed):
    rng = random.Random(seed)
    schema = random_wf_schema(rng)
    X = rng.choice(schema.entities + schema.relationships)
    p = random_pattern(rng, schema, X)
    if p is None:
        return
    assert is_rooted_at(schema, p, X)
    f = translate_pattern(schema, X, p)
    assert free_vars(f) == {"x", *answer_vars(p)}
    g = random_pattern(rng, schema, X, ground=True)
    if g is not None:
        assert is_ground(g)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_tuple_width_is_arity(seed):
    case = pattern_case(random.Random(seed))
    if case is None:
        return
    schema, graph, X, p, inst = case
    assert all(len(t) == pattern_arity(p) for t in eval_pattern(schema, graph, X, p, inst))
    if is_ground(p):
        assert all(isinstance(c, Value) for t in eval_pattern(schema, graph, X, p, inst) for c in t)
