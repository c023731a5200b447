from decimal import Decimal

import pytest
from hypothesis import given, strategies as st

from kger.core import (Attribute, Cover, Diagnostic, Entity, Identity, Isa, Key, KnowledgeGraph,
                       Relationship, Role, SchemaError, UnknownNameError, Value, ancestors_of,
                       build_schema, closure_ancestors, roots_of, sort_key)
from kger.patterns import AttrLeaf


def test_value_numeric_equality():
    assert Value.of(1) == Value.of(Decimal("1.0"))
    assert hash(Value.of(1)) == hash(Value.of(1.0))
    assert Value.of("1") != Value.of(1)
    assert Value.of(True) != Value.of(1)


def test_value_parse_round_trip():
    for v in [Value.of(3), Value.of(Decimal("2.50")), Value.of(False), Value.of("x")]:
        assert Value.parse(v.tag, v.lexical) == v
    with pytest.raises(ValueError):
        Value.parse("boolean", "yes")
    with pytest.raises(ValueError):
        Value("date", "2020")


@given(st.decimals(allow_nan=False, allow_infinity=False, places=4))
def test_decimal_canonical_form_is_stable(d):
    v = Value.of(d)
    assert Value.parse("decimal", v.lexical).lexical == v.lexical
    assert v.to_python() == d


def test_statement_rendering():
    assert str(Key("Person", [AttrLeaf("email")])) == "Key(Person, [email])"
    assert str(Cover({"B", "A"}, "E")) == "Cover({A, B}, E)"
    with pytest.raises(ValueError):
        Identity("E", [])
    with pytest.raises(ValueError):
        Cover(set(), "E")


def test_diagnostic_codes_are_closed():
    with pytest.raises(AssertionError):
        Diagnostic("NOPE", "x", "y")
    assert str(Diagnostic("DM2", "r1", "two fillers", ("r1", "a"))) == "error DM2 r1: two fillers [r1, a]"


def test_build_schema_deduplicates_and_keeps_order():
    s = build_schema([Entity("A"), Attribute("A", "x"), Entity("A"), Entity("B")])
    assert s.entities == ("A", "B")
    assert len(s) == 3
    assert s == build_schema([Entity("B"), Attribute("A", "x"), Entity("A")])


@pytest.mark.parametrize("stmts, code", [
    ([Entity("A"), Entity("B"), Attribute("A", "x"), Attribute("B", "x")], "DUP-ATTR-OWNER"),
    ([Relationship("R"), Entity("A"), Role("R", "b", "A"), Role("S", "b", "A")], "DUP-ROLE-OWNER"),
    ([Entity("A"), Relationship("A")], "NAME-CLASS-OVERLAP"),
    ([Entity("A"), Attribute("A", "A")], "NAME-CLASS-OVERLAP"),
])
def test_build_schema_rejects_inconsistent_vocabulary(stmts, code):
    with pytest.raises(SchemaError) as exc:
        build_schema(stmts)
    assert code in {d.code for d in exc.value.diagnostics}


def test_ancestors_and_roots():
    s = build_schema([Entity("A"), Entity("B"), Entity("C"), Isa("C", "B"), Isa("B", "A")])
    assert ancestors_of(s, "C") == {"A", "B", "C"}
    assert roots_of(s) == {"A"}
    assert closure_ancestors(s, ["B", "ghost"]) == {"A", "B", "ghost"}
    with pytest.raises(UnknownNameError):
        ancestors_of(s, "Z")


def test_knowledge_graph_indexes(g0):
    assert g0.fillers("w1", "author") == {"pA"}
    assert g0.incoming("pA", "author") == {"w1"}
    assert g0.values("pA", "email") == {Value.of("a@x"), Value.of("b@x")}
    assert g0.members("Person") == {"pA", "pB"}
    assert g0.members("wrote") == {"w1"}
    assert g0.types_of("s1") == {"studies"}
    assert g0.size() == 7


def test_knowledge_graph_rejects_id_clash():
    with pytest.raises(ValueError):
        KnowledgeGraph({"x": {"A"}}, {"x": "R"})


def test_close_isa():
    s = build_schema([Entity("A"), Entity("B"), Isa("B", "A")])
    g = KnowledgeGraph({"b": {"B"}}).close_isa(s)
    assert g.types_of("b") == {"A", "B"}


def test_sort_key_orders_mixed_components():
    items = [("t",), Value.of(2), "id", Value.of("a")]
    ordered = sorted(items, key=sort_key)
    assert ordered[0] == "id" and ordered[-1] == ("t",)
