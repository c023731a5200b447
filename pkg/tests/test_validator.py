import random

import pytest
from hypothesis import given, settings, strategies as st

from generators import GraphConfig, SchemaConfig, random_graph, random_schema
from kger.core import (Cover, Disjoint, Entity, Isa, KnowledgeGraph, MandatoryRole, SingleRole,
                       Value, build_schema)
from kger.logic import holds
from kger.textformat import parse_schema
from kger.validator import (ValidationReport, check_data_model, check_statement,
                            implicit_disjoint_pairs, statement_formula, validate, validate_core,
                            validate_implicit_disjointness)

V = Value.of


def test_g0_conforms_under_both_semantics(running, g0):
    assert validate(running, g0, "core").conforms
    report = validate(running, g0, "implicit")
    assert report.conforms
    assert report.stats["implicit_pairs"] == 3
    with pytest.raises(ValueError):
        validate(running, g0, "strict")


def test_second_wrote_instance_for_m1(running, g0):
    g = g0.replace(rel_membership={**g0.rel_membership, "w2": "wrote"},
                   role_facts=g0.role_facts | {("w2", "author", "pB"), ("w2", "msg", "m1")})
    codes = set(validate_core(running, g).codes)
    assert codes == {"VIOL-SINGLE-ROLE", "VIOL-IDENTITY"}


def test_missing_author_breaks_message_identity(running, g0):
    g = g0.replace(role_facts=g0.role_facts - {("w1", "author", "pA")})
    report = validate_core(running, g)
    subjects = {d.subject for d in report.diagnostics if d.code == "VIOL-IDENTITY"}
    assert "Identity(Message, [msg(author(fname, lname)), number])" in subjects
    assert "Identity(wrote, [author(fname, lname), msg(number)])" in subjects


def test_shared_email_violates_key(running, g0):
    g = g0.replace(attr_facts=g0.attr_facts | {("pB", "email", V("a@x"))})
    [d] = validate_core(running, g).diagnostics
    assert d.code == "VIOL-KEY" and d.subject == "Key(Person, [email])"
    assert d.witnesses == ("pA", "pB", (V("a@x"),))


def test_data_model_conditions(running):
    g = KnowledgeGraph({"p": {"Person", "Ghost"}, "q": set()}, {"r": "wrote"},
                       {("p", "name", V("x"))}, {("r", "author", "p"), ("r", "msg", "p")})
    codes = [d.code for d in check_data_model(running, g)]
    assert codes.count("DM1") >= 3
    report = validate_core(running, g)
    # statement clauses are not evaluated on graphs outside the vocabulary
    assert all(c.startswith("DM") for c in report.codes)
    assert report.stats["statements"] == 0


def test_dm2_and_dm3(running):
    g = KnowledgeGraph({"p": {"Person"}, "q": {"Person"}}, {"r": "wrote", "z": "ghost"},
                       role_facts={("r", "author", "p"), ("r", "author", "q")})
    codes = {d.code for d in check_data_model(running, g)}
    assert codes == {"DM2", "DM3"}


def test_truncation(running):
    people = {f"p{i}": {"Person"} for i in range(5)}
    facts = {(i, a, V("same")) for i in people for a in ("fname", "lname")}
    g = KnowledgeGraph(people, attr_facts=facts)
    report = validate_core(running, g, limit=0)
    assert "TRUNCATED" in report.codes
    assert not report.conforms
    [t] = [d for d in report.diagnostics if d.code == "TRUNCATED"]
    assert t.severity == "warning"


def test_close_isa_changes_outcome():
    s = parse_schema("""
        Entity(A)
        Entity(B)
        Attribute(A, x)
        Isa(B, A)
        Mandatory(A, x)
    """)
    g = KnowledgeGraph({"b": {"B"}})
    assert set(validate_core(s, g).codes) == {"VIOL-ISA"}
    assert set(validate_core(s, g.close_isa(s)).codes) == {"VIOL-MANDATORY-ATTR"}


def test_hierarchy_violations():
    s = build_schema([Entity("A"), Entity("B"), Entity("C"), Isa("B", "A"), Isa("C", "A"),
                      Disjoint("B", "C"), Cover({"B", "C"}, "A")])
    g = KnowledgeGraph({"a": {"A"}, "bc": {"A", "B", "C"}})
    assert set(validate_core(s, g).codes) == {"VIOL-COVER", "VIOL-DISJOINT"}


def test_implicit_disjointness():
    s = build_schema([Entity("A"), Entity("B"), Entity("C"), Isa("C", "A")])
    assert implicit_disjoint_pairs(s) == {frozenset("AB"), frozenset("BC")}
    g = KnowledgeGraph({"x": {"A", "B"}})
    assert validate_core(s, g).conforms
    report = validate_implicit_disjointness(s, g)
    assert report.codes == ["VIOL-IMPLICIT-DISJOINT"]
    assert report.diagnostics[0].subject == "A / B"


def test_single_role_clause_is_unguarded():
    # the clause quantifies over every filler, not only instances of the entity
    s = parse_schema("""
        Entity(A)
        Entity(B)
        Relationship(R)
        Role(R, r, A)
        Single(B, r, R)
    """)
    g = KnowledgeGraph({"a": {"A"}}, {"r1": "R", "r2": "R"}, role_facts={("r1", "r", "a"), ("r2", "r", "a")})
    stmt = SingleRole("B", "r", "R")
    assert check_statement(s, g, stmt)
    assert not holds(g, statement_formula(s, stmt))


def test_mandatory_role_formula(running, g0):
    stmt = MandatoryRole("Message", "msg", "wrote")
    assert holds(g0, statement_formula(running, stmt))
    g = g0.replace(role_facts={f for f in g0.role_facts if f[1] != "msg"})
    assert not holds(g, statement_formula(running, stmt))


def test_report_json_round_trip(running, g0):
    g = g0.replace(attr_facts=g0.attr_facts | {("pB", "email", V("a@x"))})
    report = validate_core(running, g)
    again = ValidationReport.from_json(report.to_json())
    assert again == report
    assert "does not conform" in report.render()


def test_report_order_is_deterministic(running, g0):
    g = g0.replace(attr_facts=set())
    assert validate_core(running, g).to_json() == validate_core(running, g).to_json()


# ---------------------------------------------------------------------------
# properties

def _pairs(seed, **graph_kw):
    rng = random.Random(seed)
    schema = random_schema(rng, SchemaConfig(constraint_probability=0.5, pattern_depth=1))
    graph = random_graph(rng, schema, GraphConfig(max_nodes=5, values=("a", "b"), **graph_kw))
    return schema, graph


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_statement_checks_match_formulas(seed):
    schema, graph = _pairs(seed)
    if check_data_model(schema, graph):
        return
    for stmt in schema:
        assert (check_statement(schema, graph, stmt) == []) == holds(graph, statement_formula(schema, stmt)), str(stmt)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_implicit_semantics_is_contained_in_core(seed):
    schema, graph = _pairs(seed, extra_type_probability=0.5)
    core = validate_core(schema, graph)
    implicit = validate_implicit_disjointness(schema, graph)
    assert core.conforms or not implicit.conforms
    assert set(core.diagnostics) <= set(implicit.diagnostics)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_generated_graphs_meet_data_model(seed):
    schema, graph = _pairs(seed)
    assert check_data_model(schema, graph) == []
