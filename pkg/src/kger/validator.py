"""Validation of knowledge graphs against schemas under the core and
implicit-disjointness semantics."""
from __future__ import annotations

import itertools
import json
from collections import defaultdict
from dataclasses import dataclass, field

from .core import (Attribute, Cover, Diagnostic, Disjoint, Entity, Identity, Isa,
                   Key, KnowledgeGraph, MandatoryAttr, MandatoryRole, Relationship,
                   Role, Schema, SingleAttr, SingleRole, Value, ancestors_of,
                   closure_ancestors, sort_key)
from .logic import (FALSE, TRUE, Atom, ClassAtom, Eq, Implies, Or, conj, exists,
                    forall)
from .patterns import Fresh, answer_vars, pattern_formula, unchecked_witness_tuples

DEFAULT_LIMIT = 100
SEMANTICS = ("core", "implicit")


def _sorted(items):
    return sorted(items, key=sort_key)


# ---------------------------------------------------------------------------
# data model conditions

def check_data_model(schema: Schema, graph: KnowledgeGraph) -> list[Diagnostic]:
    """Structural conditions every graph over the schema vocabulary must meet."""
    out = []
    entities, rels = set(schema.entities), set(schema.relationships)

    for i in _sorted(graph.entity_membership):
        types = graph.entity_membership[i]
        if not types:
            out.append(Diagnostic("DM1", i, "entity instance belongs to no entity", (i,)))
        for t in sorted(types - entities):
            out.append(Diagnostic("DM1", i, f"unknown entity name {t!r}", (i,)))

    for r in _sorted(graph.rel_membership):
        if graph.rel_membership[r] not in rels:
            out.append(Diagnostic("DM3", r, f"relationship instance has unknown type "
                                  f"{graph.rel_membership[r]!r}", (r,)))
        if r in graph.entity_membership:
            out.append(Diagnostic("DM3", r, "id is both an entity and a relationship instance", (r,)))

    def typed_as(node, owner) -> bool:
        if schema.is_relationship(owner):
            return graph.rel_membership.get(node) == owner
        names = graph.entity_membership.get(node, frozenset()) & entities
        return owner in closure_ancestors(schema, names)

    for i, a, v in sorted(graph.attr_facts, key=sort_key):
        owner = schema.owner_of_attr.get(a)
        if owner is None:
            out.append(Diagnostic("DM1", i, f"unknown attribute {a!r}", (i,)))
        elif not graph.types_of(i):
            out.append(Diagnostic("DM1", i, f"attribute {a!r} on an id outside every entity and relationship", (i, v)))
        elif not typed_as(i, owner):
            out.append(Diagnostic("DM1", i, f"attribute {a!r} of {owner} asserted on an instance of "
                                  f"{', '.join(sorted(graph.types_of(i)))}", (i, v)))

    for r, b, e in sorted(graph.role_facts):
        if b not in schema.owner_of_role:
            out.append(Diagnostic("DM1", r, f"unknown role {b!r}", (r, e)))
            continue
        rel, ent = schema.owner_of_role[b]
        if r not in graph.rel_membership or e not in graph.entity_membership or not graph.types_of(e):
            out.append(Diagnostic("DM1", r, f"role {b!r} must link a relationship instance to an entity instance", (r, e)))
        elif not typed_as(r, rel) or not typed_as(e, ent):
            out.append(Diagnostic("DM1", r, f"role {b!r} of {rel} links {r!r} to {e!r} with wrong types", (r, e)))

    fillers = defaultdict(set)
    for r, b, e in graph.role_facts:
        fillers[(r, b)].add(e)
    for (r, b) in sorted(fillers):
        if len(fillers[(r, b)]) > 1:
            out.append(Diagnostic("DM2", r, f"role {b!r} has {len(fillers[(r, b)])} fillers",
                                  (r, *sorted(fillers[(r, b)]))))
    return out


# ---------------------------------------------------------------------------
# statement clauses as formulas

def _psi(schema, X, patterns, inst_var, key_vars, fresh):
    parts, pos = [], 0
    for p in patterns:
        k = len(answer_vars(p))
        parts.append(pattern_formula(schema, X, p, inst_var, key_vars[pos:pos + k], fresh))
        pos += k
    return parts


def statement_formula(schema: Schema, stmt):
    """The first-order clause a statement stands for."""
    if isinstance(stmt, (Entity, Relationship)):
        return TRUE
    if isinstance(stmt, Attribute):
        return forall("xy", Implies(Atom(stmt.name, "x", "y"), ClassAtom(stmt.owner, "x")))
    if isinstance(stmt, Role):
        return forall("xy", Implies(Atom(stmt.name, "x", "y"),
                                    conj(ClassAtom(stmt.relationship, "x"), ClassAtom(stmt.entity, "y"))))
    if isinstance(stmt, MandatoryAttr):
        return forall("x", Implies(ClassAtom(stmt.owner, "x"), exists("y", Atom(stmt.attribute, "x", "y"))))
    if isinstance(stmt, SingleAttr):
        return forall("xyz", Implies(conj(Atom(stmt.attribute, "x", "y"), Atom(stmt.attribute, "x", "z")),
                                     Eq("y", "z")))
    if isinstance(stmt, MandatoryRole):
        return forall("x", Implies(ClassAtom(stmt.entity, "x"), exists("y", Atom(stmt.role, "y", "x"))))
    if isinstance(stmt, SingleRole):
        return forall("xyz", Implies(conj(Atom(stmt.role, "y", "x"), Atom(stmt.role, "z", "x")),
                                     Eq("y", "z")))
    if isinstance(stmt, (Key, Identity)):
        X, ps = stmt.owner, stmt.patterns
        arity = sum(len(answer_vars(p)) for p in ps)
        zs = [f"z{i}" for i in range(1, arity + 1)]
        fresh = Fresh("w")
        key = forall(["x", "y", *zs], Implies(
            conj(ClassAtom(X, "x"), *_psi(schema, X, ps, "x", zs, fresh),
                 ClassAtom(X, "y"), *_psi(schema, X, ps, "y", zs, fresh)),
            Eq("x", "y")))
        if isinstance(stmt, Key):
            return key
        ys = [f"y{i}" for i in range(1, arity + 1)]
        at_least = forall("x", Implies(ClassAtom(X, "x"),
                                       exists(ys, conj(*_psi(schema, X, ps, "x", ys, fresh)))))
        at_most = forall("x", Implies(ClassAtom(X, "x"), forall([*ys, *zs], Implies(
            conj(*_psi(schema, X, ps, "x", ys, fresh), *_psi(schema, X, ps, "x", zs, fresh)),
            conj(*(Eq(a, b) for a, b in zip(ys, zs)))))))
        return conj(key, at_least, at_most)
    if isinstance(stmt, Isa):
        return forall("x", Implies(ClassAtom(stmt.sub, "x"), ClassAtom(stmt.sup, "x")))
    if isinstance(stmt, Disjoint):
        return forall("x", Implies(conj(ClassAtom(stmt.first, "x"), ClassAtom(stmt.second, "x")), FALSE))
    if isinstance(stmt, Cover):
        return forall("x", Implies(ClassAtom(stmt.entity, "x"),
                                   Or(tuple(ClassAtom(m, "x") for m in sorted(stmt.members)))))
    raise TypeError(f"not a statement: {stmt!r}")


# ---------------------------------------------------------------------------
# statement checks

def _cap(found: list[Diagnostic], stmt, limit) -> list[Diagnostic]:
    if limit is None or len(found) <= limit:
        return found
    return found[:limit] + [Diagnostic("TRUNCATED", str(stmt),
                                       f"{len(found) - limit} further violations not shown",
                                       severity="warning")]


def _key_buckets(schema, graph, X, patterns):
    at_entity = schema.is_entity(X)
    tuples = {i: unchecked_witness_tuples(graph, at_entity, patterns, i)
              for i in graph.members(X)}
    buckets = defaultdict(set)
    for i, ts in tuples.items():
        for t in ts:
            buckets[t].add(i)
    return tuples, buckets


def check_statement(schema: Schema, graph: KnowledgeGraph, stmt, limit=DEFAULT_LIMIT) -> list[Diagnostic]:
    """Violations of one statement's clause in ``graph``; empty when it holds."""
    s = str(stmt)
    found: list[Diagnostic] = []
    add = found.append

    if isinstance(stmt, (Entity, Relationship)):
        return []
    if isinstance(stmt, Attribute):
        for i, a, v in _sorted(f for f in graph.attr_facts if f[1] == stmt.name):
            if i not in graph.members(stmt.owner):
                add(Diagnostic("VIOL-ATTRIBUTE", s, f"{i!r} has {a!r} but is not an instance of {stmt.owner}", (i, v)))
    elif isinstance(stmt, Role):
        for r, b, e in sorted(f for f in graph.role_facts if f[1] == stmt.name):
            if r not in graph.members(stmt.relationship):
                add(Diagnostic("VIOL-ROLE", s, f"{r!r} is not an instance of {stmt.relationship}", (r, e)))
            if e not in graph.members(stmt.entity):
                add(Diagnostic("VIOL-ROLE", s, f"{e!r} is not an instance of {stmt.entity}", (r, e)))
    elif isinstance(stmt, MandatoryAttr):
        for i in _sorted(graph.members(stmt.owner)):
            if not graph.values(i, stmt.attribute):
                add(Diagnostic("VIOL-MANDATORY-ATTR", s, f"{i!r} has no value for {stmt.attribute!r}", (i,)))
    elif isinstance(stmt, SingleAttr):
        per_node = defaultdict(set)
        for i, a, v in graph.attr_facts:
            if a == stmt.attribute:
                per_node[i].add(v)
        for i in _sorted(per_node):
            if len(per_node[i]) > 1:
                add(Diagnostic("VIOL-SINGLE-ATTR", s, f"{i!r} has {len(per_node[i])} values for {stmt.attribute!r}",
                               (i, *_sorted(per_node[i]))))
    elif isinstance(stmt, MandatoryRole):
        for e in _sorted(graph.members(stmt.entity)):
            if not graph.incoming(e, stmt.role):
                add(Diagnostic("VIOL-MANDATORY-ROLE", s,
                               f"{e!r} participates in no {stmt.relationship} through {stmt.role!r}", (e,)))
    elif isinstance(stmt, SingleRole):
        per_entity = defaultdict(set)
        for r, b, e in graph.role_facts:
            if b == stmt.role:
                per_entity[e].add(r)
        for e in _sorted(per_entity):
            if len(per_entity[e]) > 1:
                add(Diagnostic("VIOL-SINGLE-ROLE", s,
                               f"{e!r} participates in {len(per_entity[e])} instances through {stmt.role!r}",
                               (e, *sorted(per_entity[e]))))
    elif isinstance(stmt, (Key, Identity)):
        tuples, buckets = _key_buckets(schema, graph, stmt.owner, stmt.patterns)
        for t in _sorted(buckets):
            if len(buckets[t]) > 1:
                add(Diagnostic("VIOL-KEY", s, f"{len(buckets[t])} instances share key values",
                               (*_sorted(buckets[t]), t)))
        if isinstance(stmt, Identity):
            for i in _sorted(tuples):
                n = len(tuples[i])
                if n != 1:
                    what = "no key tuple" if n == 0 else f"{n} key tuples"
                    add(Diagnostic("VIOL-IDENTITY", s, f"{i!r} has {what}", (i, *_sorted(tuples[i]))))
    elif isinstance(stmt, Isa):
        for i in _sorted(graph.members(stmt.sub) - graph.members(stmt.sup)):
            add(Diagnostic("VIOL-ISA", s, f"{i!r} is a {stmt.sub} but not a {stmt.sup}", (i,)))
    elif isinstance(stmt, Disjoint):
        for i in _sorted(graph.members(stmt.first) & graph.members(stmt.second)):
            add(Diagnostic("VIOL-DISJOINT", s, f"{i!r} is both a {stmt.first} and a {stmt.second}", (i,)))
    elif isinstance(stmt, Cover):
        covered = set().union(*(graph.members(m) for m in stmt.members))
        for i in _sorted(graph.members(stmt.entity) - covered):
            add(Diagnostic("VIOL-COVER", s, f"{i!r} is a {stmt.entity} but none of "
                           f"{', '.join(sorted(stmt.members))}", (i,)))
    else:
        raise TypeError(f"not a statement: {stmt!r}")
    return _cap(found, stmt, limit)


# ---------------------------------------------------------------------------
# reports

@dataclass
class ValidationReport:
    conforms: bool
    semantics: str
    diagnostics: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @classmethod
    def build(cls, semantics, diagnostics, stats):
        # a truncation marker stands for hidden errors
        failed = any(d.severity == "error" or d.code == "TRUNCATED" for d in diagnostics)
        return cls(not failed, semantics, list(diagnostics), stats)

    @property
    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics]

    def to_json(self) -> str:
        doc = {
            "conforms": self.conforms,
            "semantics": self.semantics,
            "stats": self.stats,
            "diagnostics": [{
                "severity": d.severity, "code": d.code, "subject": d.subject,
                "message": d.message, "witnesses": [_encode(w) for w in d.witnesses],
            } for d in self.diagnostics],
        }
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ValidationReport":
        doc = json.loads(text)
        return cls(doc["conforms"], doc["semantics"], [
            Diagnostic(d["code"], d["subject"], d["message"],
                       tuple(_decode(w) for w in d["witnesses"]), d["severity"])
            for d in doc["diagnostics"]], doc["stats"])

    def render(self) -> str:
        head = "conforms" if self.conforms else "does not conform"
        lines = [f"{head} ({self.semantics} semantics): "
                 + ", ".join(f"{k}={v}" for k, v in self.stats.items())]
        lines += [str(d) for d in self.diagnostics]
        return "\n".join(lines) + "\n"


def _encode(w):
    if isinstance(w, tuple):
        return [_encode(x) for x in w]
    if isinstance(w, Value):
        return {"tag": w.tag, "lexical": w.lexical}
    return w


def _decode(w):
    if isinstance(w, list):
        return tuple(_decode(x) for x in w)
    if isinstance(w, dict):
        return Value(w["tag"], w["lexical"])
    return w


def _stats(schema, graph, checked):
    return {"statements": checked, "entities": len(graph.entity_membership),
            "relationships": len(graph.rel_membership)}


def validate_core(schema: Schema, graph: KnowledgeGraph, limit=DEFAULT_LIMIT) -> ValidationReport:
    """Check the data-model conditions and every statement clause.

    Statement clauses are only meaningful on graphs over the schema vocabulary,
    so they are skipped when a data-model condition fails.
    """
    diagnostics = check_data_model(schema, graph)
    checked = 0
    if not diagnostics:
        for stmt in schema:
            diagnostics += check_statement(schema, graph, stmt, limit)
            checked += 1
    return ValidationReport.build("core", diagnostics, _stats(schema, graph, checked))


def implicit_disjoint_pairs(schema: Schema) -> set:
    """Unordered entity pairs without a common Isa-ancestor."""
    anc = {e: ancestors_of(schema, e) for e in schema.entities}
    return {frozenset((a, b)) for a, b in itertools.combinations(schema.entities, 2)
            if not anc[a] & anc[b]}


def validate_implicit_disjointness(schema: Schema, graph: KnowledgeGraph,
                                   limit=DEFAULT_LIMIT) -> ValidationReport:
    core = validate_core(schema, graph, limit)
    diagnostics = list(core.diagnostics)
    stats = dict(core.stats)
    if not any(d.code.startswith("DM") for d in diagnostics):
        pairs = sorted(tuple(sorted(p)) for p in implicit_disjoint_pairs(schema))
        for a, b in pairs:
            found = [Diagnostic("VIOL-IMPLICIT-DISJOINT", f"{a} / {b}",
                                f"{i!r} is both a {a} and a {b}, which share no Isa-ancestor", (i,))
                     for i in _sorted(graph.members(a) & graph.members(b))]
            diagnostics += _cap(found, f"{a} / {b}", limit)
        stats["implicit_pairs"] = len(pairs)
    return ValidationReport.build("implicit", diagnostics, stats)


def validate(schema: Schema, graph: KnowledgeGraph, semantics: str = "core",
             limit=DEFAULT_LIMIT) -> ValidationReport:
    if semantics == "core":
        return validate_core(schema, graph, limit)
    if semantics == "implicit":
        return validate_implicit_disjointness(schema, graph, limit)
    raise ValueError(f"unknown semantics {semantics!r}")
