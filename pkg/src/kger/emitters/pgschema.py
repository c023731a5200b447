"""KG-ER to a PG-Schema graph type.

Entities become node types, binary relationships edge types directed from the
first declared role to the second, and multi-valued attributes auxiliary node
types reached through ``has<Attr>`` edges. Relationships with three or more
roles become node types with one edge type per role. Key and participation
constraints are compiled to ``FOR ... WITHIN`` clauses.
"""
from __future__ import annotations

from collections import Counter

from ..core import (Attribute, Cover, Disjoint, Identity, Isa, Key, MandatoryAttr,
                    MandatoryRole, Relationship, Schema, SingleAttr, SingleRole)
from ..patterns import AttrLeaf, RoleLeaf, RoleNode
from . import Coverage, EmitterOutput, cap, is_mandatory, is_single, lower_first


def type_name(name: str) -> str:
    return f"{lower_first(name)}Type"


def has_edge(attr: str) -> str:
    return f"has{cap(attr)}"


class _Var:
    def __init__(self, hint: str):
        self.letter = hint[:1].lower() if hint[:1].isalpha() else "v"
        self.used = False
        self.name = ""


class _Unsupported(Exception):
    pass


class _Clause:
    """One FOR clause: variables are named after rendering decides which are used."""

    def __init__(self, schema: Schema):
        self.s = schema
        self.vars: list[_Var] = []
        self.terms: list = []
        self.paths: list = []

    def var(self, hint: str, used=True) -> _Var:
        v = _Var(hint)
        v.used = used
        self.vars.append(v)
        return v

    def binary(self, R):
        return len(self.s.roles_of(R)) == 2

    # -- pattern compilation
    def at_entity(self, X: str, v: _Var, p) -> None:
        s = self.s
        if isinstance(p, AttrLeaf):
            if s.owner_of_attr.get(p.name) != X:
                raise _Unsupported(p.name)
            if is_single(s, X, p.name):
                self.terms.append((v, f".{p.name}"))
            else:
                e = self.var(p.name)
                self.paths.append(("attr", v, has_edge(p.name), e))
                self.terms.append((e, ""))
            return
        rel, ent = s.owner_of_role.get(p.name, (None, None))
        if ent != X:
            raise _Unsupported(p.name)
        if self.binary(rel):
            first, second = s.roles_of(rel)
            ends = {p.name: v}
            edge = self.var(rel, used=False)
            self.paths.append(("edge", rel, edge, ends, first, second))
            if isinstance(p, RoleLeaf):
                edge.used = True
                self.terms.append((edge, ""))
            else:
                for c in p.children:
                    self.at_edge(rel, edge, ends, c)
        else:
            r = self.var(rel)
            self.paths.append(("role", r, p.name, v))
            if isinstance(p, RoleLeaf):
                self.terms.append((r, ""))
            else:
                for c in p.children:
                    self.at_rnode(rel, r, c)

    def at_edge(self, R: str, edge: _Var, ends: dict, p) -> None:
        s = self.s
        if isinstance(p, AttrLeaf):
            if s.owner_of_attr.get(p.name) != R or not is_single(s, R, p.name):
                raise _Unsupported(p.name)
            edge.used = True
            self.terms.append((edge, f".{p.name}"))
            return
        if s.owner_of_role.get(p.name, (None,))[0] != R:
            raise _Unsupported(p.name)
        ent = s.role_entity(p.name)
        if p.name not in ends:
            ends[p.name] = self.var(ent)
        node = ends[p.name]
        if isinstance(p, RoleLeaf):
            self.terms.append((node, ""))
        else:
            for c in p.children:
                self.at_entity(ent, node, c)

    def at_rnode(self, R: str, r: _Var, p) -> None:
        s = self.s
        if isinstance(p, AttrLeaf):
            self.at_entity_like(R, r, p)
            return
        if s.owner_of_role.get(p.name, (None,))[0] != R:
            raise _Unsupported(p.name)
        ent = s.role_entity(p.name)
        x = self.var(ent)
        self.paths.append(("role", r, p.name, x))
        if isinstance(p, RoleLeaf):
            self.terms.append((x, ""))
        else:
            for c in p.children:
                self.at_entity(ent, x, c)

    def at_entity_like(self, owner, v, p):
        if self.s.owner_of_attr.get(p.name) != owner:
            raise _Unsupported(p.name)
        if is_single(self.s, owner, p.name):
            self.terms.append((v, f".{p.name}"))
        else:
            e = self.var(p.name)
            self.paths.append(("attr", v, has_edge(p.name), e))
            self.terms.append((e, ""))

    # -- rendering
    def _name_vars(self):
        used = [v for v in self.vars if v.used]
        counts = Counter(v.letter for v in used)
        seen = Counter()
        for v in used:
            seen[v.letter] += 1
            v.name = v.letter if counts[v.letter] == 1 else f"{v.letter}{seen[v.letter]}"

    def render(self, head, qualifier: str, head_edge: _Var | None = None) -> str:
        self._name_vars()

        def node(v):
            return f"({v.name})" if v is not None and v.used else "()"

        paths = []
        for item in self.paths:
            if item[0] == "attr":
                _, v, label, e = item
                paths.append(f"{node(v)}-[:{label}]->{node(e)}")
            elif item[0] == "role":
                _, r, role, x = item
                paths.append(f"{node(r)}-[:{role}]->{node(x)}")
            else:
                _, rel, edge, ends, first, second = item
                if edge is head_edge:
                    mid = f"[{edge.name}]"
                else:
                    mid = f"[{edge.name}:{rel}]" if edge.used else f"[:{rel}]"
                paths.append(f"{node(ends.get(first))}-{mid}->{node(ends.get(second))}")
        terms = ", ".join(v.name + suffix for v, suffix in self.terms)
        text = f"FOR {head()} {qualifier} {terms}"
        if paths and not (len(paths) == 1 and self.paths[0][0] == "edge" and head_edge is not None
                          and len(self.paths[0][3]) == 0):
            text += " WITHIN " + ", ".join(paths)
        return text


def _prop_list(schema: Schema, owner: str) -> str:
    props = []
    for a in schema.attrs_of(owner):
        if is_single(schema, owner, a):
            opt = "" if is_mandatory(schema, owner, a) else "OPTIONAL "
            props.append(f"{opt}{a} STRING")
    return " {" + ", ".join(props) + "}" if props else ""


def emit_pgschema(schema: Schema, name: str = "schemaGraphType") -> EmitterOutput:
    s, cov = schema, Coverage()
    nodes, edges, clauses = [], [], []

    def node_type(owner, label):
        nodes.append(f"({type_name(owner)}: {label}{_prop_list(s, owner)})")
        for a in s.attrs_of(owner):
            if not is_single(s, owner, a):
                nodes.append(f"({type_name(a)}: {cap(a)} {{{a} STRING}})")
                edges.append(f"(:{type_name(owner)})-[:{has_edge(a)}]->(:{type_name(a)})")

    for X in s.entities:
        node_type(X, X)
    for R in s.relationships:
        roles = s.roles_of(R)
        if len(roles) == 2:
            src, tgt = (type_name(s.role_entity(b)) for b in roles)
            edges.append(f"(:{src})-[:{R}{_prop_list(s, R)}]->(:{tgt})")
            for a in s.attrs_of(R):
                if not is_single(s, R, a):
                    cov.gap(Attribute(R, a), "edge types cannot carry multi-valued properties")
        else:
            node_type(R, cap(R))
            for b in roles:
                edges.append(f"(:{type_name(R)})-[:{b}]->(:{type_name(s.role_entity(b))})")
            cov.gap(Relationship(R), f"relationship with {len(roles)} roles is modelled as a node type")

    def head_for(owner):
        c = _Clause(s)
        if s.is_entity(owner) or len(s.roles_of(owner)) != 2:
            v = c.var(owner)
            return c, v, None, (lambda: f"({v.name}:{type_name(owner)})")
        e = c.var(owner)
        return c, e, e, (lambda: f"()-[{e.name}:{owner}]->()")

    done_roles = set()
    for stmt in s.constraints:
        if isinstance(stmt, (Isa, Disjoint, Cover)):
            cov.gap(stmt, "type hierarchies are not translated; entities are emitted flat")
        elif isinstance(stmt, (MandatoryAttr, SingleAttr)):
            owner, a = stmt.owner, stmt.attribute
            if s.owner_of_attr.get(a) != owner:
                cov.gap(stmt, "inherited attribute")
            elif is_single(s, owner, a):
                cov.ok(stmt)   # a (non-optional) property
            elif s.is_entity(owner) or len(s.roles_of(owner)) > 2:
                c, v, _, head = head_for(owner)
                c.at_entity_like(owner, v, AttrLeaf(a))
                clauses.append(c.render(head, "MANDATORY"))
                cov.ok(stmt)
            else:
                cov.gap(stmt, "edge types cannot carry multi-valued properties")
        elif isinstance(stmt, (MandatoryRole, SingleRole)):
            key = (stmt.entity, stmt.role, stmt.relationship)
            if key in done_roles:
                cov.ok(stmt)
                continue
            mand = MandatoryRole(*key) in s.constraints
            single = SingleRole(*key) in s.constraints
            qual = " ".join(q for q, on in (("MANDATORY", mand), ("SINGLETON", single)) if on)
            if s.owner_of_role.get(stmt.role, (None,))[0] != stmt.relationship or not s.is_entity(stmt.entity):
                cov.gap(stmt, "role does not belong to the relationship")
                continue
            c = _Clause(s)
            v = c.var(stmt.entity)
            if len(s.roles_of(stmt.relationship)) == 2:
                first, second = s.roles_of(stmt.relationship)
                edge = c.var(stmt.relationship)
                c.paths.append(("edge", stmt.relationship, edge, {stmt.role: v}, first, second))
            else:
                edge = c.var(stmt.relationship)
                c.paths.append(("role", edge, stmt.role, v))
            c.terms.append((edge, ""))
            X = stmt.entity
            clauses.append(c.render(lambda: f"({v.name}:{type_name(X)})", qual))
            done_roles.add(key)
            cov.ok(stmt)
        elif isinstance(stmt, (Key, Identity)):
            if not (s.is_entity(stmt.owner) or s.is_relationship(stmt.owner)):
                cov.gap(stmt, "unknown owner")
                continue
            c, v, head_edge, head = head_for(stmt.owner)
            try:
                if head_edge is not None:
                    ends: dict = {}
                    first, second = s.roles_of(stmt.owner)
                    c.paths.append(("edge", stmt.owner, head_edge, ends, first, second))
                    for p in stmt.patterns:
                        c.at_edge(stmt.owner, head_edge, ends, p)
                elif s.is_entity(stmt.owner):
                    for p in stmt.patterns:
                        c.at_entity(stmt.owner, v, p)
                else:
                    for p in stmt.patterns:
                        c.at_rnode(stmt.owner, v, p)
            except _Unsupported as exc:
                cov.gap(stmt, f"pattern element {exc.args[0]!r} has no counterpart in the graph type")
                continue
            qual = "IDENTIFIER" if isinstance(stmt, Identity) else "EXCLUSIVE"
            clauses.append(c.render(head, qual, head_edge))
            cov.ok(stmt)

    body = []
    for title, items in (("Node types", nodes), ("Edge types", edges), ("Constraints", clauses)):
        if items:
            body.append(f"    // {title}\n" + ",\n".join(f"    {i}" for i in items))
    text = f"CREATE GRAPH TYPE {name} STRICT {{\n" + ",\n\n".join(body) + ("\n" if body else "") + "}\n"
    if cov.unexpressed:
        text += "\n".join(f"// UNEXPRESSED: {d.subject}: {d.message}" for d in cov.unexpressed) + "\n"
    return cov.output(text)
