"""Text syntax for schemas (``.kger``) and the JSON graph interchange format."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Optional

from .core import (Attribute, Cover, Diagnostic, Disjoint, Entity, Identity, Isa,
                   Key, KgerError, KnowledgeGraph, MandatoryAttr, MandatoryRole,
                   Relationship, Role, Schema, SingleAttr, SingleRole, Value,
                   build_schema, sort_key)
from .patterns import AttrLeaf, Pattern, RoleLeaf, RoleNode


@dataclass
class ParseError(Exception):
    """A malformed schema line; positions are 1-based."""

    line: int
    column: int
    expected: str
    found: str

    def __str__(self):
        return f"{self.line}:{self.column}: expected {self.expected}, found {self.found}"


class SchemaSyntaxError(Exception):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(map(str, self.errors)))


class GraphError(KgerError):
    pass


_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[()\[\]{},])|(?P<bad>\S))")


class _Line:
    """Recursive-descent parser over the tokens of a single statement line."""

    def __init__(self, text: str, lineno: int):
        self.lineno = lineno
        self.tokens = []  # (kind, lexeme, column)
        pos = 0
        while True:
            m = _TOKEN.match(text, pos)
            if not m:
                break
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind) + 1))
            pos = m.end()
        self.end_col = len(text.rstrip()) + 1
        self.i = 0

    def error(self, expected: str) -> ParseError:
        if self.i < len(self.tokens):
            _, lexeme, col = self.tokens[self.i]
            return ParseError(self.lineno, col, expected, repr(lexeme))
        return ParseError(self.lineno, self.end_col, expected, "end of line")

    def peek(self) -> Optional[str]:
        if self.i < len(self.tokens):
            kind, lexeme, _ = self.tokens[self.i]
            return lexeme if kind != "bad" else None
        return None

    def ident(self, what: str = "identifier") -> str:
        if self.i < len(self.tokens) and self.tokens[self.i][0] == "ident":
            self.i += 1
            return self.tokens[self.i - 1][1]
        raise self.error(what)

    def expect(self, lexeme: str) -> None:
        if self.peek() == lexeme:
            self.i += 1
            return
        raise self.error(repr(lexeme))

    def accept(self, lexeme: str) -> bool:
        if self.peek() == lexeme:
            self.i += 1
            return True
        return False

    def done(self) -> None:
        if self.i != len(self.tokens):
            raise self.error("end of line")

    # term := ident | ident '(' term (',' term)* ')'
    def term(self):
        name = self.ident("pattern")
        if not self.accept("("):
            return (name, None)
        children = [self.term()]
        while self.accept(","):
            children.append(self.term())
        self.expect(")")
        return (name, tuple(children))

    def pattern_list(self):
        self.expect("[")
        if self.peek() == "]":
            raise self.error("non-empty pattern list")
        terms = [self.term()]
        while self.accept(","):
            terms.append(self.term())
        self.expect("]")
        return tuple(terms)

    def name_set(self):
        self.expect("{")
        if self.peek() == "}":
            raise self.error("non-empty entity set")
        names = [self.ident("entity name")]
        while self.accept(","):
            names.append(self.ident("entity name"))
        self.expect("}")
        return names


_KEYWORDS = ("Entity", "Relationship", "Attribute", "Role", "Mandatory", "Single",
             "Key", "Identity", "Isa", "Disjoint", "Cover")


def _parse_statement(p: _Line):
    kw = p.ident("statement keyword")
    if kw not in _KEYWORDS:
        p.i -= 1
        raise p.error("statement keyword (" + ", ".join(_KEYWORDS) + ")")
    p.expect("(")
    if kw in ("Entity", "Relationship"):
        args = [p.ident()]
    elif kw == "Cover":
        args = [p.name_set()]
        p.expect(",")
        args.append(p.ident())
    elif kw in ("Key", "Identity"):
        args = [p.ident()]
        p.expect(",")
        args.append(p.pattern_list())
    else:
        args = [p.ident()]
        p.expect(",")
        args.append(p.ident())
        if kw in ("Role", "Mandatory", "Single") and p.accept(","):
            args.append(p.ident())
        elif kw == "Role":
            raise p.error("','")
    p.expect(")")
    p.done()
    return kw, args


def _classify(term, roles: set) -> Pattern:
    name, children = term
    if children is not None:
        return RoleNode(name, tuple(_classify(c, roles) for c in children))
    return RoleLeaf(name) if name in roles else AttrLeaf(name)


def parse_pattern(text: str, schema: Schema) -> Pattern:
    """Parse a single pattern term; leaves naming a declared role become role leaves."""
    p = _Line(text, 1)
    try:
        term = p.term()
        p.done()
    except ParseError as err:
        raise SchemaSyntaxError([err]) from None
    return _classify(term, set(schema.roles))


def parse_schema(source: str) -> Schema:
    """Parse ``.kger`` text. Raises SchemaSyntaxError listing every malformed line,
    or SchemaError when the statements violate global name uniqueness."""
    errors, raw = [], []
    for lineno, line in enumerate(source.splitlines(), start=1):
        line = line.split("#", 1)[0]
        if not line.strip():
            continue
        p = _Line(line, lineno)
        try:
            raw.append(_parse_statement(p))
        except ParseError as err:
            errors.append(err)
    if errors:
        raise SchemaSyntaxError(errors)

    roles = {args[1] for kw, args in raw if kw == "Role"}
    statements = []
    for kw, args in raw:
        if kw == "Entity":
            statements.append(Entity(args[0]))
        elif kw == "Relationship":
            statements.append(Relationship(args[0]))
        elif kw == "Attribute":
            statements.append(Attribute(*args))
        elif kw == "Role":
            statements.append(Role(*args))
        elif kw == "Mandatory":
            statements.append(MandatoryAttr(*args) if len(args) == 2 else MandatoryRole(*args))
        elif kw == "Single":
            statements.append(SingleAttr(*args) if len(args) == 2 else SingleRole(*args))
        elif kw in ("Key", "Identity"):
            cls = Key if kw == "Key" else Identity
            statements.append(cls(args[0], tuple(_classify(t, roles) for t in args[1])))
        elif kw == "Isa":
            statements.append(Isa(*args))
        elif kw == "Disjoint":
            statements.append(Disjoint(*args))
        elif kw == "Cover":
            statements.append(Cover(frozenset(args[0]), args[1]))
    return build_schema(statements)


_ORDER = (Entity, Relationship, Attribute, Role, MandatoryAttr, SingleAttr,
          MandatoryRole, SingleRole, Key, Identity, Isa, Disjoint, Cover)


def serialize_schema(schema: Schema) -> str:
    """Canonical text: one statement per line, grouped by kind, alphabetical within."""
    lines = []
    for kind in _ORDER:
        lines.extend(sorted(str(s) for s in schema if type(s) is kind))
    return "".join(line + "\n" for line in lines)


# ---------------------------------------------------------------------------
# graphs

_SECTIONS = ("entities", "relationships", "attributes", "roles")


def _value_of(raw) -> Optional[Value]:
    if isinstance(raw, (bool, int, str, Decimal)):
        return Value.of(raw)
    if isinstance(raw, float):
        return Value.of(Decimal(repr(raw)))
    return None


def load_graph(source: str, schema: Schema) -> KnowledgeGraph:
    """Parse graph JSON against a schema vocabulary. Raises GraphError."""
    def bad(code, subject, message, *witnesses):
        diagnostics.append(Diagnostic(code, subject, message, tuple(witnesses)))

    diagnostics: list[Diagnostic] = []
    try:
        doc = json.loads(source, parse_float=Decimal) if source.strip() else {}
    except json.JSONDecodeError as exc:
        raise GraphError([Diagnostic("GRAPH-SYNTAX", f"line {exc.lineno}", exc.msg)]) from None
    if not isinstance(doc, dict):
        raise GraphError([Diagnostic("GRAPH-SYNTAX", "document", "top level must be an object")])
    for k in doc:
        if k not in _SECTIONS:
            bad("GRAPH-SYNTAX", str(k), "unknown section")
    sections = {}
    for k in _SECTIONS:
        sec = doc.get(k, [])
        if not isinstance(sec, list) or not all(isinstance(item, dict) for item in sec):
            bad("GRAPH-SYNTAX", k, "section must be a list of objects")
            sec = []
        sections[k] = sec

    def field(item, name, section, kinds=(str,)):
        v = item.get(name)
        if not isinstance(v, kinds):
            bad("GRAPH-SYNTAX", section, f"field {name!r} missing or of wrong type in {item}")
            return None
        return v

    entity_names, rel_names = set(schema.entities), set(schema.relationships)
    ent: dict[str, set] = {}
    for item in sections["entities"]:
        i, types = field(item, "id", "entities"), field(item, "types", "entities", (list,))
        if i is None or types is None:
            continue
        if not types or not all(isinstance(t, str) for t in types):
            bad("GRAPH-SYNTAX", i, "entity types must be a non-empty list of names")
            continue
        for t in types:
            if t not in entity_names:
                bad("GRAPH-UNKNOWN-NAME", i, f"unknown entity {t!r}", t)
        ent.setdefault(i, set()).update(t for t in types if t in entity_names)

    rel: dict[str, str] = {}
    for item in sections["relationships"]:
        i, t = field(item, "id", "relationships"), field(item, "type", "relationships")
        if i is None or t is None:
            continue
        if t not in rel_names:
            bad("GRAPH-UNKNOWN-NAME", i, f"unknown relationship {t!r}", t)
            continue
        if i in ent:
            bad("GRAPH-ID-CLASH", i, "id used for both an entity and a relationship instance", i)
            continue
        if rel.setdefault(i, t) != t:
            bad("GRAPH-ID-CLASH", i, f"relationship instance has two types {rel[i]!r} and {t!r}", rel[i], t)

    attrs = set()
    for item in sections["attributes"]:
        owner, name = field(item, "owner", "attributes"), field(item, "name", "attributes")
        if owner is None or name is None:
            continue
        value = _value_of(item.get("value"))
        if value is None:
            bad("GRAPH-SYNTAX", owner, f"value of {name!r} must be a string, number or boolean")
            continue
        if name not in schema.owner_of_attr:
            bad("GRAPH-UNKNOWN-NAME", owner, f"unknown attribute {name!r}", name)
            continue
        if owner not in ent and owner not in rel:
            bad("GRAPH-BAD-REF", owner, f"attribute {name!r} on unknown id", owner)
            continue
        attrs.add((owner, name, value))

    roles = set()
    for item in sections["roles"]:
        r, b, e = (field(item, k, "roles") for k in ("rel", "role", "target"))
        if None in (r, b, e):
            continue
        if b not in schema.owner_of_role:
            bad("GRAPH-UNKNOWN-NAME", r, f"unknown role {b!r}", b)
            continue
        if r not in rel:
            bad("GRAPH-BAD-REF", r, f"role {b!r} on an id that is not a relationship instance", r)
            continue
        if e not in ent:
            bad("GRAPH-BAD-REF", r, f"role {b!r} targets an id that is not an entity instance", e)
            continue
        if schema.role_relationship(b) != rel[r]:
            bad("GRAPH-UNKNOWN-NAME", r,
                f"role {b!r} belongs to {schema.role_relationship(b)!r}, not {rel[r]!r}", b)
            continue
        roles.add((r, b, e))

    if diagnostics:
        raise GraphError(diagnostics)
    return KnowledgeGraph(ent, rel, attrs, roles)


def _json_value(v: Value):
    if v.tag == "decimal":
        return float(v.lexical)
    return v.to_python()


def dump_graph(graph: KnowledgeGraph) -> str:
    """Deterministic JSON rendering accepted by ``load_graph``."""
    doc = {
        "entities": [{"id": i, "types": sorted(graph.entity_membership[i])}
                     for i in sorted(graph.entity_membership)],
        "relationships": [{"id": i, "type": graph.rel_membership[i]}
                          for i in sorted(graph.rel_membership)],
        "attributes": [{"owner": i, "name": a, "value": _json_value(v)}
                       for i, a, v in sorted(graph.attr_facts, key=sort_key)],
        "roles": [{"rel": r, "role": b, "target": e}
                  for r, b, e in sorted(graph.role_facts)],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
