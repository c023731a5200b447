"""Schema and knowledge-graph data model shared by every other module."""
from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from decimal import Context, Decimal, InvalidOperation
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

# closed set of diagnostic codes
CODES = frozenset({
    # schema construction
    "DUP-ATTR-OWNER", "DUP-ROLE-OWNER", "NAME-CLASS-OVERLAP",
    "UNKNOWN-ENTITY", "UNKNOWN-NAME",
    # well-formedness
    "WF1", "WF2", "WF3", "WF4", "WF5", "WF6", "WF7", "WF8", "WF9",
    # graph loading
    "GRAPH-UNKNOWN-NAME", "GRAPH-ID-CLASH", "GRAPH-BAD-REF", "GRAPH-SYNTAX",
    # data model conditions
    "DM1", "DM2", "DM3",
    # statement semantics
    "VIOL-ATTRIBUTE", "VIOL-ROLE", "VIOL-MANDATORY-ATTR", "VIOL-SINGLE-ATTR",
    "VIOL-MANDATORY-ROLE", "VIOL-SINGLE-ROLE", "VIOL-KEY", "VIOL-IDENTITY",
    "VIOL-ISA", "VIOL-DISJOINT", "VIOL-COVER", "VIOL-IMPLICIT-DISJOINT",
    # evaluation / emission
    "NOT-ROOTED", "NOT-AN-INSTANCE", "UNSUPPORTED-FORMULA",
    "UNEXPRESSED", "TRUNCATED",
})


# ---------------------------------------------------------------------------
# Values

@dataclass(frozen=True, eq=False)
class Value:
    """A data value. Integers and decimals with the same numeric value are equal."""

    tag: str
    lexical: str

    def __post_init__(self):
        if self.tag not in ("text", "integer", "decimal", "boolean"):
            raise ValueError(f"unknown value tag {self.tag!r}")

    @classmethod
    def of(cls, raw: Union[str, int, float, Decimal, bool]) -> "Value":
        if isinstance(raw, bool):
            return cls("boolean", "true" if raw else "false")
        if isinstance(raw, int):
            return cls("integer", str(raw))
        if isinstance(raw, (float, Decimal)):
            return cls("decimal", _canonical_decimal(Decimal(str(raw))))
        if isinstance(raw, str):
            return cls("text", raw)
        raise TypeError(f"unsupported value {raw!r}")

    @classmethod
    def parse(cls, tag: str, lexical: str) -> "Value":
        if tag == "integer":
            return cls(tag, str(int(lexical)))
        if tag == "decimal":
            try:
                return cls(tag, _canonical_decimal(Decimal(lexical)))
            except InvalidOperation as exc:
                raise ValueError(f"bad decimal {lexical!r}") from exc
        if tag == "boolean":
            if lexical not in ("true", "false"):
                raise ValueError(f"bad boolean {lexical!r}")
        return cls(tag, lexical)

    def _key(self):
        if self.tag in ("integer", "decimal"):
            return ("number", _exact_normalize(Decimal(self.lexical)))
        return (self.tag, self.lexical)

    def __eq__(self, other):
        if not isinstance(other, Value):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __lt__(self, other: "Value"):
        return (self.tag, self.lexical) < (other.tag, other.lexical)

    def to_python(self):
        if self.tag == "integer":
            return int(self.lexical)
        if self.tag == "decimal":
            return Decimal(self.lexical)
        if self.tag == "boolean":
            return self.lexical == "true"
        return self.lexical

    def __str__(self):
        return self.lexical if self.tag != "text" else repr(self.lexical)

    __repr__ = __str__


def _exact_normalize(d: Decimal) -> Decimal:
    # the default context would round to 28 significant digits
    return d.normalize(Context(prec=max(28, len(d.as_tuple().digits))))


def _canonical_decimal(d: Decimal) -> str:
    if not d.is_finite():
        raise ValueError("non-finite decimal")
    text = format(_exact_normalize(d), "f")
    if "." not in text:
        text += ".0"
    return text


# ---------------------------------------------------------------------------
# Diagnostics and errors

@dataclass(frozen=True)
class Diagnostic:
    code: str
    subject: str
    message: str
    witnesses: tuple = ()
    severity: str = "error"

    def __post_init__(self):
        assert self.code in CODES, self.code
        assert self.severity in ("error", "warning")

    def __str__(self):
        text = f"{self.severity} {self.code} {self.subject}: {self.message}"
        if self.witnesses:
            text += " [" + ", ".join(map(_witness_str, self.witnesses)) + "]"
        return text


def _witness_str(w) -> str:
    if isinstance(w, tuple):
        return "(" + ", ".join(map(_witness_str, w)) + ")"
    return str(w)


class KgerError(Exception):
    """Raised when an operation cannot produce its result; carries diagnostics."""

    def __init__(self, diagnostics: Sequence[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))

    @property
    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics]


class SchemaError(KgerError):
    pass


class UnknownNameError(KgerError):
    pass


# ---------------------------------------------------------------------------
# Statements

@dataclass(frozen=True)
class Entity:
    name: str

    def __str__(self):
        return f"Entity({self.name})"


@dataclass(frozen=True)
class Relationship:
    name: str

    def __str__(self):
        return f"Relationship({self.name})"


@dataclass(frozen=True)
class Attribute:
    owner: str
    name: str

    def __str__(self):
        return f"Attribute({self.owner}, {self.name})"


@dataclass(frozen=True)
class Role:
    relationship: str
    name: str
    entity: str

    def __str__(self):
        return f"Role({self.relationship}, {self.name}, {self.entity})"


@dataclass(frozen=True)
class MandatoryAttr:
    owner: str
    attribute: str

    def __str__(self):
        return f"Mandatory({self.owner}, {self.attribute})"


@dataclass(frozen=True)
class SingleAttr:
    owner: str
    attribute: str

    def __str__(self):
        return f"Single({self.owner}, {self.attribute})"


@dataclass(frozen=True)
class MandatoryRole:
    entity: str
    role: str
    relationship: str

    def __str__(self):
        return f"Mandatory({self.entity}, {self.role}, {self.relationship})"


@dataclass(frozen=True)
class SingleRole:
    entity: str
    role: str
    relationship: str

    def __str__(self):
        return f"Single({self.entity}, {self.role}, {self.relationship})"


@dataclass(frozen=True)
class Key:
    owner: str
    patterns: tuple  # of Pattern

    def __post_init__(self):
        object.__setattr__(self, "patterns", tuple(self.patterns))
        if not self.patterns:
            raise ValueError("key pattern list must be non-empty")

    def __str__(self):
        return f"Key({self.owner}, [{', '.join(map(str, self.patterns))}])"


@dataclass(frozen=True)
class Identity:
    owner: str
    patterns: tuple  # of Pattern

    def __post_init__(self):
        object.__setattr__(self, "patterns", tuple(self.patterns))
        if not self.patterns:
            raise ValueError("identity pattern list must be non-empty")

    def __str__(self):
        return f"Identity({self.owner}, [{', '.join(map(str, self.patterns))}])"


@dataclass(frozen=True)
class Isa:
    sub: str
    sup: str

    def __str__(self):
        return f"Isa({self.sub}, {self.sup})"


@dataclass(frozen=True)
class Disjoint:
    first: str
    second: str

    def __str__(self):
        return f"Disjoint({self.first}, {self.second})"


@dataclass(frozen=True)
class Cover:
    members: frozenset
    entity: str

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        if not self.members:
            raise ValueError("cover member set must be non-empty")

    def __str__(self):
        return f"Cover({{{', '.join(sorted(self.members))}}}, {self.entity})"


ShapeStatement = Union[Entity, Relationship, Attribute, Role]
ConstraintStatement = Union[MandatoryAttr, SingleAttr, MandatoryRole, SingleRole,
                            Key, Identity, Isa, Disjoint, Cover]
Statement = Union[ShapeStatement, ConstraintStatement]

SHAPE_KINDS = (Entity, Relationship, Attribute, Role)
CONSTRAINT_KINDS = (MandatoryAttr, SingleAttr, MandatoryRole, SingleRole,
                    Key, Identity, Isa, Disjoint, Cover)


# ---------------------------------------------------------------------------
# Schema

@dataclass(frozen=True, eq=False)
class Schema:
    """A KG-ER schema. Statement order is kept; equality ignores it."""

    shape: tuple = ()
    constraints: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "shape", tuple(self.shape))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        entities, relationships = [], []
        attrs_of, roles_of = defaultdict(list), defaultdict(list)
        participations = defaultdict(list)
        owner_of_attr, owner_of_role = {}, {}
        for s in self.shape:
            if isinstance(s, Entity):
                entities.append(s.name)
            elif isinstance(s, Relationship):
                relationships.append(s.name)
            elif isinstance(s, Attribute):
                attrs_of[s.owner].append(s.name)
                owner_of_attr.setdefault(s.name, s.owner)
            elif isinstance(s, Role):
                roles_of[s.relationship].append(s.name)
                participations[s.entity].append((s.relationship, s.name))
                owner_of_role.setdefault(s.name, (s.relationship, s.entity))
        isa = defaultdict(list)
        for c in self.constraints:
            if isinstance(c, Isa):
                isa[c.sub].append(c.sup)
        set_ = object.__setattr__
        set_(self, "entities", tuple(entities))
        set_(self, "relationships", tuple(relationships))
        set_(self, "_attrs_of", {k: tuple(v) for k, v in attrs_of.items()})
        set_(self, "_roles_of", {k: tuple(v) for k, v in roles_of.items()})
        set_(self, "_participations", {k: tuple(v) for k, v in participations.items()})
        set_(self, "owner_of_attr", owner_of_attr)
        set_(self, "owner_of_role", owner_of_role)
        set_(self, "_isa", {k: tuple(v) for k, v in isa.items()})
        set_(self, "_ancestors", {})

    # -- equality is over statement sets
    def __eq__(self, other):
        if not isinstance(other, Schema):
            return NotImplemented
        return (frozenset(self.shape) == frozenset(other.shape)
                and frozenset(self.constraints) == frozenset(other.constraints))

    def __hash__(self):
        return hash((frozenset(self.shape), frozenset(self.constraints)))

    def __iter__(self) -> Iterator[Statement]:
        yield from self.shape
        yield from self.constraints

    def __len__(self):
        return len(self.shape) + len(self.constraints)

    def __repr__(self):
        return f"Schema({len(self.shape)} shape, {len(self.constraints)} constraint statements)"

    # -- vocabulary
    @property
    def attributes(self) -> tuple:
        return tuple(self.owner_of_attr)

    @property
    def roles(self) -> tuple:
        return tuple(self.owner_of_role)

    def is_entity(self, name: str) -> bool:
        return name in self.entities

    def is_relationship(self, name: str) -> bool:
        return name in self.relationships

    def attrs_of(self, owner: str) -> tuple:
        return self._attrs_of.get(owner, ())

    def roles_of(self, relationship: str) -> tuple:
        return self._roles_of.get(relationship, ())

    def participations(self, entity: str) -> tuple:
        """(relationship, role) pairs in which ``entity`` participates directly."""
        return self._participations.get(entity, ())

    def role_entity(self, role: str) -> str:
        return self.owner_of_role[role][1]

    def role_relationship(self, role: str) -> str:
        return self.owner_of_role[role][0]

    def supertypes(self, entity: str) -> tuple:
        return self._isa.get(entity, ())

    def of_kind(self, *kinds) -> list:
        return [s for s in self if isinstance(s, kinds)]

    def has(self, stmt: Statement) -> bool:
        return stmt in self.constraints or stmt in self.shape

    def with_statements(self, *added: Statement) -> "Schema":
        return build_schema([*self, *added])

    def without(self, *removed: Statement) -> "Schema":
        drop = set(removed)
        return build_schema([s for s in self if s not in drop])


def build_schema(statements: Iterable[Statement]) -> Schema:
    """Build a schema, deduplicating statements and enforcing global name uniqueness.

    Raises SchemaError with DUP-ATTR-OWNER / DUP-ROLE-OWNER / NAME-CLASS-OVERLAP
    diagnostics when the vocabulary is inconsistent.
    """
    shape, constraints, seen = [], [], set()
    for s in statements:
        if s in seen:
            continue
        seen.add(s)
        if isinstance(s, SHAPE_KINDS):
            shape.append(s)
        elif isinstance(s, CONSTRAINT_KINDS):
            constraints.append(s)
        else:
            raise TypeError(f"not a statement: {s!r}")

    diagnostics = []
    attr_owner: dict[str, Attribute] = {}
    role_owner: dict[str, Role] = {}
    for s in shape:
        if isinstance(s, Attribute):
            prev = attr_owner.setdefault(s.name, s)
            if prev.owner != s.owner:
                diagnostics.append(Diagnostic(
                    "DUP-ATTR-OWNER", str(s),
                    f"attribute {s.name!r} is already owned by {prev.owner!r}",
                    (prev.owner, s.owner)))
        elif isinstance(s, Role):
            prev = role_owner.setdefault(s.name, s)
            if (prev.relationship, prev.entity) != (s.relationship, s.entity):
                diagnostics.append(Diagnostic(
                    "DUP-ROLE-OWNER", str(s),
                    f"role {s.name!r} is already declared as {prev}",
                    (prev.relationship, s.relationship)))

    classes = defaultdict(set)
    for s in shape:
        if isinstance(s, Entity):
            classes[s.name].add("entity")
        elif isinstance(s, Relationship):
            classes[s.name].add("relationship")
        elif isinstance(s, Attribute):
            classes[s.name].add("attribute")
        elif isinstance(s, Role):
            classes[s.name].add("role")
    for name, kinds in classes.items():
        if len(kinds) > 1:
            diagnostics.append(Diagnostic(
                "NAME-CLASS-OVERLAP", name,
                f"name {name!r} is used as {' and '.join(sorted(kinds))}"))

    if diagnostics:
        raise SchemaError(diagnostics)
    return Schema(tuple(shape), tuple(constraints))


def ancestors_of(schema: Schema, entity: str) -> frozenset:
    """Reflexive-transitive closure of Isa starting at ``entity``."""
    if not schema.is_entity(entity):
        raise UnknownNameError([Diagnostic("UNKNOWN-ENTITY", entity, "entity is not declared")])
    cached = schema._ancestors.get(entity)
    if cached is not None:
        return cached
    seen = {entity}
    stack = [entity]
    while stack:
        for sup in schema.supertypes(stack.pop()):
            if sup not in seen:
                seen.add(sup)
                stack.append(sup)
    result = frozenset(seen)
    schema._ancestors[entity] = result
    return result


def roots_of(schema: Schema) -> frozenset:
    """Entities without a declared superclass."""
    return frozenset(e for e in schema.entities if not schema.supertypes(e))


def closure_ancestors(schema: Schema, names: Iterable[str]) -> frozenset:
    """Union of ancestor sets; names outside the schema are kept as-is."""
    out = set()
    for n in names:
        out |= ancestors_of(schema, n) if schema.is_entity(n) else {n}
    return frozenset(out)


# ---------------------------------------------------------------------------
# Knowledge graphs

Id = str
Component = Union[Id, Value]


@dataclass(frozen=True, eq=False)
class KnowledgeGraph:
    """Finite relational structure over a schema vocabulary."""

    entity_membership: Mapping[Id, frozenset] = field(default_factory=dict)
    rel_membership: Mapping[Id, str] = field(default_factory=dict)
    attr_facts: frozenset = frozenset()  # (id, attribute, Value)
    role_facts: frozenset = frozenset()  # (rel id, role, entity id)

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "entity_membership",
             {k: frozenset(v) for k, v in self.entity_membership.items()})
        set_(self, "rel_membership", dict(self.rel_membership))
        set_(self, "attr_facts", frozenset(self.attr_facts))
        set_(self, "role_facts", frozenset(self.role_facts))
        clash = self.entity_membership.keys() & self.rel_membership.keys()
        if clash:
            raise ValueError(f"ids used as both entity and relationship: {sorted(clash)}")
        values = defaultdict(set)
        for i, a, v in self.attr_facts:
            values[(i, a)].add(v)
        out, into = defaultdict(set), defaultdict(set)
        for r, b, e in self.role_facts:
            out[(r, b)].add(e)
            into[(e, b)].add(r)
        members = defaultdict(set)
        for i, names in self.entity_membership.items():
            for n in names:
                members[n].add(i)
        for i, n in self.rel_membership.items():
            members[n].add(i)
        set_(self, "_values", dict(values))
        set_(self, "_out", dict(out))
        set_(self, "_into", dict(into))
        set_(self, "_members", dict(members))

    def __eq__(self, other):
        if not isinstance(other, KnowledgeGraph):
            return NotImplemented
        return (self.entity_membership == other.entity_membership
                and self.rel_membership == other.rel_membership
                and self.attr_facts == other.attr_facts
                and self.role_facts == other.role_facts)

    def __hash__(self):
        return hash((self.attr_facts, self.role_facts))

    @property
    def entity_ids(self) -> frozenset:
        return frozenset(self.entity_membership)

    @property
    def rel_ids(self) -> frozenset:
        return frozenset(self.rel_membership)

    @property
    def ids(self) -> frozenset:
        return self.entity_ids | self.rel_ids

    def values(self, node: Id, attribute: str) -> frozenset:
        return frozenset(self._values.get((node, attribute), ()))

    def fillers(self, rel: Id, role: str) -> frozenset:
        """Entity ids e with role(rel, e)."""
        return frozenset(self._out.get((rel, role), ()))

    def incoming(self, entity: Id, role: str) -> frozenset:
        """Relationship ids r with role(r, entity)."""
        return frozenset(self._into.get((entity, role), ()))

    def members(self, name: str) -> frozenset:
        """Extension of an entity or relationship name."""
        return frozenset(self._members.get(name, ()))

    def types_of(self, node: Id) -> frozenset:
        if node in self.rel_membership:
            return frozenset({self.rel_membership[node]})
        return self.entity_membership.get(node, frozenset())

    def domain(self) -> frozenset:
        """Active domain: every id and every value occurring in the graph."""
        return self.ids | {v for _, _, v in self.attr_facts} | {e for _, _, e in self.role_facts}

    def size(self) -> int:
        return len(self.entity_membership) + len(self.rel_membership)

    def replace(self, *, entity_membership=None, rel_membership=None,
                attr_facts=None, role_facts=None) -> "KnowledgeGraph":
        return KnowledgeGraph(
            self.entity_membership if entity_membership is None else entity_membership,
            self.rel_membership if rel_membership is None else rel_membership,
            self.attr_facts if attr_facts is None else attr_facts,
            self.role_facts if role_facts is None else role_facts,
        )

    def close_isa(self, schema: Schema) -> "KnowledgeGraph":
        """Close entity memberships upward along Isa."""
        return self.replace(entity_membership={
            i: closure_ancestors(schema, names) for i, names in self.entity_membership.items()
        })


def sort_key(component: Optional[Component]):
    """Total order over ids, values and tuples thereof, for deterministic output."""
    if isinstance(component, tuple):
        return (2, tuple(sort_key(c) for c in component))
    if isinstance(component, Value):
        return (1, component.tag, component.lexical)
    return (0, str(component))
